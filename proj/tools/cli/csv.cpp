#include "cli/csv.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "macfcs/errors.hpp"

namespace macfcs::cli {

const std::vector<std::string>& csv_header(CsvSchema schema) {
  static const std::vector<std::string> evaluate{"label", "lhs_bits", "rhs_bits", "slack_bits",
                                                 "feasible"};
  static const std::vector<std::string> min_power{"strategy", "objective", "p_star",
                                                  "witness_params_json"};
  static const std::vector<std::string> sweep{"swept_value", "strategy", "p_star",
                                              "witness_params_json"};
  static const std::vector<std::string> region{"strategy", "kind", "r1_bits", "r2_bits"};
  static const std::vector<std::string> cf_min_noise{"pu1", "pv1", "pu2", "pv2", "ntilde_star"};
  switch (schema) {
    case CsvSchema::kEvaluate: return evaluate;
    case CsvSchema::kMinPower: return min_power;
    case CsvSchema::kSweep: return sweep;
    case CsvSchema::kRegion: return region;
    case CsvSchema::kCfMinNoise: return cf_min_noise;
  }
  return evaluate;
}

std::string format_number(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  return fmt::format("{:.{}g}", value, precision);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const std::vector<CsvRow>& rows, CsvSchema schema) {
  const auto& header = csv_header(schema);
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += csv_escape(cells[i]);
    }
    return s + '\n';
  };
  std::string out = line(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw InvalidArgument(fmt::format("CSV row has {} fields, schema expects {}", row.size(),
                                        header.size()));
    }
    out += line(row);
  }
  return out;
}

void emit_csv(const std::vector<CsvRow>& rows, CsvSchema schema, const std::string& path) {
  const std::string text = render_csv(rows, schema);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace macfcs::cli
