#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace macfcs::cli {

enum class CsvSchema { kEvaluate, kMinPower, kSweep, kRegion, kCfMinNoise };

// Column names, in order.
const std::vector<std::string>& csv_header(CsvSchema schema);

using CsvRow = std::vector<std::string>;

// Decimal text with `precision` significant digits; non-finite values are
// written as inf, -inf or nan.
std::string format_number(double value, int precision);

// Quotes a field when it holds a comma, quote or line break.
std::string csv_escape(std::string_view field);

std::string render_csv(const std::vector<CsvRow>& rows, CsvSchema schema);

// Throws InvalidArgument when a row has the wrong width, Error on I/O failure.
void emit_csv(const std::vector<CsvRow>& rows, CsvSchema schema, const std::string& path);

}  // namespace macfcs::cli
