#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the CSV readers and writers.
namespace fairaudit::csv {

// Shortest decimal that parses back to exactly `value`.
std::string FormatReal(double value);

// Splits on commas; no quoting (none of our formats need it).
std::vector<std::string_view> SplitRow(std::string_view line);

// Strict parsers; throw DataError tagged with `line`.
double ParseReal(std::string_view field, std::size_t line);
std::int64_t ParseInt(std::string_view field, std::size_t line);
// Accepts exactly "0" or "1".
int ParseBit(std::string_view field, std::size_t line);

}  // namespace fairaudit::csv
