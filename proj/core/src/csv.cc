#include "fairaudit/csv.h"

#include <charconv>
#include <cmath>
#include <system_error>

#include "fairaudit/error.h"

namespace fairaudit::csv {

std::string FormatReal(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> SplitRow(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double ParseReal(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw DataError("expected a finite real, got '" + std::string(field) + "'",
                    line);
  }
  return value;
}

std::int64_t ParseInt(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError("expected an integer, got '" + std::string(field) + "'",
                    line);
  }
  return value;
}

int ParseBit(std::string_view field, std::size_t line) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError("expected 0 or 1, got '" + std::string(field) + "'", line);
}

}  // namespace fairaudit::csv
