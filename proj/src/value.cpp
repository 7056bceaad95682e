#include "ksdw/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace ksdw {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

bool is_valid_date(int year, int month, int day) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
  int limit = kDays[month - 1];
  if (month == 2 && is_leap(year)) limit = 29;
  return day <= limit;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](size_t pos, size_t len) -> std::optional<int> {
    int out = 0;
    auto sv = text.substr(pos, len);
    for (char c : sv)
      if (c < '0' || c > '9') return std::nullopt;
    std::from_chars(sv.data(), sv.data() + sv.size(), out);
    return out;
  };
  auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
  if (!y || !m || !d || !is_valid_date(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::Text: return "text";
    case DataType::Number: return "number";
    case DataType::Date: return "date";
  }
  return "text";
}

std::optional<DataType> parse_data_type(std::string_view text) {
  if (text == "text") return DataType::Text;
  if (text == "number") return DataType::Number;
  if (text == "date") return DataType::Date;
  return std::nullopt;
}

DataType type_of(const Value& v) {
  if (std::holds_alternative<double>(v)) return DataType::Number;
  if (std::holds_alternative<Date>(v)) return DataType::Date;
  return DataType::Text;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string_view body = text;
  if (body.front() == '+') body.remove_prefix(1);
  if (body.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan" and hex-free exponents; restrict to plain decimals.
  bool digit = false;
  for (size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c >= '0' && c <= '9') digit = true;
    else if (c == '.' || (c == '-' && i == 0)) continue;
    else return std::nullopt;
  }
  if (!digit) return std::nullopt;
  double out = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
  return out;
}

std::string format_number(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string display(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "NULL";
        else if constexpr (std::is_same_v<T, double>) return format_number(x);
        else if constexpr (std::is_same_v<T, std::string>) return x;
        else return to_string(x);
      },
      v);
}

}  // namespace ksdw
