#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ksdw {

/// Calendar date without time zone.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

/// True when the date exists in the proleptic Gregorian calendar.
bool is_valid_date(int year, int month, int day);

/// Parses strict `YYYY-MM-DD`; nullopt on bad shape or invalid date.
std::optional<Date> parse_date(std::string_view text);

std::string to_string(const Date& d);

enum class DataType { Text, Number, Date };

std::string_view to_string(DataType t);
std::optional<DataType> parse_data_type(std::string_view text);

/// A typed scalar. monostate is SQL NULL.
using Value = std::variant<std::monostate, double, std::string, Date>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Type of a non-null value.
DataType type_of(const Value& v);

/// Display form: numbers without trailing zeros, dates ISO, NULL as "NULL".
std::string display(const Value& v);

/// Parses a numeric literal (integer or decimal, optional sign). Whole input must be consumed.
std::optional<double> parse_number(std::string_view text);

std::string format_number(double v);

}  // namespace ksdw
