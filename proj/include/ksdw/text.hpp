#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ksdw {

/// Lower-cases and folds Latin diacritics ("Zürich" -> "zurich", "Straße" -> "strasse").
/// Bytes outside the folded ranges pass through unchanged.
std::string fold(std::string_view text);

/// Folded label phrase: fold() with runs of whitespace collapsed to one space, trimmed.
std::string normalize_phrase(std::string_view text);

/// Splits folded text into alphanumeric tokens. Non-ASCII code points that survive
/// folding count as token characters.
std::vector<std::string> text_tokens(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// ASCII case-insensitive equality (SQL identifiers).
bool iequals(std::string_view a, std::string_view b);

std::string to_lower_ascii(std::string_view s);

std::string trim(std::string_view s);

}  // namespace ksdw
