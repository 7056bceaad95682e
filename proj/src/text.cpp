#include "ksdw/text.hpp"

#include <array>
#include <cstdint>

namespace ksdw {

namespace {

// Folding of U+00C0..U+017F to ASCII, lower case. Empty entries keep the code point.
constexpr std::array<const char*, 64> kLatin1 = {
    "a", "a", "a", "a", "a", "a", "ae", "c",  // C0-C7
    "e", "e", "e", "e", "i", "i", "i", "i",   // C8-CF
    "d", "n", "o", "o", "o", "o", "o", "",    // D0-D7 (D7 multiplication sign)
    "o", "u", "u", "u", "u", "y", "th", "ss", // D8-DF
};

const char* fold_code_point(uint32_t cp) {
  if (cp >= 0xC0 && cp <= 0xDF) return kLatin1[cp - 0xC0];
  if (cp >= 0xE0 && cp <= 0xFF) {
    if (cp == 0xF7) return "";
    if (cp == 0xFF) return "y";
    return kLatin1[cp - 0xE0];
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    // Latin Extended-A: pairs of upper/lower case letters.
    static constexpr char kExtA[] =
        "aaaaaa" "cccccccc" "dddd" "eeeeeeeeee" "gggggggg" "hhhh" "iiiiiiiiii" "jjjj" "kkk"
        "llllllllll" "nnnnnnnnn" "oooooo" "oo" "rrrrrr" "ssssssss" "tttttt" "uuuuuuuuuuuu"
        "ww" "yyy" "zzzzzz" "s";
    static_assert(sizeof(kExtA) == 129);
    size_t i = cp - 0x100;
    static std::array<std::string, 128> cache = [] {
      std::array<std::string, 128> out{};
      for (size_t k = 0; k < 128; ++k) out[k] = std::string(1, kExtA[k]);
      out[0x132 - 0x100] = "ij";
      out[0x133 - 0x100] = "ij";
      out[0x152 - 0x100] = "oe";
      out[0x153 - 0x100] = "oe";
      return out;
    }();
    return cache[i].c_str();
  }
  return nullptr;
}

// Decodes one UTF-8 sequence at s[i]; returns length consumed (1 on invalid bytes).
size_t decode(std::string_view s, size_t i, uint32_t& cp) {
  auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  size_t len = (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + len > s.size()) {
    cp = b0;
    return 1;
  }
  cp = b0 & (0x7F >> len);
  for (size_t k = 1; k < len; ++k) {
    auto b = static_cast<unsigned char>(s[i + k]);
    if ((b >> 6) != 0x2) {
      cp = b0;
      return 1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size();) {
    uint32_t cp = 0;
    size_t len = decode(text, i, cp);
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (const char* f = fold_code_point(cp); f && *f) {
      out += f;
    } else {
      out.append(text.substr(i, len));
    }
    i += len;
  }
  return out;
}

std::string normalize_phrase(std::string_view text) {
  std::string folded = fold(text);
  std::string out;
  bool pending_space = false;
  for (char c : folded) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> text_tokens(std::string_view text) {
  std::string folded = fold(text);
  std::vector<std::string> out;
  std::string cur;
  for (char c : folded) {
    if (is_ascii_alnum(c) || (static_cast<unsigned char>(c) & 0x80)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace ksdw
