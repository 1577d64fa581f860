#include "xlt/textpipe/tokenize.hpp"

#include <cctype>

namespace xlt::textpipe {

namespace {

bool is_space_byte(unsigned char c) { return c < 0x80 && std::isspace(c); }

bool is_word_byte(unsigned char c) {
  return c >= 0x80 || std::isalnum(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      flush();
      continue;
    }
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (c == '\'' && !current.empty() && i + 1 < text.size() &&
        is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      current.push_back('\'');
      continue;
    }
    // Standalone punctuation token.
    flush();
    out.emplace_back(1, static_cast<char>(c));
  }
  flush();
  return out;
}

}  // namespace xlt::textpipe
