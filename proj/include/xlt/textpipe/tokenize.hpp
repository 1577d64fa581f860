#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlt::textpipe {

// Lowercases (ASCII), splits on whitespace and detaches punctuation into
// standalone single-character tokens. Apostrophes between two word
// characters stay inside the token ("c'est"). Bytes >= 0x80 are treated as
// word characters, so multi-byte UTF-8 sequences survive untouched.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace xlt::textpipe
