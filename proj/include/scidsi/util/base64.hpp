#pragma once

#include <string>
#include <string_view>

namespace scidsi::util {

std::string base64_encode(std::string_view bytes);

/// Standard alphabet with padding. Throws ParseError on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace scidsi::util
