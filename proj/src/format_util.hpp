#pragma once

#include <charconv>
#include <string>

namespace osp::detail {

// Shortest representation that parses back to the identical double;
// locale-independent by construction.
inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace osp::detail
