#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>

namespace selfsim::csv {

/// Shortest-faithful decimal form of x at 17 significant digits, via
/// std::to_chars: locale-independent ('.' decimal point no matter what the
/// process locale says), and byte-identical across runs, which is what makes
/// the emitted CSV reproducible.
inline std::string format(double x) {
    char buf[40];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace detail {

inline void cell(std::ostream& os, double v) { os << format(v); }
inline void cell(std::ostream& os, int v) { os << v; }
inline void cell(std::ostream& os, long v) { os << v; }
inline void cell(std::ostream& os, std::size_t v) { os << v; }
inline void cell(std::ostream& os, std::string_view v) { os << v; }
inline void cell(std::ostream& os, const char* v) { os << v; }

} // namespace detail

/// One comma-separated row, newline-terminated. Headers are written with the
/// same call; nothing else (no timestamps, no comments) goes into data files.
template <class T, class... Ts>
void row(std::ostream& os, const T& first, const Ts&... rest) {
    detail::cell(os, first);
    ((os << ',', detail::cell(os, rest)), ...);
    os << '\n';
}

} // namespace selfsim::csv
