#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kblrn {

std::vector<std::string_view> split(std::string_view line, char sep);

// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
// Strict parse of the full token; nullopt-free variant throws std::invalid_argument.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

// Iterates lines of `text`, stripping a trailing '\r'. Calls fn(line, 1-based number).
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t number = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line, ++number);
    }
}

}  // namespace kblrn
