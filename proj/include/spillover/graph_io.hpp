#pragma once

// Edge-list text format:
//   first line:        vertex count N
//   following lines:   two whitespace-separated vertex indices
// Blank lines and lines starting with '#' are skipped. Duplicate and reversed
// pairs are collapsed.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"

namespace spillover {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <class Int>
bool parse_integer(std::string_view token, Int& out) {
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace detail

inline Graph read_edge_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n = 0;
    bool have_n = false;
    std::vector<std::pair<Vertex, Vertex>> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto tokens = detail::split_ws(body);
        if (!have_n) {
            if (tokens.size() != 1 || !detail::parse_integer(tokens[0], n)) {
                throw ParseError(line_no, "expected vertex count, got '" + std::string(body) + "'");
            }
            have_n = true;
            continue;
        }
        std::uint64_t a = 0;
        std::uint64_t b = 0;
        if (tokens.size() != 2 || !detail::parse_integer(tokens[0], a) || !detail::parse_integer(tokens[1], b)) {
            throw ParseError(line_no, "expected two vertex indices, got '" + std::string(body) + "'");
        }
        if (a >= n || b >= n) {
            throw Error(Errc::OutOfRangeVertex, "line " + std::to_string(line_no) + ": vertex index >= " +
                                                    std::to_string(n));
        }
        pairs.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
    }
    if (!have_n) throw ParseError(line_no, "missing vertex count");
    return Graph(n, pairs);
}

inline Graph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return read_edge_list(in);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    out << g.vertex_count() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline void write_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    write_edge_list(g, out);
    if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace spillover
