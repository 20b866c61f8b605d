#pragma once

// Observed-data ingestion for single-dataset tests.
//
// Treatment/outcome CSV: header `id,z,y`, one row per vertex. `id` is matched
// against the vertex labels of the edge list (the decimal indices 0..N-1) via
// a string lookup table, so rows may come in any order. `z` must be 0 or 1.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph_io.hpp"
#include "spillover/outcomes.hpp"

namespace spillover {

struct ObservedData {
    TreatmentAssignment z;
    OutcomeVector y;
};

/// Label -> vertex index table for a graph whose labels are its indices.
inline std::unordered_map<std::string, Vertex> index_labels(std::size_t n) {
    std::unordered_map<std::string, Vertex> table;
    table.reserve(n);
    for (Vertex v = 0; v < n; ++v) table.emplace(std::to_string(v), v);
    return table;
}

inline ObservedData read_treatment_outcomes(std::istream& in, const std::unordered_map<std::string, Vertex>& labels) {
    const std::size_t n = labels.size();
    ObservedData out;
    out.z.z.assign(n, 0);
    out.y.assign(n, 0.0);
    std::vector<bool> seen(n, false);
    std::size_t rows = 0;

    std::string line;
    std::size_t line_no = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            fields.push_back(detail::trim(body.substr(start, comma == std::string_view::npos ? comma : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!header_done) {
            if (fields.size() != 3 || fields[0] != "id" || fields[1] != "z" || fields[2] != "y") {
                throw ParseError(line_no, "expected header 'id,z,y'");
            }
            header_done = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
        const auto it = labels.find(std::string(fields[0]));
        if (it == labels.end()) throw ParseError(line_no, "unknown id '" + std::string(fields[0]) + "'");
        const Vertex v = it->second;
        if (seen[v]) throw ParseError(line_no, "duplicate id '" + std::string(fields[0]) + "'");
        if (fields[1] != "0" && fields[1] != "1") {
            throw ParseError(line_no, "treatment must be 0 or 1, got '" + std::string(fields[1]) + "'");
        }
        double y = 0.0;
        try {
            std::size_t used = 0;
            const std::string text(fields[2]);
            y = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(line_no, "outcome is not a number: '" + std::string(fields[2]) + "'");
        }
        if (!std::isfinite(y)) throw ParseError(line_no, "outcome must be finite");
        seen[v] = true;
        out.z.z[v] = fields[1] == "1" ? 1 : 0;
        out.y[v] = y;
        ++rows;
    }
    if (!header_done) throw ParseError(line_no, "missing header 'id,z,y'");
    if (rows != n) {
        throw Error(Errc::LengthMismatch, std::to_string(rows) + " rows for a graph with " + std::to_string(n) +
                                              " vertices");
    }
    return out;
}

inline ObservedData read_treatment_outcomes(const std::filesystem::path& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return read_treatment_outcomes(in, index_labels(n));
}

inline void write_treatment_outcomes(const TreatmentAssignment& z, std::span<const double> y, std::ostream& out) {
    if (z.size() != y.size()) throw Error(Errc::LengthMismatch, "z and y lengths differ");
    out << "id,z,y\n";
    out.precision(17);
    for (std::size_t i = 0; i < y.size(); ++i) out << i << ',' << int(z.z[i]) << ',' << y[i] << '\n';
}

}  // namespace spillover
