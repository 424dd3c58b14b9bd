#pragma once

// Named seed presets and the plain-text seed file format.
//
// Seed file:
//   # comment
//   lift 3
//   seed A
//   λ(0) λ(2)
//   λ(1) λ(1)
//   seed B
//   ...
// Every seed block is a protograph in the usual text form. All four seeds
// A..D must appear exactly once; `lift` is required.

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chain4d.hpp"

namespace lhp4d {

struct PresetInfo {
    std::string name;
    std::string description;
};

inline const std::vector<PresetInfo>& list_presets() {
    static const std::vector<PresetInfo> presets = {
        {"paper-L3", "reference protograph, rows {1,3} x cols {1,2} as every seed, L = 3"},
        {"paper-L3-rows", "reference protograph, one row per seed (1 x 6 seeds), L = 3"},
        {"trivial-scalar", "binary seeds [1] for all four factors"},
    };
    return presets;
}

// Rows {1,3} and columns {1,2} of the reference protograph,
// [λ(0) λ(2); λ(1) λ(1)], used for all four seeds. The block is singular over
// the circulant ring, so every factor carries homology and k > 0.
inline SeedMapping paper_mapping() {
    SeedWindow w;
    w.rows = {1, 3};
    w.cols = {1, 2};
    return {w, w, w, w};
}

// Row f of the reference protograph becomes seed f. Each 1 x 6 seed has full
// row rank, so the code has k = 0; kept for comparison.
inline SeedMapping rows_mapping() {
    SeedMapping m;
    for (std::size_t f = 0; f < 4; ++f) m[f] = SeedWindow::range(f, f + 1, 0, 6);
    return m;
}

inline BinarySeeds trivial_scalar_seeds() {
    BinarySeeds s;
    for (auto& d : s.delta) d = BinaryMatrix::identity(1);
    return s;
}

inline ChainComplex4D build_preset(std::string_view name) {
    if (name == "paper-L3") {
        return build_complex(seeds_from_protograph(parse_protograph(kReferenceProtograph), paper_mapping(), 3));
    }
    if (name == "paper-L3-rows") {
        return build_complex(seeds_from_protograph(parse_protograph(kReferenceProtograph), rows_mapping(), 3));
    }
    if (name == "trivial-scalar") return build_complex(trivial_scalar_seeds());
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

class SeedFileError : public std::runtime_error {
public:
    SeedFileError(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

inline ProtographSeeds parse_seed_file(std::string_view text) {
    ProtographSeeds seeds;
    std::optional<std::size_t> lift_size;
    std::array<bool, 4> seen{};
    std::array<std::size_t, 4> block_line{};
    std::array<std::string, 4> block_text;
    int current = -1;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line.substr(0, line.find('#'));
        const auto first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            if (current >= 0) block_text[current] += '\n';
            continue;
        }
        std::istringstream words(trimmed);
        std::string head;
        words >> head;
        if (head == "lift") {
            long long v = -1;
            if (!(words >> v) || v < 1) throw SeedFileError("lift expects a positive integer", lineno, first + 1);
            lift_size = static_cast<std::size_t>(v);
            current = -1;
        } else if (head == "seed") {
            std::string name;
            words >> name;
            if (name.size() != 1 || name[0] < 'A' || name[0] > 'D') {
                throw SeedFileError("seed name must be one of A, B, C, D", lineno, first + 1);
            }
            current = name[0] - 'A';
            if (seen[current]) throw SeedFileError("seed " + name + " defined twice", lineno, first + 1);
            seen[current] = true;
            block_line[current] = lineno + 1;
        } else {
            if (current < 0) throw SeedFileError("protograph row outside a seed block", lineno, first + 1);
            block_text[current] += line + '\n';
        }
    }
    if (!lift_size) throw SeedFileError("missing 'lift' line", lineno, 1);
    for (std::size_t f = 0; f < 4; ++f) {
        if (!seen[f]) throw SeedFileError(std::string("missing seed ") + static_cast<char>('A' + f), lineno, 1);
        try {
            seeds.delta[f] = parse_protograph(block_text[f]);
        } catch (const ProtographParseError& e) {
            throw SeedFileError(std::string("seed ") + static_cast<char>('A' + f) + ": " + e.message(),
                                block_line[f] + e.line() - 1, e.column());
        }
        if (seeds.delta[f].rows() == 0) {
            throw SeedFileError(std::string("seed ") + static_cast<char>('A' + f) + " is empty", block_line[f], 1);
        }
    }
    seeds.lift_size = *lift_size;
    return seeds;
}

inline std::string write_seed_file(const ProtographSeeds& seeds) {
    std::string out = "lift " + std::to_string(seeds.lift_size) + "\n";
    for (std::size_t f = 0; f < 4; ++f) {
        out += std::string("seed ") + static_cast<char>('A' + f) + "\n" + render(seeds.delta[f]);
        if (out.back() != '\n') out += '\n';
    }
    return out;
}

}  // namespace lhp4d
