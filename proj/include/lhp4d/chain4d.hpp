#pragma once

// Length-4 chain complex from four classical seeds and the 4D lifted product
// code it defines:
//
//   C_-2 --d_-2--> C_-1 --d_-1--> C_0 --d_0--> C_1 --d_1--> C_2
//
// Every space is a direct sum of tensor nodes C_A^i (x) C_B^j (x) C_C^k (x) C_D^l
// grouped by total degree i+j+k+l, where C^0 is a seed's bit space and C^1 its
// check space. The map between adjacent nodes that differ in one factor applies
// that factor's seed and identities everywhere else.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "css.hpp"
#include "gf2.hpp"
#include "protograph.hpp"

namespace lhp4d {

using Node = std::array<int, 4>;

// Node order within each degree; blocks of the boundary maps follow it.
inline const std::array<std::vector<Node>, 5>& chain_layers() {
    static const std::array<std::vector<Node>, 5> layers = {{
        {{0, 0, 0, 0}},
        {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}},
        {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}},
        {{1, 1, 1, 0}, {1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}},
        {{1, 1, 1, 1}},
    }};
    return layers;
}

template <class M>
struct MatrixOps;

template <>
struct MatrixOps<BinaryMatrix> {
    static BinaryMatrix identity(std::size_t n) { return BinaryMatrix::identity(n); }
    static BinaryMatrix zeros(std::size_t r, std::size_t c) { return {r, c}; }
    static BinaryMatrix kron(const BinaryMatrix& a, const BinaryMatrix& b) { return lhp4d::kron(a, b); }
    static BinaryMatrix hstack(std::span<const BinaryMatrix> b) { return lhp4d::hstack(b); }
    static BinaryMatrix vstack(std::span<const BinaryMatrix> b) { return lhp4d::vstack(b); }
    static BinaryMatrix to_binary(const BinaryMatrix& m, std::size_t) { return m; }
    static std::size_t scale(std::size_t) { return 1; }
};

template <>
struct MatrixOps<Protograph> {
    static Protograph identity(std::size_t n) { return Protograph::identity(n); }
    static Protograph zeros(std::size_t r, std::size_t c) { return {r, c}; }
    static Protograph kron(const Protograph& a, const Protograph& b) { return proto_kron(a, b); }
    static Protograph hstack(std::span<const Protograph> b) { return proto_hstack(b); }
    static Protograph vstack(std::span<const Protograph> b) { return proto_vstack(b); }
    static BinaryMatrix to_binary(const Protograph& p, std::size_t lift_size) { return lift(p, lift_size); }
    static std::size_t scale(std::size_t lift_size) { return lift_size; }
};

// Four seeds delta_A..delta_D, each a (checks x bits) matrix. For protograph
// seeds `lift_size` is the circulant size; binary seeds ignore it.
template <class M>
struct FourSeeds {
    std::array<M, 4> delta;
    std::size_t lift_size = 1;

    std::size_t bit_dim(std::size_t factor) const { return delta[factor].cols(); }
    std::size_t check_dim(std::size_t factor) const { return delta[factor].rows(); }

    // Dimension of a tensor node in seed units (cells for protographs).
    std::size_t node_dim(const Node& node) const {
        std::size_t d = 1;
        for (std::size_t f = 0; f < 4; ++f) d *= node[f] ? check_dim(f) : bit_dim(f);
        return d;
    }

    void validate() const {
        for (std::size_t f = 0; f < 4; ++f) {
            if (delta[f].empty()) {
                throw std::invalid_argument(std::string("seed delta_") + static_cast<char>('A' + f) + " is empty");
            }
        }
        if (lift_size == 0) throw std::invalid_argument("lift size must be at least 1");
    }
};

using BinarySeeds = FourSeeds<BinaryMatrix>;
using ProtographSeeds = FourSeeds<Protograph>;

// The map node -> node + e_factor: delta_factor on its own tensor slot and
// identities of the node's local dimension on the other three.
template <class M>
M expand_seed(const FourSeeds<M>& seeds, std::size_t factor, const Node& source) {
    if (factor > 3) throw std::out_of_range("seed factor index must be 0..3");
    if (source[factor] != 0) {
        throw std::invalid_argument(std::string("delta_") + static_cast<char>('A' + factor) +
                                    " cannot act on a node whose factor is already a check space");
    }
    using Ops = MatrixOps<M>;
    std::optional<M> out;
    for (std::size_t f = 0; f < 4; ++f) {
        M piece = f == factor ? seeds.delta[f] : Ops::identity(source[f] ? seeds.check_dim(f) : seeds.bit_dim(f));
        out = out ? Ops::kron(*out, piece) : std::move(piece);
    }
    return *out;
}

// The four expanded seeds acting on the bottom node (all bit spaces).
template <class M>
std::array<M, 4> expand_seeds(const FourSeeds<M>& seeds) {
    seeds.validate();
    const Node bottom{0, 0, 0, 0};
    return {expand_seed(seeds, 0, bottom), expand_seed(seeds, 1, bottom), expand_seed(seeds, 2, bottom),
            expand_seed(seeds, 3, bottom)};
}

// Block label grid of a boundary map: 'A'..'D' for the acting seed, '0' for a zero block.
using BlockLabels = std::vector<std::string>;

struct ChainComplex4D {
    BinaryMatrix delta_m2;  // C_-2 -> C_-1
    BinaryMatrix delta_m1;  // C_-1 -> C_0
    BinaryMatrix delta_0;   // C_0 -> C_1
    BinaryMatrix delta_1;   // C_1 -> C_2
    std::array<std::size_t, 5> space_dims{};
    std::array<std::vector<std::size_t>, 5> node_dims;  // lifted size of every tensor node, per layer
    std::array<BlockLabels, 4> labels;                  // per map, rows = target nodes

    // Qubit column where the second half of the degree-2 blocks begins.
    std::size_t qubit_split() const {
        return node_dims[2][0] + node_dims[2][1] + node_dims[2][2];
    }
};

namespace detail {

template <class M>
std::pair<M, BlockLabels> assemble_map(const FourSeeds<M>& seeds, std::size_t from_layer) {
    using Ops = MatrixOps<M>;
    const auto& src = chain_layers()[from_layer];
    const auto& dst = chain_layers()[from_layer + 1];
    std::vector<M> block_rows;
    BlockLabels labels;
    for (const auto& t : dst) {
        std::vector<M> row;
        std::string label;
        for (const auto& s : src) {
            int diff = 0;
            std::size_t factor = 0;
            for (std::size_t f = 0; f < 4; ++f) {
                if (t[f] != s[f]) {
                    ++diff;
                    factor = f;
                }
            }
            if (diff == 1 && t[factor] == 1) {
                M block = expand_seed(seeds, factor, s);
                if (block.rows() != seeds.node_dim(t) || block.cols() != seeds.node_dim(s)) {
                    throw std::logic_error("expanded seed shape does not match its block position");
                }
                row.push_back(std::move(block));
                label += static_cast<char>('A' + factor);
            } else {
                row.push_back(Ops::zeros(seeds.node_dim(t), seeds.node_dim(s)));
                label += '0';
            }
        }
        block_rows.push_back(Ops::hstack(row));
        labels.push_back(std::move(label));
    }
    return {Ops::vstack(block_rows), std::move(labels)};
}

}  // namespace detail

class ChainConditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct CompositeReport {
    std::string name;
    bool zero = true;
    std::size_t max_entry = 0;
    std::size_t first_row = 0;
    std::size_t first_col = 0;
};

struct ChainReport {
    std::array<CompositeReport, 3> composites;
    std::array<std::size_t, 5> space_dims{};
    std::size_t rank_hx = 0;
    std::size_t rank_hz = 0;
    std::size_t rank_mx = 0;
    std::size_t rank_mz = 0;
    std::size_t n = 0;
    std::size_t k = 0;

    bool valid() const {
        return composites[0].zero && composites[1].zero && composites[2].zero;
    }
};

inline CompositeReport check_composite(const std::string& name, const BinaryMatrix& later, const BinaryMatrix& earlier) {
    CompositeReport r;
    r.name = name;
    if (later.cols() != earlier.rows()) {
        r.zero = false;
        r.max_entry = 1;
        return r;
    }
    const BinaryMatrix prod = matmul(later, earlier);
    for (std::size_t i = 0; i < prod.rows(); ++i) {
        const std::size_t c = prod.row(i).find_next(0);
        if (c < prod.cols()) {
            r.zero = false;
            r.max_entry = 1;
            r.first_row = i;
            r.first_col = c;
            break;
        }
    }
    return r;
}

inline ChainReport validate_chain(const ChainComplex4D& cc) {
    ChainReport rep;
    rep.composites = {check_composite("d_-1 d_-2", cc.delta_m1, cc.delta_m2),
                      check_composite("d_0 d_-1", cc.delta_0, cc.delta_m1),
                      check_composite("d_1 d_0", cc.delta_1, cc.delta_0)};
    rep.space_dims = cc.space_dims;
    rep.rank_hx = rank(cc.delta_0);
    rep.rank_hz = rank(cc.delta_m1);
    rep.rank_mx = rank(cc.delta_1);
    rep.rank_mz = rank(cc.delta_m2);
    rep.n = cc.delta_0.cols();
    rep.k = rep.n - rep.rank_hx - rep.rank_hz;
    return rep;
}

inline std::string describe(const ChainReport& rep) {
    std::ostringstream os;
    os << "spaces C_-2..C_2: " << rep.space_dims[0] << ' ' << rep.space_dims[1] << ' ' << rep.space_dims[2] << ' '
       << rep.space_dims[3] << ' ' << rep.space_dims[4] << '\n';
    for (const auto& c : rep.composites) {
        os << c.name << ": max entry " << c.max_entry;
        if (!c.zero) os << " (first nonzero at " << c.first_row << "," << c.first_col << ")";
        os << '\n';
    }
    os << "rank hx " << rep.rank_hx << ", rank hz " << rep.rank_hz << ", rank mx " << rep.rank_mx << ", rank mz "
       << rep.rank_mz << '\n';
    os << "n " << rep.n << ", k " << rep.k << '\n';
    return os.str();
}

template <class M>
ChainComplex4D build_complex(const FourSeeds<M>& seeds) {
    seeds.validate();
    using Ops = MatrixOps<M>;
    ChainComplex4D cc;
    for (std::size_t layer = 0; layer < 5; ++layer) {
        std::size_t total = 0;
        for (const auto& node : chain_layers()[layer]) {
            const std::size_t d = seeds.node_dim(node) * Ops::scale(seeds.lift_size);
            cc.node_dims[layer].push_back(d);
            total += d;
        }
        cc.space_dims[layer] = total;
    }
    BinaryMatrix* maps[] = {&cc.delta_m2, &cc.delta_m1, &cc.delta_0, &cc.delta_1};
    for (std::size_t i = 0; i < 4; ++i) {
        auto [symbolic, labels] = detail::assemble_map(seeds, i);
        *maps[i] = Ops::to_binary(symbolic, seeds.lift_size);
        cc.labels[i] = std::move(labels);
    }
    const ChainReport rep = validate_chain(cc);
    for (const auto& c : rep.composites) {
        if (!c.zero) {
            throw ChainConditionError("chain condition " + c.name + " violated at (" + std::to_string(c.first_row) +
                                      "," + std::to_string(c.first_col) + ")");
        }
    }
    return cc;
}

// hx = d_0, hz = d_-1^T, mx = d_1, mz = d_-2^T.
inline CssCode to_css(const ChainComplex4D& cc) {
    return make_css_code(cc.delta_0, cc.delta_m1.transpose(), cc.delta_1, cc.delta_m2.transpose(), cc.qubit_split());
}

// Hadamard rotation on the second half of the qubit blocks. Metachecks act on
// generator rows, which the rotation leaves in place, so mx * hx = 0 and
// mz * hz = 0 continue to hold in the CSS frame.
inline TailoredCode hadamard_rotate(const TailoredCode& code) {
    if (!code.frame.has_metachecks()) throw std::invalid_argument("hadamard_rotate expects a 4D code with metachecks");
    TailoredCode out = bias_tailor_swap(code, code.frame.sector_split);
    if (!matmul(*out.frame.mx, out.frame.hx).is_zero() || !matmul(*out.frame.mz, out.frame.hz).is_zero()) {
        throw std::logic_error("metacheck condition lost under rotation");
    }
    return out;
}

// Label-level picture of the symplectic generator matrix [H_X | H_Z] (rows of
// d_0 beside rows of d_-1^T, as in the block display), and of its rotation
// [H_X1 H_Z2 | H_Z1 H_X2].
struct BlockPicture {
    BlockLabels x_part;
    BlockLabels z_part;
};

inline BlockPicture block_picture(const ChainComplex4D& cc, bool rotated) {
    const BlockLabels& hx = cc.labels[2];  // 4 x 6, rows C_1 nodes
    const BlockLabels& d = cc.labels[1];   // 6 x 4, rows C_0 nodes
    BlockLabels hz(4, std::string(6, '0'));
    for (std::size_t q = 0; q < 6; ++q) {
        for (std::size_t s = 0; s < 4; ++s) hz[s][q] = d[q][s];
    }
    BlockPicture pic{hx, hz};
    if (rotated) {
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t q = 3; q < 6; ++q) std::swap(pic.x_part[r][q], pic.z_part[r][q]);
        }
    }
    return pic;
}

// Seed presets --------------------------------------------------------------

// Protograph used for the reference 4D code, one row per line.
inline constexpr const char* kReferenceProtograph =
    "\xCE\xBB(2) \xCE\xBB() \xCE\xBB(0) \xCE\xBB(0) \xCE\xBB() \xCE\xBB(2)\n"
    "\xCE\xBB() \xCE\xBB(0) \xCE\xBB(2) \xCE\xBB() \xCE\xBB(2) \xCE\xBB(0)\n"
    "\xCE\xBB(0) \xCE\xBB(1) \xCE\xBB() \xCE\xBB(1) \xCE\xBB(0) \xCE\xBB(2)\n"
    "\xCE\xBB(0) \xCE\xBB(1) \xCE\xBB(1) \xCE\xBB(1) \xCE\xBB(1) \xCE\xBB()\n";

// A seed carved out of a larger protograph: the listed rows and columns, in
// the listed order, optionally transposed.
struct SeedWindow {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    bool transposed = false;

    // Contiguous rows [r0, r1) and columns [c0, c1).
    static SeedWindow range(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1, bool transposed = false) {
        SeedWindow w;
        for (std::size_t r = r0; r < r1; ++r) w.rows.push_back(r);
        for (std::size_t c = c0; c < c1; ++c) w.cols.push_back(c);
        w.transposed = transposed;
        return w;
    }

    Protograph apply(const Protograph& p) const {
        if (rows.empty() || cols.empty()) throw std::invalid_argument("seed window selects no cells");
        std::vector<std::vector<RingElement>> cells;
        for (auto r : rows) {
            if (r >= p.rows()) throw std::out_of_range("seed window row " + std::to_string(r) + " outside protograph");
            auto& row = cells.emplace_back();
            for (auto c : cols) {
                if (c >= p.cols()) throw std::out_of_range("seed window column " + std::to_string(c) + " outside protograph");
                row.push_back(p.at(r, c));
            }
        }
        Protograph s = Protograph::from_rows(cells);
        return transposed ? s.transpose() : s;
    }
};

using SeedMapping = std::array<SeedWindow, 4>;

inline ProtographSeeds seeds_from_protograph(const Protograph& p, const SeedMapping& mapping, std::size_t lift_size) {
    ProtographSeeds seeds;
    for (std::size_t f = 0; f < 4; ++f) seeds.delta[f] = mapping[f].apply(p);
    seeds.lift_size = lift_size;
    return seeds;
}

}  // namespace lhp4d
