#pragma once

// CSS codes and the 2D product constructions: hypergraph product, lifted
// product, Hadamard bias tailoring, logical operators and distance search.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf2.hpp"
#include "protograph.hpp"

namespace lhp4d {

struct LogicalBasis {
    BinaryMatrix lx;  // rows: logical X operators (in ker hz, outside rowspace hx)
    BinaryMatrix lz;  // rows: logical Z operators (in ker hx, outside rowspace hz)
};

struct CssCode {
    BinaryMatrix hx;  // X-type checks; detect Z components
    BinaryMatrix hz;  // Z-type checks; detect X components
    std::optional<BinaryMatrix> mx;  // metachecks on hx syndromes
    std::optional<BinaryMatrix> mz;  // metachecks on hz syndromes
    BinaryMatrix lx;
    BinaryMatrix lz;
    std::size_t n = 0;
    std::size_t k = 0;
    // First qubit of the second sector (the qubits a Hadamard rotation acts on).
    std::size_t sector_split = 0;

    bool has_metachecks() const { return mx.has_value() && mz.has_value(); }
};

namespace detail {

// Rows of `candidates` that are independent modulo rowspace(base), in order.
inline BinaryMatrix quotient_representatives(const BinaryMatrix& base, const BinaryMatrix& candidates) {
    Echelon e = row_reduce(base);
    std::vector<BitVector> reduced(e.rows.begin(), e.rows.begin() + static_cast<std::ptrdiff_t>(e.rank()));
    std::vector<std::size_t> pivots = e.pivot_cols;
    std::vector<BitVector> picked;
    for (std::size_t i = 0; i < candidates.rows(); ++i) {
        BitVector v = candidates.row(i);
        for (std::size_t r = 0; r < reduced.size(); ++r) {
            if (v.get(pivots[r])) v ^= reduced[r];
        }
        const std::size_t lead = v.find_next(0);
        if (lead == v.size()) continue;
        // Keep the basis fully reduced on the new pivot.
        for (auto& row : reduced) {
            if (row.get(lead)) row ^= v;
        }
        reduced.push_back(v);
        pivots.push_back(lead);
        picked.push_back(candidates.row(i));
    }
    return {candidates.cols(), std::move(picked)};
}

inline std::optional<BinaryMatrix> invert(const BinaryMatrix& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) return std::nullopt;
    std::vector<BitVector> aug;
    aug.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        BitVector row(2 * n);
        for (auto c : m.row(i).support()) row.set(c);
        row.set(n + i);
        aug.push_back(std::move(row));
    }
    Echelon e = row_reduce(std::move(aug), n);
    if (e.rank() != n) return std::nullopt;
    std::vector<BitVector> inv;
    inv.reserve(n);
    for (std::size_t i = 0; i < n; ++i) inv.push_back(e.rows[i].slice(n, 2 * n));
    return BinaryMatrix(n, std::move(inv));
}

}  // namespace detail

// Logical bases with lx * lz^T = I_k.
inline LogicalBasis compute_logicals(const BinaryMatrix& hx, const BinaryMatrix& hz) {
    if (hx.cols() != hz.cols()) throw std::invalid_argument("hx and hz act on different qubit counts");
    if (!matmul(hx, hz.transpose()).is_zero()) throw std::invalid_argument("hx * hz^T != 0: not a CSS code");
    BinaryMatrix lx = detail::quotient_representatives(hx, nullspace_basis(hz));
    BinaryMatrix lz = detail::quotient_representatives(hz, nullspace_basis(hx));
    if (lx.rows() != lz.rows()) throw std::logic_error("logical X and Z counts differ");
    if (lx.rows() == 0) return {BinaryMatrix(0, hx.cols()), BinaryMatrix(0, hx.cols())};
    const BinaryMatrix pairing = matmul(lx, lz.transpose());
    auto inv = detail::invert(pairing);
    if (!inv) throw std::logic_error("logical pairing is singular");
    // lx (P^{-T} lz)^T = lx lz^T P^{-1} = I
    return {lx, matmul(inv->transpose(), lz)};
}

inline std::size_t css_dimension(const BinaryMatrix& hx, const BinaryMatrix& hz) {
    return hx.cols() - rank(hx) - rank(hz);
}

inline CssCode make_css_code(BinaryMatrix hx, BinaryMatrix hz, std::optional<BinaryMatrix> mx = std::nullopt,
                             std::optional<BinaryMatrix> mz = std::nullopt, std::size_t sector_split = 0) {
    if (hx.cols() != hz.cols()) {
        throw std::invalid_argument("hx has " + std::to_string(hx.cols()) + " columns but hz has " +
                                    std::to_string(hz.cols()));
    }
    if (!matmul(hx, hz.transpose()).is_zero()) throw std::invalid_argument("hx * hz^T != 0: not a CSS code");
    if (mx && !matmul(*mx, hx).is_zero()) throw std::invalid_argument("mx * hx != 0");
    if (mz && !matmul(*mz, hz).is_zero()) throw std::invalid_argument("mz * hz != 0");
    CssCode code;
    code.n = hx.cols();
    auto logicals = compute_logicals(hx, hz);
    code.k = logicals.lx.rows();
    if (code.k != css_dimension(hx, hz)) throw std::logic_error("logical count disagrees with rank formula");
    code.lx = std::move(logicals.lx);
    code.lz = std::move(logicals.lz);
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    code.mx = std::move(mx);
    code.mz = std::move(mz);
    code.sector_split = sector_split;
    return code;
}

// H_Z = [H1 (x) I_n2 | I_m1 (x) H2^T],  H_X = [I_n1 (x) H2 | H1^T (x) I_m2].
inline CssCode hgp(const BinaryMatrix& h1, const BinaryMatrix& h2) {
    if (h1.empty() || h2.empty()) throw std::invalid_argument("hgp seeds must be non-empty");
    const std::size_t m1 = h1.rows(), n1 = h1.cols(), m2 = h2.rows(), n2 = h2.cols();
    BinaryMatrix hz = hstack(kron(h1, BinaryMatrix::identity(n2)), kron(BinaryMatrix::identity(m1), h2.transpose()));
    BinaryMatrix hx = hstack(kron(BinaryMatrix::identity(n1), h2), kron(h1.transpose(), BinaryMatrix::identity(m2)));
    return make_css_code(std::move(hx), std::move(hz), std::nullopt, std::nullopt, n1 * n2);
}

// Symbolic lifted-product check matrices, before lifting.
struct LiftedProductLayout {
    Protograph ax;
    Protograph az;
    std::size_t split_cells = 0;  // first block boundary, in protograph columns
};

inline LiftedProductLayout lifted_product_layout(const Protograph& a1, const Protograph& a2) {
    if (a1.empty() || a2.empty()) throw std::invalid_argument("lifted product seeds must be non-empty");
    const std::size_t m1 = a1.rows(), n1 = a1.cols(), m2 = a2.rows(), n2 = a2.cols();
    const Protograph z_blocks[] = {proto_kron(a1, Protograph::identity(n2)),
                                   proto_kron(Protograph::identity(m1), a2.transpose())};
    const Protograph x_blocks[] = {proto_kron(Protograph::identity(n1), a2),
                                   proto_kron(a1.transpose(), Protograph::identity(m2))};
    return {proto_hstack(x_blocks), proto_hstack(z_blocks), n1 * n2};
}

inline CssCode lifted_product(const Protograph& a1, const Protograph& a2, std::size_t lift_size) {
    if (lift_size < 2) throw std::invalid_argument("lifted product needs L >= 2");
    const auto layout = lifted_product_layout(a1, a2);
    BinaryMatrix hx = lift(layout.ax, lift_size);
    BinaryMatrix hz = lift(layout.az, lift_size);
    if (!matmul(hx, hz.transpose()).is_zero()) {
        throw std::logic_error("lifted product violates hx * hz^T = 0 (construction bug)");
    }
    return make_css_code(std::move(hx), std::move(hz), std::nullopt, std::nullopt, layout.split_cells * lift_size);
}

// A CSS code with Hadamard gates applied to a set of qubits. The stabilizer
// group is the CSS one with X and Z exchanged on the rotated qubits, so the
// generators are mixed-type. `frame` keeps the unrotated CSS matrices, which
// the decoders use.
struct TailoredCode {
    CssCode frame;
    BitVector rotated;

    TailoredCode() = default;
    TailoredCode(CssCode code) : frame(std::move(code)), rotated(frame.n) {}  // NOLINT: implicit by design of the API
    TailoredCode(CssCode code, BitVector mask) : frame(std::move(code)), rotated(std::move(mask)) {
        if (rotated.size() != frame.n) throw std::invalid_argument("rotation mask length != n");
    }

    std::size_t n() const { return frame.n; }
    std::size_t k() const { return frame.k; }
    bool is_rotated() const { return rotated.any(); }

    // Symplectic generator matrix [X part | Z part]; rows are hx's generators, then hz's.
    BinaryMatrix stabilizer_x_part() const { return part(frame.hx, frame.hz, true); }
    BinaryMatrix stabilizer_z_part() const { return part(frame.hx, frame.hz, false); }
    // Logical operators: lx rows then lz rows.
    BinaryMatrix logical_x_part() const { return part(frame.lx, frame.lz, true); }
    BinaryMatrix logical_z_part() const { return part(frame.lx, frame.lz, false); }

    bool operator==(const TailoredCode& other) const {
        return stabilizer_x_part() == other.stabilizer_x_part() && stabilizer_z_part() == other.stabilizer_z_part();
    }

private:
    // X-type rows keep X on unrotated qubits and become Z on rotated ones;
    // Z-type rows the other way round.
    BinaryMatrix part(const BinaryMatrix& x_type, const BinaryMatrix& z_type, bool want_x) const {
        std::vector<BitVector> rows;
        rows.reserve(x_type.rows() + z_type.rows());
        BitVector keep = rotated;
        for (auto& w : keep.words()) w = ~w;
        if (const std::size_t tail = keep.size() % kWordBits; tail != 0 && !keep.words().empty()) {
            keep.words().back() &= (Word{1} << tail) - 1;
        }
        for (std::size_t r = 0; r < x_type.rows(); ++r) rows.push_back(x_type.row(r) & (want_x ? keep : rotated));
        for (std::size_t r = 0; r < z_type.rows(); ++r) rows.push_back(z_type.row(r) & (want_x ? rotated : keep));
        return {frame.n, std::move(rows)};
    }
};

// Symplectic form: generators commute iff X Z^T + Z X^T = 0.
inline bool symplectic_commute(const BinaryMatrix& ax, const BinaryMatrix& az, const BinaryMatrix& bx,
                               const BinaryMatrix& bz) {
    return (matmul(ax, bz.transpose()) + matmul(az, bx.transpose())).is_zero();
}

// Hadamard on qubits [split, n): exchanges the X and Z parts of every
// generator on those columns. Applying it twice with the same split restores
// the input; split == n is the identity.
inline TailoredCode bias_tailor_swap(const TailoredCode& code, std::size_t split) {
    if (split == 0 || split > code.n()) {
        throw std::invalid_argument("swap split " + std::to_string(split) + " outside (0, " + std::to_string(code.n()) +
                                    "]");
    }
    BitVector mask = code.rotated;
    for (std::size_t q = split; q < code.n(); ++q) mask.flip(q);
    TailoredCode out(code.frame, std::move(mask));
    const auto sx = out.stabilizer_x_part();
    const auto sz = out.stabilizer_z_part();
    if (!symplectic_commute(sx, sz, sx, sz)) throw std::invalid_argument("rotated generators do not commute");
    const auto lxp = out.logical_x_part();
    const auto lzp = out.logical_z_part();
    if (!symplectic_commute(sx, sz, lxp, lzp)) throw std::invalid_argument("rotated logicals leave the normalizer");
    return out;
}

inline TailoredCode bias_tailor_swap(const TailoredCode& code) {
    const std::size_t split = code.frame.sector_split;
    if (split == 0) throw std::invalid_argument("code has no canonical sector split");
    return bias_tailor_swap(code, split);
}

struct DistanceEstimate {
    std::size_t lower_hint = 0;  // d >= lower_hint, established by exhaustive search
    std::size_t upper_bound = std::numeric_limits<std::size_t>::max();
    std::size_t exhausted_weight = 0;  // all errors of weight <= this were enumerated
};

struct DistanceOptions {
    std::size_t budget = 1000;  // random information-set restarts per sector
    std::uint64_t seed = 1;
    double exhaustive_cap = 2e7;  // max candidates enumerated per weight and sector
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Smallest w <= max_weight with a vector x of weight w, checks * x = 0 and
// logicals * x != 0. Columns are combined incrementally.
inline std::optional<std::size_t> exhaustive_min_logical(const BinaryMatrix& checks, const BinaryMatrix& logicals,
                                                         std::size_t weight) {
    const std::size_t n = checks.cols();
    std::vector<BitVector> cols;
    cols.reserve(n);
    const BinaryMatrix stacked = vstack(checks, logicals);
    const BinaryMatrix st = stacked.transpose();
    for (std::size_t c = 0; c < n; ++c) cols.push_back(st.row(c));
    const std::size_t m = checks.rows();
    std::vector<std::size_t> idx(weight);
    std::vector<BitVector> partial(weight + 1, BitVector(stacked.rows()));
    // depth-first enumeration of increasing index tuples
    std::size_t depth = 0;
    if (weight == 0 || weight > n) return std::nullopt;
    idx[0] = 0;
    while (true) {
        if (idx[depth] > n - (weight - depth)) {
            if (depth == 0) return std::nullopt;
            --depth;
            ++idx[depth];
            continue;
        }
        partial[depth + 1] = partial[depth] ^ cols[idx[depth]];
        if (depth + 1 == weight) {
            const BitVector& v = partial[weight];
            const std::size_t first = v.find_next(0);
            if (first >= m && first < v.size()) return weight;
            ++idx[depth];
        } else {
            ++depth;
            idx[depth] = idx[depth - 1] + 1;
        }
    }
}

// Random information sets: reduce a generator matrix of ker(checks) with a
// shuffled column order and inspect single rows and pairs of rows.
inline std::size_t random_min_logical(const BinaryMatrix& checks, const BinaryMatrix& logicals, std::size_t budget,
                                      std::mt19937_64& rng) {
    const BinaryMatrix kernel = nullspace_basis(checks);
    const std::size_t n = checks.cols();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> order(n);
    for (std::size_t trial = 0; trial < budget; ++trial) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const BinaryMatrix perm = kernel.permute_columns(order);
        const Echelon e = row_reduce(perm);
        std::vector<BitVector> rows(e.rows.begin(), e.rows.begin() + static_cast<std::ptrdiff_t>(e.rank()));
        auto consider = [&](const BitVector& pv) {
            const std::size_t w = pv.weight();
            if (w >= best) return;
            BitVector x(n);
            for (auto j : pv.support()) x.set(order[j]);
            if ((logicals * x).any()) best = w;
        };
        for (std::size_t i = 0; i < rows.size(); ++i) {
            consider(rows[i]);
            for (std::size_t j = i + 1; j < rows.size(); ++j) consider(rows[i] ^ rows[j]);
        }
    }
    return best;
}

}  // namespace detail

inline DistanceEstimate estimate_distance(const CssCode& code, const DistanceOptions& opts = {}) {
    if (code.k == 0) throw std::invalid_argument("distance is undefined for k = 0");
    if (opts.budget == 0) throw std::invalid_argument("distance search budget must be positive");
    DistanceEstimate est;
    // One stream per sector, so a larger budget extends the same sample.
    std::mt19937_64 rng_x(opts.seed);
    std::mt19937_64 rng_z(opts.seed ^ 0x9E3779B97F4A7C15ULL);
    est.upper_bound = std::min(detail::random_min_logical(code.hz, code.lz, opts.budget, rng_x),
                               detail::random_min_logical(code.hx, code.lx, opts.budget, rng_z));
    for (std::size_t w = 1; w < est.upper_bound; ++w) {
        if (detail::binomial(code.n, w) > opts.exhaustive_cap) break;
        const auto hit_x = detail::exhaustive_min_logical(code.hz, code.lz, w);
        const auto hit_z = detail::exhaustive_min_logical(code.hx, code.lx, w);
        if (hit_x || hit_z) {
            est.upper_bound = w;
            break;
        }
        est.exhausted_weight = w;
    }
    est.lower_hint = est.exhausted_weight + 1;
    if (est.lower_hint > est.upper_bound) est.lower_hint = est.upper_bound;
    return est;
}

// Code export: "key value" header lines followed by named matrix blocks.
inline void write_code(std::ostream& out, const CssCode& code) {
    out << "lhp4d-code 1\n";
    out << "n " << code.n << '\n';
    out << "k " << code.k << '\n';
    out << "sector_split " << code.sector_split << '\n';
    auto block = [&](const char* name, const BinaryMatrix* m) {
        out << "matrix " << name << ' ' << (m ? "present" : "absent") << '\n';
        if (m) write_matrix(out, *m);
    };
    block("hx", &code.hx);
    block("hz", &code.hz);
    block("mx", code.mx ? &*code.mx : nullptr);
    block("mz", code.mz ? &*code.mz : nullptr);
    block("lx", &code.lx);
    block("lz", &code.lz);
}

struct RawCodeFile {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t sector_split = 0;
    BinaryMatrix hx, hz, lx, lz;
    std::optional<BinaryMatrix> mx, mz;
};

inline RawCodeFile read_code_raw(std::istream& in) {
    RawCodeFile raw;
    std::string key;
    std::string value;
    if (!(in >> key >> value) || key != "lhp4d-code") throw std::invalid_argument("not a code file (missing header)");
    auto expect = [&](const char* name) {
        std::size_t v = 0;
        if (!(in >> key >> v) || key != name) throw std::invalid_argument(std::string("expected field '") + name + "'");
        return v;
    };
    raw.n = expect("n");
    raw.k = expect("k");
    raw.sector_split = expect("sector_split");
    auto block = [&](const char* name) -> std::optional<BinaryMatrix> {
        std::string tag;
        std::string label;
        std::string state;
        if (!(in >> tag >> label >> state) || tag != "matrix" || label != name) {
            throw std::invalid_argument(std::string("expected matrix block '") + name + "'");
        }
        in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
        if (state == "absent") return std::nullopt;
        if (state != "present") throw std::invalid_argument("bad matrix state '" + state + "'");
        return read_matrix(in);
    };
    auto required = [&](const char* name) {
        auto m = block(name);
        if (!m) throw std::invalid_argument(std::string("matrix '") + name + "' is required");
        return *m;
    };
    raw.hx = required("hx");
    raw.hz = required("hz");
    raw.mx = block("mx");
    raw.mz = block("mz");
    raw.lx = required("lx");
    raw.lz = required("lz");
    return raw;
}

// Reads and validates; stored logicals are kept when they pass the checks.
inline CssCode read_code(std::istream& in) {
    RawCodeFile raw = read_code_raw(in);
    CssCode code = make_css_code(raw.hx, raw.hz, raw.mx, raw.mz, raw.sector_split);
    if (code.n != raw.n || code.k != raw.k) {
        throw std::invalid_argument("stored (n, k) = (" + std::to_string(raw.n) + ", " + std::to_string(raw.k) +
                                    ") does not match matrices (" + std::to_string(code.n) + ", " +
                                    std::to_string(code.k) + ")");
    }
    if (raw.lx.rows() == code.k && raw.lz.rows() == code.k && raw.lx.cols() == code.n && raw.lz.cols() == code.n &&
        matmul(code.hz, raw.lx.transpose()).is_zero() && matmul(code.hx, raw.lz.transpose()).is_zero() &&
        rank(matmul(raw.lx, raw.lz.transpose())) == code.k) {
        code.lx = raw.lx;
        code.lz = raw.lz;
    }
    return code;
}

}  // namespace lhp4d
