#include <gtest/gtest.h>

#include <random>

#include "lhp4d/css.hpp"
#include "oracles.hpp"

using namespace lhp4d;

namespace {

const BinaryMatrix kRep3 = BinaryMatrix::from_dense({{1, 1, 0}, {0, 1, 1}});

// Minimum weight of a vector in ker(checks) outside rowspace(stabilizers), by
// enumerating every vector of {0,1}^n.
std::size_t brute_force_distance(const BinaryMatrix& checks, const BinaryMatrix& stabilizers) {
    const auto c = oracle::to_dense(checks);
    const auto s = oracle::to_dense(stabilizers);
    const std::size_t n = checks.cols();
    const std::size_t base = oracle::span_rank(s);
    std::size_t best = n + 1;
    for (const auto x : oracle::preimages(c, std::vector<int>(c.size(), 0), n)) {
        if (x == 0 || oracle::popcount(x) >= best) continue;
        auto with = s;
        std::vector<int> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = (x >> i) & 1U;
        with.push_back(row);
        if (oracle::span_rank(with) > base) best = oracle::popcount(x);
    }
    return best;
}

void expect_valid_logicals(const CssCode& code) {
    EXPECT_EQ(code.lx.rows(), code.k);
    EXPECT_EQ(code.lz.rows(), code.k);
    if (code.k == 0) return;
    EXPECT_TRUE(matmul(code.hz, code.lx.transpose()).is_zero());
    EXPECT_TRUE(matmul(code.hx, code.lz.transpose()).is_zero());
    EXPECT_EQ(matmul(code.lx, code.lz.transpose()), BinaryMatrix::identity(code.k));
}

}  // namespace

TEST(Hgp, RepetitionCodesGiveSurfaceCode) {
    const CssCode code = hgp(kRep3, kRep3);
    EXPECT_EQ(code.n, 13U);
    const auto hx = oracle::to_dense(code.hx), hz = oracle::to_dense(code.hz);
    EXPECT_EQ(code.k, 13U - oracle::span_rank(hx) - oracle::span_rank(hz));
    EXPECT_EQ(code.k, 1U);
    EXPECT_EQ(brute_force_distance(code.hz, code.hx), 3U);
    EXPECT_EQ(brute_force_distance(code.hx, code.hz), 3U);
    expect_valid_logicals(code);
}

TEST(Hgp, BlockLayoutMatchesKroneckerFormula) {
    const auto h1 = oracle::to_dense(kRep3);
    const auto h2 = oracle::to_dense(BinaryMatrix::from_dense({{1, 0, 1, 1}, {0, 1, 1, 0}, {1, 1, 0, 1}}));
    const CssCode code = hgp(kRep3, BinaryMatrix::from_dense(h2));
    auto eye = [](std::size_t n) {
        oracle::Dense d(n, std::vector<int>(n, 0));
        for (std::size_t i = 0; i < n; ++i) d[i][i] = 1;
        return d;
    };
    auto hcat = [](oracle::Dense a, const oracle::Dense& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i].insert(a[i].end(), b[i].begin(), b[i].end());
        return a;
    };
    const std::size_t m1 = 2, n1 = 3, m2 = 3, n2 = 4;
    EXPECT_EQ(oracle::to_dense(code.hz), hcat(oracle::kron(h1, eye(n2)), oracle::kron(eye(m1), oracle::transpose(h2))));
    EXPECT_EQ(oracle::to_dense(code.hx), hcat(oracle::kron(eye(n1), h2), oracle::kron(oracle::transpose(h1), eye(m2))));
    EXPECT_EQ(code.n, n1 * n2 + m1 * m2);
    EXPECT_EQ(code.sector_split, n1 * n2);
}

TEST(Hgp, ScalarSeedsGiveNoLogicals) {
    const CssCode code = hgp(BinaryMatrix::identity(1), BinaryMatrix::identity(1));
    EXPECT_EQ(code.n, 2U);
    EXPECT_EQ(code.k, 0U);
    EXPECT_EQ(code.lx.rows(), 0U);
    EXPECT_THROW(estimate_distance(code), std::invalid_argument);
}

TEST(Hgp, RandomSeedsSatisfyCssAndRankFormula) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const auto h1 = oracle::random_dense(1 + rng() % 4, 1 + rng() % 5, 0.5, rng);
        const auto h2 = oracle::random_dense(1 + rng() % 4, 1 + rng() % 5, 0.5, rng);
        const CssCode code = hgp(BinaryMatrix::from_dense(h1), BinaryMatrix::from_dense(h2));
        EXPECT_TRUE(matmul(code.hx, code.hz.transpose()).is_zero());
        const auto hx = oracle::to_dense(code.hx), hz = oracle::to_dense(code.hz);
        EXPECT_EQ(code.k, code.n - oracle::span_rank(hx) - oracle::span_rank(hz));
        expect_valid_logicals(code);
    }
}

TEST(Logicals, SurfaceCodeRepresentativesAreLogical) {
    const CssCode code = hgp(kRep3, kRep3);
    ASSERT_EQ(code.k, 1U);
    // lx is in ker(hz) and not a stabilizer.
    EXPECT_TRUE((code.hz * code.lx.row(0)).none());
    EXPECT_GT(rank(vstack(code.hx, code.lx)), rank(code.hx));
    EXPECT_GT(rank(vstack(code.hz, code.lz)), rank(code.hz));
}

TEST(Logicals, RejectsNonCssInput) {
    EXPECT_THROW(compute_logicals(BinaryMatrix::from_dense({{1, 0}}), BinaryMatrix::from_dense({{1, 0}})),
                 std::invalid_argument);
}

TEST(BiasTailorSwap, InvolutionAndDegenerateSplit) {
    const TailoredCode code = hgp(kRep3, kRep3);
    const TailoredCode once = bias_tailor_swap(code, 9);
    EXPECT_TRUE(once.is_rotated());
    EXPECT_EQ(once.rotated.weight(), 4U);
    const TailoredCode twice = bias_tailor_swap(once, 9);
    EXPECT_FALSE(twice.is_rotated());
    EXPECT_EQ(twice.stabilizer_x_part(), code.stabilizer_x_part());
    EXPECT_EQ(twice.stabilizer_z_part(), code.stabilizer_z_part());
    const TailoredCode noop = bias_tailor_swap(code, code.n());
    EXPECT_FALSE(noop.is_rotated());
    EXPECT_THROW(bias_tailor_swap(code, 0), std::invalid_argument);
    EXPECT_THROW(bias_tailor_swap(code, 14), std::invalid_argument);
}

TEST(BiasTailorSwap, RotatedSurfaceCodeIsAValidStabilizerCode) {
    const TailoredCode code = bias_tailor_swap(TailoredCode(hgp(kRep3, kRep3)));
    const auto sx = code.stabilizer_x_part(), sz = code.stabilizer_z_part();
    EXPECT_TRUE(symplectic_commute(sx, sz, sx, sz));
    // Generator count and rank are those of the CSS code, so k = 1.
    const BinaryMatrix symplectic = hstack(sx, sz);
    EXPECT_EQ(code.n() - rank(symplectic), 1U);
    // The rotated qubits carry the other Pauli type: columns [9, 13) of the
    // X part come from hz.
    const TailoredCode plain(hgp(kRep3, kRep3));
    for (std::size_t r = 0; r < plain.frame.hx.rows(); ++r) {
        for (std::size_t c = 0; c < 13; ++c) {
            EXPECT_EQ(sx.get(r, c), c < 9 ? plain.frame.hx.get(r, c) : false);
            EXPECT_EQ(sz.get(r, c), c < 9 ? false : plain.frame.hx.get(r, c));
        }
    }
    // Logical pairing survives the rotation.
    const auto lxp = code.logical_x_part(), lzp = code.logical_z_part();
    const auto pairing = matmul(lxp.row_slice(0, 1), lzp.row_slice(1, 2).transpose()) +
                         matmul(lzp.row_slice(0, 1), lxp.row_slice(1, 2).transpose());
    EXPECT_TRUE(pairing.get(0, 0));
}

TEST(BiasTailorSwap, RandomHgpCodesStayValidAtTheBlockBoundary) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 50; ++t) {
        const auto h1 = BinaryMatrix::from_dense(oracle::random_dense(1 + rng() % 3, 2 + rng() % 3, 0.6, rng));
        const auto h2 = BinaryMatrix::from_dense(oracle::random_dense(1 + rng() % 3, 2 + rng() % 3, 0.6, rng));
        const TailoredCode code(hgp(h1, h2));
        const TailoredCode r = bias_tailor_swap(code);
        EXPECT_EQ(r.n(), code.n());
        EXPECT_EQ(r.n() - rank(hstack(r.stabilizer_x_part(), r.stabilizer_z_part())), code.k());
    }
}

TEST(LiftedProduct, ScalarIdentitySeeds) {
    const auto one = Protograph::identity(1);
    const CssCode code = lifted_product(one, one, 3);
    EXPECT_EQ(code.n, 6U);
    EXPECT_EQ(code.hx.rows(), 3U);
    EXPECT_EQ(code.hz.rows(), 3U);
    EXPECT_EQ(code.k, 6U - oracle::span_rank(oracle::to_dense(code.hx)) - oracle::span_rank(oracle::to_dense(code.hz)));
}

TEST(LiftedProduct, TwoByThreeProtographAtThree) {
    const Protograph a = parse_protograph("λ(1,2) λ(0) λ(); λ() λ(0,1) λ(1)");
    const CssCode code = lifted_product(a, a, 3);
    EXPECT_EQ(code.n, (3U * 3U + 2U * 2U) * 3U);
    EXPECT_TRUE(matmul(code.hx, code.hz.transpose()).is_zero());
    EXPECT_EQ(code.k, code.n - rank(code.hx) - rank(code.hz));
    expect_valid_logicals(code);
}

TEST(LiftedProduct, AgreesWithHgpOfLiftsOnPermutationInvariants) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 40; ++t) {
        std::vector<RingElement> c1, c2;
        const std::size_t r1 = 1 + rng() % 2, k1 = 1 + rng() % 3, r2 = 1 + rng() % 2, k2 = 1 + rng() % 3;
        for (std::size_t i = 0; i < r1 * k1; ++i) c1.push_back(RingElement({static_cast<std::int64_t>(rng() % 5)}));
        for (std::size_t i = 0; i < r2 * k2; ++i) {
            c2.push_back(rng() % 3 == 0 ? RingElement() : RingElement({static_cast<std::int64_t>(rng() % 5)}));
        }
        const Protograph a1(r1, k1, c1), a2(r2, k2, c2);
        for (std::size_t l : {2, 3, 4}) {
            const CssCode lp = lifted_product(a1, a2, l);
            const CssCode h = hgp(lift(a1, l), lift(a2, l));
            // The binary HGP of the lifts is L times larger; the lifted product
            // keeps the blocklength linear in L.
            EXPECT_EQ(lp.n * l, h.n);
            EXPECT_TRUE(matmul(lp.hx, lp.hz.transpose()).is_zero());
            EXPECT_EQ(lp.k, lp.n - rank(lp.hx) - rank(lp.hz));
        }
    }
}

TEST(LiftedProduct, LiftSizeOneRejected) {
    EXPECT_THROW(lifted_product(Protograph::identity(1), Protograph::identity(1), 1), std::invalid_argument);
}

TEST(Distance, SurfaceCodeExhaustive) {
    const CssCode code = hgp(kRep3, kRep3);
    const auto est = estimate_distance(code, {.budget = 50, .seed = 3, .exhaustive_cap = 1e6});
    EXPECT_EQ(est.upper_bound, 3U);
    EXPECT_EQ(est.lower_hint, 3U);
    EXPECT_EQ(est.exhausted_weight, 2U);
}

TEST(Distance, BoundsBracketBruteForceOnSmallCodes) {
    std::mt19937_64 rng(44);
    int checked = 0;
    while (checked < 15) {
        const auto h1 = BinaryMatrix::from_dense(oracle::random_dense(1 + rng() % 2, 2 + rng() % 2, 0.6, rng));
        const auto h2 = BinaryMatrix::from_dense(oracle::random_dense(1 + rng() % 2, 2 + rng() % 2, 0.6, rng));
        const CssCode code = hgp(h1, h2);
        if (code.k == 0 || code.n > 18) continue;
        ++checked;
        const std::size_t d = std::min(brute_force_distance(code.hz, code.hx), brute_force_distance(code.hx, code.hz));
        const auto est = estimate_distance(code, {.budget = 20, .seed = 1, .exhaustive_cap = 1e5});
        EXPECT_LE(est.lower_hint, d);
        EXPECT_GE(est.upper_bound, d);
    }
}

TEST(Distance, UpperBoundNonIncreasingInBudget) {
    const Protograph a = parse_protograph("λ(1,2) λ(0) λ(); λ() λ(0,1) λ(1)");
    const CssCode code = lifted_product(a, a, 3);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t budget : {1, 4, 16, 64}) {
        const auto est = estimate_distance(code, {.budget = budget, .seed = 7, .exhaustive_cap = 0});
        EXPECT_LE(est.upper_bound, prev);
        prev = est.upper_bound;
    }
    EXPECT_THROW(estimate_distance(code, {.budget = 0}), std::invalid_argument);
}

TEST(CodeFile, RoundTrip) {
    const CssCode code = hgp(kRep3, kRep3);
    std::stringstream ss;
    write_code(ss, code);
    const CssCode back = read_code(ss);
    EXPECT_EQ(back.hx, code.hx);
    EXPECT_EQ(back.hz, code.hz);
    EXPECT_EQ(back.lx, code.lx);
    EXPECT_EQ(back.lz, code.lz);
    EXPECT_EQ(back.n, 13U);
    EXPECT_EQ(back.k, 1U);
    EXPECT_FALSE(back.mx.has_value());
    std::stringstream bad("lhp4d-code 1\nn 13\nk 2\n");
    EXPECT_THROW(read_code(bad), std::invalid_argument);
}
