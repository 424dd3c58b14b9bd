#include <gtest/gtest.h>

#include <random>

#include "lhp4d/chain4d.hpp"
#include "lhp4d/protograph.hpp"
#include "oracles.hpp"

using namespace lhp4d;

namespace {

RingElement random_element(std::mt19937_64& rng, int max_terms = 4, int range = 9) {
    std::vector<std::int64_t> s;
    const int terms = static_cast<int>(rng() % (max_terms + 1));
    for (int i = 0; i < terms; ++i) s.push_back(static_cast<std::int64_t>(rng() % (2 * range + 1)) - range);
    return RingElement(s);
}

Protograph random_protograph(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::vector<RingElement> cells;
    for (std::size_t i = 0; i < r * c; ++i) cells.push_back(random_element(rng));
    return {r, c, cells};
}

// Dense circulant oracle: entry (t, (t + a) mod L) for every shift a.
oracle::Dense circulant(const std::vector<std::int64_t>& shifts, std::size_t l) {
    oracle::Dense d(l, std::vector<int>(l, 0));
    for (auto a : shifts) {
        const auto s = static_cast<std::size_t>(((a % static_cast<std::int64_t>(l)) + static_cast<std::int64_t>(l)) %
                                                static_cast<std::int64_t>(l));
        for (std::size_t t = 0; t < l; ++t) d[t][(t + s) % l] ^= 1;
    }
    return d;
}

oracle::Dense add(const oracle::Dense& a, const oracle::Dense& b) {
    oracle::Dense c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] ^= b[i][j];
    }
    return c;
}

}  // namespace

TEST(RingElement, AdditionExamples) {
    EXPECT_EQ(RingElement{1} + RingElement{2}, (RingElement{1, 2}));
    EXPECT_TRUE((RingElement{1} + RingElement{1}).is_zero());
    EXPECT_EQ(RingElement::zero() + RingElement{0}, RingElement{0});
}

TEST(RingElement, MultiplicationExamples) {
    EXPECT_EQ(RingElement{1} * RingElement{2}, RingElement{3});
    EXPECT_EQ(RingElement{0} * RingElement({4, 7}), RingElement({4, 7}));
    EXPECT_EQ(RingElement({1, 2}) * RingElement({1, 2}), RingElement({2, 4}));
}

TEST(RingElement, CanonicalFormCollapsesDuplicates) {
    EXPECT_TRUE(RingElement({1, 1}).is_zero());
    EXPECT_EQ(RingElement({3, 1, 3, 3}), RingElement({1, 3}));
    EXPECT_EQ(RingElement({5, -2}).shifts(), (std::vector<std::int64_t>{-2, 5}));
}

TEST(RingElement, RingAxiomsOnRandomElements) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 300; ++t) {
        const auto x = random_element(rng), y = random_element(rng), z = random_element(rng);
        EXPECT_EQ(x + y, y + x);
        EXPECT_EQ(x * y, y * x);
        EXPECT_EQ((x + y) + z, x + (y + z));
        EXPECT_EQ((x * y) * z, x * (y * z));
        EXPECT_EQ(x * (y + z), x * y + x * z);
        EXPECT_EQ(x * RingElement::one(), x);
        EXPECT_EQ(x + RingElement::zero(), x);
    }
}

TEST(Lift, ShiftOneAtThreeMatchesDisplayedMatrix) {
    EXPECT_EQ(lift(RingElement{1}, 3), BinaryMatrix::from_dense({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
}

TEST(Lift, ZeroElementLiftsToZeroMatrix) {
    EXPECT_EQ(lift(RingElement::zero(), 4), BinaryMatrix(4, 4));
    EXPECT_EQ(lift(Protograph::from_rows({{RingElement::zero()}}), 4), BinaryMatrix(4, 4));
}

TEST(Lift, ZeroLiftSizeRejected) {
    EXPECT_THROW(lift(RingElement{1}, 0), std::invalid_argument);
    EXPECT_THROW(lift(Protograph::identity(2), 0), std::invalid_argument);
}

// A_L = [λ1+λ2, λ0, 0; 0, λ0+λ1, λ1] lifted at L = 3. Cell by cell:
// λ1+λ2 rows 011/101/110, λ0 the identity, λ0+λ1 rows 110/011/101, λ1 rows 010/001/100.
TEST(Lift, TwoByThreeProtographAtThree) {
    const Protograph a = parse_protograph("λ(1,2) λ(0) λ(); λ() λ(0,1) λ(1)");
    const auto expected = BinaryMatrix::from_dense({
        {0, 1, 1, 1, 0, 0, 0, 0, 0},
        {1, 0, 1, 0, 1, 0, 0, 0, 0},
        {1, 1, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 0, 1, 1, 0, 0, 1, 0},
        {0, 0, 0, 0, 1, 1, 0, 0, 1},
        {0, 0, 0, 1, 0, 1, 1, 0, 0},
    });
    EXPECT_EQ(lift(a, 3), expected);
}

// The published 6x9 display has a 1 at (4, 6) inside the λ1 block; a lifted
// single shift is a permutation matrix, so no cell value produces that block.
TEST(Lift, PublishedSixByNineDisplayIsNotAPermutationInTheShiftBlock) {
    const auto published = BinaryMatrix::from_dense({
        {0, 1, 1, 1, 0, 0, 0, 0, 0},
        {1, 0, 1, 0, 1, 0, 0, 0, 0},
        {1, 1, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 0, 1, 1, 0, 0, 1, 0},
        {0, 0, 0, 0, 1, 1, 1, 0, 1},
        {0, 0, 0, 1, 0, 1, 1, 0, 0},
    });
    const auto block = published.row_slice(3, 6).column_slice(6, 9);
    const auto weights = block.row_weights();
    EXPECT_EQ(weights, (std::vector<std::size_t>{1, 2, 1}));
    const auto lifted = lift(parse_protograph("λ(1,2) λ(0) λ(); λ() λ(0,1) λ(1)"), 3);
    EXPECT_EQ((lifted + published).nnz(), 1U);
    EXPECT_TRUE((lifted + published).get(4, 6));
}

TEST(Lift, MatchesCirculantOracle) {
    std::mt19937_64 rng(32);
    for (std::size_t l : {2, 3, 5, 7}) {
        for (int t = 0; t < 50; ++t) {
            const auto x = random_element(rng);
            EXPECT_EQ(oracle::to_dense(lift(x, l)), circulant(x.shifts(), l));
        }
    }
}

TEST(Lift, IsARingHomomorphism) {
    std::mt19937_64 rng(33);
    for (std::size_t l : {2, 3, 5, 7}) {
        for (int t = 0; t < 200; ++t) {
            const auto x = random_element(rng), y = random_element(rng);
            EXPECT_EQ(lift(x + y, l), lift(x, l) + lift(y, l));
            EXPECT_EQ(lift(x * y, l), matmul(lift(x, l), lift(y, l)));
            const auto lx = circulant(x.shifts(), l), ly = circulant(y.shifts(), l);
            EXPECT_EQ(oracle::to_dense(lift(x * y, l)), oracle::matmul(lx, ly));
            EXPECT_EQ(oracle::to_dense(lift(x + y, l)), add(lx, ly));
        }
    }
}

TEST(Lift, WeightsEqualShiftCounts) {
    std::mt19937_64 rng(34);
    const std::size_t l = 11;
    for (int t = 0; t < 50; ++t) {
        const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 5;
        std::vector<RingElement> cells;
        for (std::size_t i = 0; i < r * c; ++i) cells.push_back(random_element(rng, 4, 5).reduced(l));
        const Protograph p(r, c, cells);
        const auto m = lift(p, l);
        const auto rw = m.row_weights();
        const auto cw = m.column_weights();
        for (std::size_t i = 0; i < r; ++i) {
            std::size_t expect = 0;
            for (std::size_t j = 0; j < c; ++j) expect += p.at(i, j).term_count();
            for (std::size_t t2 = 0; t2 < l; ++t2) EXPECT_EQ(rw[i * l + t2], expect);
        }
        for (std::size_t j = 0; j < c; ++j) {
            std::size_t expect = 0;
            for (std::size_t i = 0; i < r; ++i) expect += p.at(i, j).term_count();
            for (std::size_t t2 = 0; t2 < l; ++t2) EXPECT_EQ(cw[j * l + t2], expect);
        }
    }
}

TEST(ProtographTranspose, NegatesShifts) {
    const auto p = Protograph::from_rows({{RingElement{1}}});
    EXPECT_EQ(p.transpose(), Protograph::from_rows({{RingElement{-1}}}));
    EXPECT_EQ(lift(p.transpose(), 3), lift(p, 3).transpose());
    EXPECT_EQ(Protograph::identity(1).transpose(), Protograph::identity(1));
}

TEST(ProtographTranspose, InvolutionAndLiftCommute) {
    std::mt19937_64 rng(35);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_protograph(1 + rng() % 4, 1 + rng() % 4, rng);
        EXPECT_EQ(p.transpose().transpose(), p);
        EXPECT_EQ(lift(p.transpose(), 5), lift(p, 5).transpose());
    }
}

TEST(ProtographMatmul, Examples) {
    EXPECT_EQ(Protograph::from_rows({{RingElement{0}}}) * Protograph::from_rows({{RingElement{2}}}),
              Protograph::from_rows({{RingElement{2}}}));
    const auto a = Protograph::from_rows({{RingElement{1}, RingElement::zero()}});
    const auto b = Protograph::from_rows({{RingElement{0}}, {RingElement{5}}});
    EXPECT_EQ(a * b, Protograph::from_rows({{RingElement{1}}}));
    EXPECT_THROW(a * a, std::invalid_argument);
}

TEST(ProtographMatmul, LiftIsHomomorphic) {
    std::mt19937_64 rng(36);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 3, k = 1 + rng() % 3, m = 1 + rng() % 3;
        const auto a = random_protograph(n, k, rng);
        const auto b = random_protograph(k, m, rng);
        EXPECT_EQ(lift(a * b, 5), matmul(lift(a, 5), lift(b, 5)));
    }
}

TEST(ProtographKron, LiftMatchesRingKron) {
    // Ring-level kron: block (i,j) of a scaled by b, with ring products.
    std::mt19937_64 rng(37);
    for (int t = 0; t < 30; ++t) {
        const auto a = random_protograph(1 + rng() % 2, 1 + rng() % 2, rng);
        const auto b = random_protograph(1 + rng() % 3, 1 + rng() % 3, rng);
        const auto k = proto_kron(a, b);
        ASSERT_EQ(k.rows(), a.rows() * b.rows());
        ASSERT_EQ(k.cols(), a.cols() * b.cols());
        for (std::size_t i = 0; i < k.rows(); ++i) {
            for (std::size_t j = 0; j < k.cols(); ++j) {
                EXPECT_EQ(k.at(i, j), a.at(i / b.rows(), j / b.cols()) * b.at(i % b.rows(), j % b.cols()));
            }
        }
    }
}

TEST(ProtographParse, Examples) {
    const auto p = parse_protograph("λ(2) λ() λ(0)");
    EXPECT_EQ(p, Protograph::from_rows({{RingElement{2}, RingElement::zero(), RingElement{0}}}));
    EXPECT_TRUE(parse_protograph("λ(1,1)").at(0, 0).is_zero());
    EXPECT_EQ(parse_protograph("L(1, -3) 0"), Protograph::from_rows({{RingElement({-3, 1}), RingElement::zero()}}));
}

TEST(ProtographParse, ReferenceProtographShape) {
    const auto p = parse_protograph(kReferenceProtograph);
    ASSERT_EQ(p.rows(), 4U);
    ASSERT_EQ(p.cols(), 6U);
    EXPECT_EQ(p.at(0, 0), RingElement{2});
    EXPECT_TRUE(p.at(0, 1).is_zero());
    EXPECT_EQ(p.at(2, 3), RingElement{1});
    EXPECT_TRUE(p.at(3, 5).is_zero());
}

TEST(ProtographParse, RenderRoundTrip) {
    std::mt19937_64 rng(38);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_protograph(1 + rng() % 4, 1 + rng() % 5, rng);
        EXPECT_EQ(parse_protograph(render(p)), p);
    }
}

TEST(ProtographParse, ErrorsCarryPosition) {
    auto expect_error = [](const char* text, std::size_t line, std::size_t column) {
        try {
            parse_protograph(text);
            ADD_FAILURE() << "no error for " << text;
        } catch (const ProtographParseError& e) {
            EXPECT_EQ(e.line(), line) << text;
            EXPECT_EQ(e.column(), column) << text;
        }
    };
    expect_error("λ(1) λ(2)\nλ(0)", 2, 1);
    expect_error("λ(1) λ(x)", 1, 8);
    expect_error("λ(1) q", 1, 6);
}
