#include "fewzeros/geometry.hpp"
#include "fewzeros/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace fewzeros;

namespace {

using Q = Rational;

Support<Q> sup1(std::initializer_list<long> xs) {
    Vec<Vec<Q>> e;
    for (long x : xs) e.push_back({Q(x)});
    return Support<Q>(1, e);
}

Lifting<Q> lift(std::initializer_list<long> xs) {
    Lifting<Q> l;
    for (long x : xs) l.values.emplace_back(x);
    return l;
}

std::vector<oracle::Point> lifted_points(const Support<Q>& s, const Lifting<Q>& l) {
    std::vector<oracle::Point> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        oracle::Point p = s[i];
        p.push_back(l.values[i]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

TEST(Support, RejectsDuplicatesAndEmpty) {
    EXPECT_THROW(Support<Q>(1, {{Q(0)}, {Q(0)}}), std::invalid_argument);
    EXPECT_THROW(Support<Q>(1, {}), std::invalid_argument);
    EXPECT_THROW(Support<Q>(2, {{Q(0)}}), std::invalid_argument);
    EXPECT_THROW(Support<double>(1, {{0.5}, {0.5}}), std::invalid_argument);
}

TEST(AffineSpan, Examples) {
    EXPECT_EQ(affine_span_dimension<Q>({sup1({0, 1})}), 1u);
    const Support<Q> origin(2, {{Q(0), Q(0)}});
    EXPECT_EQ(affine_span_dimension<Q>({origin, origin}), 0u);
    const Support<Q> seg(2, {{Q(0), Q(0)}, {Q(1), Q(0)}});
    EXPECT_EQ(affine_span_dimension<Q>({seg, seg}), 1u);
    const Support<Q> seg2(2, {{Q(0), Q(0)}, {Q(0), Q(1)}});
    EXPECT_EQ(affine_span_dimension<Q>({seg, seg2}), 2u);
    EXPECT_THROW(affine_span_dimension<Q>({}), std::invalid_argument);
}

TEST(EnvelopeVertices, OneDimensionalExamples) {
    const auto s = sup1({0, 1, 2});
    EXPECT_EQ(envelope_vertices(s, lift({0, 0, 0})).vertex_indices, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(envelope_vertices(s, lift({0, 1, 0})).vertex_indices, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(envelope_vertices(s, lift({0, -1, 0})).vertex_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(EnvelopeVertices, TranslationInvariant) {
    RngStream rng(5, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Vec<Vec<Q>> e;
        Lifting<Q> l, shifted;
        const Q c(rng.uniform_int(-50, 50), 7);
        for (long x = 0; x < 6; ++x) {
            e.push_back({Q(x), Q(rng.uniform_int(-3, 3))});
            l.values.emplace_back(rng.uniform_int(-10, 10), 3);
            shifted.values.push_back(l.values.back() + c);
        }
        const Support<Q> s(2, e);
        EXPECT_EQ(envelope_vertices(s, l).vertex_indices, envelope_vertices(s, shifted).vertex_indices);
    }
}

TEST(PolytopeVertexCount, Examples) {
    EXPECT_EQ(polytope_vertex_count(sup1({0, 1, 2})), 2u);
    const Support<Q> square(2, {{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}, {Q(1), Q(1)}, {Q(1, 2), Q(1, 2)}});
    EXPECT_EQ(polytope_vertex_count(square), 4u);
    const Support<Q> circuit(2, {{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}, {Q(2), Q(2)}});
    EXPECT_EQ(polytope_vertex_count(circuit), 4u);
}

TEST(BuildCell, ZeroLiftingPolarCone) {
    // label at the origin exponent: cell = {z : alpha·z <= 0}
    const Support<Q> s(2, {{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}});
    const auto cell = build_cell<Q>(CellLabel{{0, 0}}, {s, s}, {zero_lifting(s), zero_lifting(s)});
    EXPECT_TRUE(cell.full_dimensional);
    EXPECT_TRUE(cell.contains({Q(-1), Q(-2)}));
    EXPECT_FALSE(cell.contains({Q(1), Q(-2)}));
    for (const auto& ineq : cell.inequalities) EXPECT_EQ(ineq.rhs, Q(0));
}

TEST(BuildCell, OneDimensionalExamples) {
    const auto a1 = sup1({0, 1}), a2 = sup1({0, 2});
    const std::vector<Lifting<Q>> zero{zero_lifting(a1), zero_lifting(a2)};
    const auto c00 = build_cell<Q>(CellLabel{{0, 0}}, {a1, a2}, zero);
    EXPECT_TRUE(c00.full_dimensional);
    EXPECT_TRUE(c00.contains({Q(-5)}));
    EXPECT_FALSE(c00.contains({Q(1)}));
    const auto c10 = build_cell<Q>(CellLabel{{1, 0}}, {a1, a2}, zero);
    EXPECT_FALSE(c10.full_dimensional);
    EXPECT_TRUE(c10.contains({Q(0)}));
    EXPECT_FALSE(c10.contains({Q(1, 100)}));
}

TEST(MinkowskiCount, Examples) {
    const Support<Q> pt(2, {{Q(1), Q(2)}});
    EXPECT_EQ(minkowski_sum_vertex_count<Q>({pt, pt}, {zero_lifting(pt), zero_lifting(pt)}), 1u);

    const auto a1 = sup1({0, 1}), a2 = sup1({0, 2});
    EXPECT_EQ(minkowski_sum_vertex_count<Q>({a1, a2}, {zero_lifting(a1), zero_lifting(a2)}), 2u);

    const auto cells = enumerate_full_cells<Q>({a1, a1}, {zero_lifting(a1), zero_lifting(a1)});
    ASSERT_EQ(cells.size(), 2u);
    for (const auto& c : cells) EXPECT_TRUE(is_diagonal(c.label, std::vector<Support<Q>>{a1, a1}));
}

TEST(EnumerateCells, ThreeCellsWithBreakpoints) {
    const auto s = sup1({0, 1, 2});
    const auto cells = enumerate_full_cells<Q>({s}, {lift({0, 1, 0})});
    ASSERT_EQ(cells.size(), 3u);
    // z < -1 picks exponent 0, -1 < z < 1 picks 1, z > 1 picks 2
    auto label_at = [&](Q z) {
        for (const auto& c : cells)
            if (c.contains({z})) return static_cast<long>(c.label.indices[0]);
        return -1L;
    };
    EXPECT_EQ(label_at(Q(-2)), 0);
    EXPECT_EQ(label_at(Q(0)), 1);
    EXPECT_EQ(label_at(Q(2)), 2);
    EXPECT_EQ(label_at(Q(-1)), 0);  // boundary lies in both neighbours
}

TEST(EnumerateCells, SinglePointsGiveWholeSpace) {
    const Support<Q> pt(2, {{Q(0), Q(0)}});
    const auto cells = enumerate_full_cells<Q>({pt, pt}, {zero_lifting(pt), zero_lifting(pt)});
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_TRUE(cells[0].inequalities.empty());
}

TEST(EnumerateCells, IdenticalSupportsGiveDiagonalLabels) {
    RngStream rng(17, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec<Vec<Q>> e;
        Lifting<Q> l;
        while (e.size() < 5) {
            Vec<Q> a{Q(rng.uniform_int(0, 4)), Q(rng.uniform_int(0, 4))};
            if (std::find(e.begin(), e.end(), a) != e.end()) continue;
            e.push_back(a);
            l.values.emplace_back(rng.uniform_int(-6, 6), 5);
        }
        const Support<Q> s(2, e);
        const std::vector<Support<Q>> ss{s, s};
        for (const auto& c : enumerate_full_cells<Q>(ss, {l, l})) EXPECT_TRUE(is_diagonal(c.label, ss));
    }
}

// Random rational instances: LP-based count against the brute-force hull oracle,
// float mode against exact mode, and random points covered by some cell.
TEST(MinkowskiCount, MatchesBruteForceOracle) {
    RngStream rng(23, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 1));
        std::vector<Support<Q>> ss;
        std::vector<Lifting<Q>> ls;
        std::vector<std::vector<oracle::Point>> lifted;
        for (std::size_t k = 0; k < n; ++k) {
            const auto t = static_cast<std::size_t>(rng.uniform_int(1, 5));
            Vec<Vec<Q>> e;
            while (e.size() < t) {
                Vec<Q> a;
                for (std::size_t i = 0; i < n; ++i) a.emplace_back(rng.uniform_int(0, 5));
                if (std::find(e.begin(), e.end(), a) == e.end()) e.push_back(a);
            }
            Lifting<Q> l;
            for (std::size_t i = 0; i < t; ++i) l.values.emplace_back(rng.uniform_int(-8, 8), rng.uniform_int(1, 4));
            ss.emplace_back(n, e);
            lifted.push_back(lifted_points(ss.back(), l));
            ls.push_back(std::move(l));
        }
        const std::size_t v = minkowski_sum_vertex_count(ss, ls);
        EXPECT_EQ(v, oracle::minkowski_vertices(lifted)) << "trial " << trial;

        std::vector<Support<double>> sd;
        std::vector<Lifting<double>> ld;
        for (std::size_t k = 0; k < n; ++k) {
            sd.push_back(convert_support<double>(ss[k]));
            Lifting<double> l;
            for (const auto& x : ls[k].values) l.values.push_back(to_double(x));
            ld.push_back(std::move(l));
        }
        EXPECT_EQ(minkowski_sum_vertex_count(sd, ld), v);

        const auto cells = enumerate_full_cells(ss, ls);
        for (int p = 0; p < 200; ++p) {
            Vec<Q> z;
            for (std::size_t i = 0; i < n; ++i) z.push_back(ScalarTraits<Q>::from_double(rng.uniform(-10, 10)));
            EXPECT_TRUE(std::any_of(cells.begin(), cells.end(), [&](const Cell<Q>& c) { return c.contains(z); }));
        }
    }
}

TEST(MinkowskiCount, ZeroLiftingCountsPolytopeSumVertices) {
    // square + triangle: 5 vertices (hand count of the hexagon-less sum)
    const Support<Q> sq(2, {{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}, {Q(1), Q(1)}});
    const Support<Q> tri(2, {{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}});
    std::vector<std::vector<oracle::Point>> lifted{lifted_points(sq, zero_lifting(sq)), lifted_points(tri, zero_lifting(tri))};
    EXPECT_EQ(minkowski_sum_vertex_count<Q>({sq, tri}, {zero_lifting(sq), zero_lifting(tri)}),
              oracle::minkowski_vertices(lifted));
    EXPECT_EQ(oracle::minkowski_vertices(lifted), 5u);
}
