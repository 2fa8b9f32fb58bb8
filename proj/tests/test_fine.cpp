#include "support.hpp"

#include <gtest/gtest.h>

using namespace fano_forge;
using namespace testing_support;

namespace {

// F contains the interior lattice points and sits in the interior of D.
void expect_sandwich(const RationalPolytope& D, const FineResult& r) {
    for (auto& p : lattice_points(D, true)) EXPECT_TRUE(r.F.contains(lattice_point(p)));
    for (auto& v : r.F.vertices)
        for (auto& h : D.halfspaces) EXPECT_GT(detail::dot(v, h.normal), h.offset);
}

// Fine interior from the definition, truncated to directions with entries
// in [-R, R]: an outer approximation that is exact once R is large enough.
RationalPolytope fine_by_box(const RationalPolytope& D, std::int64_t R) {
    const std::size_t n = D.ambient;
    std::vector<Halfspace> hs;
    std::vector<std::int64_t> v(n, -R);
    while (true) {
        bool zero = std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; });
        if (!zero) hs.push_back(detail::shifted_halfspace(D, v));
        std::size_t k = n;
        bool done = true;
        while (k > 0) {
            --k;
            if (++v[k] <= R) { done = false; break; }
            v[k] = -R;
        }
        if (done) break;
    }
    return RationalPolytope::from_halfspaces(n, hs);
}

}  // namespace

TEST(Fine, WorkedExampleIsOrigin) {
    auto D = polytope_of_columns(IntMatrix{{1, 1, -2}, {0, 3, -3}});
    auto r = fine_interior(D);
    EXPECT_EQ(r.dim, 0);
    ASSERT_EQ(r.F.vertices.size(), 1u);
    EXPECT_EQ(r.F.vertices[0], (Point{0, 0}));
    EXPECT_EQ(kodaira_dimension(r, 2), 0);
}

TEST(Fine, SegmentInDimensionOne) {
    auto D = RationalPolytope::from_vertices(1, {Point{-3}, Point{5}});
    auto r = fine_interior(D);
    EXPECT_EQ(r.F.vertices, (std::vector<Point>{{-2}, {4}}));
    // Unit segment around 0 has no interior lattice point.
    auto E = RationalPolytope::from_vertices(1, {Point{-1}, Point{1}});
    auto e = fine_interior(E);
    EXPECT_EQ(e.dim, 0);
    auto G = RationalPolytope::from_vertices(1, {Point{0}, Point{1}});
    auto g = fine_interior(G);
    EXPECT_TRUE(g.F.empty());
    EXPECT_EQ(kodaira_dimension(g, 1), kNoCanonicalModel);
}

TEST(Fine, AgreesWithTruncatedDefinition) {
    // Once the box of directions contains the certificate, the truncated
    // intersection is exactly F.
    for (std::size_t n = 2; n <= 3; ++n)
        for (int t = 0; t < 25; ++t) {
            auto D = random_lattice_simplex(n, 2);
            auto r = fine_interior(D);
            std::int64_t R = 1;
            for (auto& v : r.certificate) {
                std::int64_t g = 0;
                for (auto x : v) {
                    g = std::gcd(g, x);
                    R = std::max(R, std::abs(x));
                }
                EXPECT_EQ(g, 1);
            }
            if (R > (n == 2 ? 12 : 5)) continue;
            EXPECT_EQ(fine_by_box(D, R), r.F);
        }
}

TEST(Fine, SandwichOnRandomPolytopes) {
    for (std::size_t n = 1; n <= 4; ++n)
        for (int t = 0; t < (n == 4 ? 8 : 30); ++t) {
            auto D = random_lattice_polytope(n, n == 4 ? 2 : 3, static_cast<std::size_t>(uniform(0, 3)));
            auto r = fine_interior(D);
            expect_sandwich(D, r);
        }
}

TEST(Fine, EqualsInteriorHullUpToDimensionTwo) {
    for (std::size_t n = 1; n <= 2; ++n)
        for (int t = 0; t < 80; ++t) {
            auto D = random_lattice_polytope(n, 4, static_cast<std::size_t>(uniform(0, 4)));
            auto inner = lattice_points(D, true);
            std::vector<Point> pts;
            for (auto& p : inner) pts.push_back(lattice_point(p));
            auto hull = RationalPolytope::from_vertices(n, pts);
            EXPECT_EQ(fine_interior(D).F, hull);
        }
}

TEST(Fine, Equivariance) {
    for (std::size_t n = 2; n <= 3; ++n)
        for (int t = 0; t < 15; ++t) {
            auto D = random_lattice_simplex(n, 2);
            auto r = fine_interior(D);
            auto U = random_unimodular(n);
            auto DU = RationalPolytope::from_vertices(n, map_points(U, D.vertices));
            EXPECT_EQ(fine_interior(DU).F.vertices, map_points(U, r.F.vertices));
        }
}

TEST(Fine, KodairaDimensionOfCanonicalSimplex) {
    auto D = polytope_of_columns(simplex(DegreeMatrix{{1, 1, 1, 3}, {}}));
    auto r = fine_interior(D);
    EXPECT_EQ(kodaira_dimension(r, 3), std::min(r.dim, 2));
    expect_sandwich(D, r);
}

TEST(Plurigenera, SegmentFormula) {
    EXPECT_EQ(plurigenus(Rational(1, 2), Rational(2, 3), 1), 1);
    EXPECT_EQ(plurigenus(Rational(1, 2), Rational(2, 3), 2), 3);
    EXPECT_EQ(plurigenus(Rational(1, 2), Rational(2, 3), 6), 8);
    EXPECT_EQ(plurigenus(0, Rational(7, 8), 8), 8);
    EXPECT_EQ(plurigenus(Rational(7, 8), Rational(7, 8), 0), 1);
    EXPECT_THROW(plurigenus(Rational(-1, 2), 1, 1), InvalidInput);
    EXPECT_THROW(plurigenus(0, 1, -1), InvalidInput);
}

TEST(Fine, Preconditions) {
    EXPECT_THROW(fine_interior(RationalPolytope::from_vertices(2, {Point{0, 0}, Point{1, 0}})), InvalidInput);
    EXPECT_THROW(fine_interior(RationalPolytope::from_vertices(1, {Point{Rational(-1, 2)}, Point{2}})), InvalidInput);
    FineOptions small;
    small.max_dim = 2;
    EXPECT_THROW(fine_interior(random_lattice_simplex(3, 2), small), ResourceError);
}
