#pragma once
// Shared helpers for the test suite: seeded randomness and brute-force
// reference computations kept deliberately naive.

#include "fano_forge/classify.hpp"
#include "fano_forge/fine.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace testing_support {

using namespace fano_forge;

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(0x5eed'f00dULL);
    return g;
}

inline std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng());
}

// Product of random elementary matrices; determinant +-1.
inline IntMatrix random_unimodular(std::size_t n, int steps = 8, std::int64_t span = 2) {
    IntMatrix U = IntMatrix::identity(n);
    if (n == 1) {
        if (uniform(0, 1)) U(0, 0) = -1;
        return U;
    }
    for (int s = 0; s < steps; ++s) {
        std::size_t i = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 1));
        std::size_t j = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 2));
        if (j >= i) ++j;
        std::int64_t f = uniform(-span, span);
        for (std::size_t c = 0; c < n; ++c) U(i, c) += f * U(j, c);
        if (uniform(0, 3) == 0)
            for (std::size_t c = 0; c < n; ++c) U(i, c) = -U(i, c);
        if (uniform(0, 3) == 0)
            for (std::size_t c = 0; c < n; ++c) std::swap(U(i, c), U(j, c));
    }
    return U;
}

inline Point map_points(const IntMatrix& U, const Point& x) {
    Point y(U.rows());
    for (std::size_t i = 0; i < U.rows(); ++i)
        for (std::size_t j = 0; j < U.cols(); ++j) y[i] += Rational(U(i, j)) * x[j];
    return y;
}

inline std::vector<Point> map_points(const IntMatrix& U, const std::vector<Point>& xs) {
    std::vector<Point> out;
    for (auto& x : xs) out.push_back(map_points(U, x));
    std::sort(out.begin(), out.end());
    return out;
}

inline Point lattice_point(const std::vector<std::int64_t>& v) {
    Point p;
    for (auto x : v) p.push_back(Rational(x));
    return p;
}

// Leibniz expansion.
inline Int leibniz_det(const IntMatrix& M) {
    const std::size_t n = M.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Int total = 0;
    do {
        int sign = 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Int p = sign;
        for (std::size_t i = 0; i < n; ++i) p *= M(i, perm[i]);
        total += p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

// gcd of all k x k minors.
inline Int determinantal_divisor(const IntMatrix& M, std::size_t k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    subsets(M.rows(), k, rs);
    subsets(M.cols(), k, cs);
    Int g = 0;
    for (auto& r : rs)
        for (auto& c : cs) {
            IntMatrix S(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) S(i, j) = M(r[i], c[j]);
            g = gcd(g, abs(leibniz_det(S)));
        }
    return g;
}

// Number of lattice points (strictly interior when asked) of conv(columns)
// by a bounding-box scan with exact membership.
inline std::vector<std::vector<std::int64_t>> box_scan(const RationalPolytope& P, bool interior) {
    std::vector<std::vector<std::int64_t>> out;
    if (P.empty()) return out;
    const std::size_t n = P.ambient;
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational a = P.vertices[0][i], b = a;
        for (auto& v : P.vertices) {
            a = std::min(a, v[i]);
            b = std::max(b, v[i]);
        }
        lo[i] = to_i64(ceil_rat(a));
        hi[i] = to_i64(floor_rat(b));
        if (lo[i] > hi[i]) return out;
    }
    std::vector<std::int64_t> x = lo;
    while (true) {
        Point p = lattice_point(x);
        bool in = true;
        for (auto& h : P.equations)
            if (detail::dot(p, h.normal) != h.offset) in = false;
        for (auto& h : P.halfspaces) {
            Rational s = detail::dot(p, h.normal);
            if (s < h.offset || (interior && s == h.offset)) in = false;
        }
        if (in) out.push_back(x);
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (++x[k] <= hi[k]) break;
            x[k] = lo[k];
            if (k == 0) return out;
        }
    }
}

// Lattice polytope with the origin in its interior: random points in a box
// plus the signed unit vectors scaled, so the origin is interior.
inline RationalPolytope random_lattice_polytope(std::size_t n, std::int64_t radius, std::size_t extra) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
        Point a(n), b(n);
        a[i] = uniform(1, radius);
        b[i] = -uniform(1, radius);
        pts.push_back(a);
        pts.push_back(b);
    }
    for (std::size_t e = 0; e < extra; ++e) {
        Point p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = uniform(-radius, radius);
        pts.push_back(p);
    }
    return RationalPolytope::from_vertices(n, pts);
}

// Random simplex whose vertices positively span R^n (origin interior):
// n random vectors plus a negative combination.
inline RationalPolytope random_lattice_simplex(std::size_t n, std::int64_t radius) {
    while (true) {
        IntMatrix M(n, n + 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) M(i, j) = uniform(-radius, radius);
        IntMatrix B(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) B(i, j) = M(i, j);
        if (determinant(B) == 0) continue;
        std::vector<std::int64_t> c(n);
        for (auto& x : c) x = uniform(1, 3);
        for (std::size_t i = 0; i < n; ++i) {
            Int s = 0;
            for (std::size_t j = 0; j < n; ++j) s -= c[j] * M(i, j);
            M(i, n) = s;
        }
        std::vector<Point> pts;
        for (std::size_t j = 0; j <= n; ++j) {
            Point p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = Rational(M(i, j));
            pts.push_back(p);
        }
        return RationalPolytope::from_vertices(n, pts);
    }
}

}  // namespace testing_support
