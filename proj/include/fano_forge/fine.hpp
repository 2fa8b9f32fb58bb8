#pragma once
// Fine interiors of lattice polytopes and the invariants read off them.

#include "polytope.hpp"

#include <limits>
#include <set>
#include <vector>

namespace fano_forge {

// Polytope spanned by the columns of an integer matrix.
inline RationalPolytope polytope_of_columns(const IntMatrix& P) {
    std::vector<Point> pts;
    for (std::size_t j = 0; j < P.cols(); ++j) {
        Point x(P.rows());
        for (std::size_t i = 0; i < P.rows(); ++i) x[i] = Rational(P(i, j));
        pts.push_back(x);
    }
    return RationalPolytope::from_vertices(P.rows(), pts);
}

// min over the polytope of <x, v>.
template <class V>
Rational ord(const RationalPolytope& D, const V& v) {
    if (D.empty()) throw InvalidInput("ord of an empty polytope");
    Rational best;
    bool first = true;
    for (const auto& x : D.vertices) {
        Rational s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * Rational(Int(v[i]));
        if (first || s < best) best = s;
        first = false;
    }
    return best;
}

struct FineResult {
    RationalPolytope F;
    int dim = -1;
    // Directions whose shifted halfspaces define F.
    std::vector<std::vector<std::int64_t>> certificate;
};

struct FineOptions {
    std::size_t max_dim = 4;
    std::size_t max_candidates = 20'000'000;
};

namespace detail {

inline Halfspace shifted_halfspace(const RationalPolytope& D, const std::vector<std::int64_t>& v) {
    Halfspace h;
    for (auto x : v) h.normal.push_back(Int(x));
    h.offset = ord(D, v) + 1;
    return h;
}

}  // namespace detail

// Cutting scheme: start from the facets of D shifted inward by one, then add
// every primitive direction whose shifted halfspace still cuts the current
// polytope.  A direction v cuts only if <u - w, v> < 1 for some vertex u of
// the current polytope and all vertices w of D, a bounded region, so each
// round inspects finitely many candidates; rounds repeat until none cut.
// Cheap rounds over short directions come first: they pull the vertices away
// from the boundary of D, which keeps those regions small.
inline FineResult fine_interior(const RationalPolytope& D, const FineOptions& opt = {}) {
    const std::size_t n = D.ambient;
    if (n > opt.max_dim) throw ResourceError("Fine interior dimension cap exceeded");
    if (D.dimension() != static_cast<int>(n)) throw InvalidInput("Fine interior needs a full-dimensional polytope");
    for (auto& x : D.vertices)
        for (auto& c : x)
            if (boost::multiprecision::denominator(c) != 1) throw InvalidInput("Fine interior needs a lattice polytope");
    FineResult res;
    std::set<std::vector<std::int64_t>> used;
    std::vector<Halfspace> cuts;
    auto add = [&](const std::vector<std::int64_t>& v) {
        used.insert(v);
        cuts.push_back(detail::shifted_halfspace(D, v));
    };
    for (auto& h : D.halfspaces) {
        std::vector<std::int64_t> v;
        for (auto& x : h.normal) v.push_back(to_i64(x));
        add(v);
    }
    // Integer copies of the vertices: D as is, each vertex of F scaled by its
    // own denominator, so the cut test runs in machine arithmetic.
    std::vector<std::vector<std::int64_t>> dv, fv;
    std::vector<std::int64_t> fden;
    for (auto& x : D.vertices) {
        std::vector<std::int64_t> r;
        for (auto& c : x) r.push_back(to_i64(boost::multiprecision::numerator(c)));
        dv.push_back(r);
    }
    bool machine = false;
    auto load_F = [&] {
        fv.clear();
        fden.clear();
        machine = false;
        const Int limit = Int(1) << 40;
        for (auto& x : res.F.vertices) {
            Int L = detail::lcd(x);
            if (L > limit) return;
            std::vector<std::int64_t> r;
            for (auto& c : x) {
                Int y = boost::multiprecision::numerator(c * Rational(L));
                if (abs(y) > limit) return;
                r.push_back(y.convert_to<std::int64_t>());
            }
            fv.push_back(r);
            fden.push_back(L.convert_to<std::int64_t>());
        }
        machine = true;
    };
    auto cuts_off = [&](const std::vector<std::int64_t>& v) {
        if (!machine) return ord(res.F, v) - ord(D, v) < 1;
        __int128 m = 0;
        for (std::size_t i = 0; i < dv.size(); ++i) {
            __int128 t = 0;
            for (std::size_t j = 0; j < n; ++j) t += static_cast<__int128>(dv[i][j]) * v[j];
            if (i == 0 || t < m) m = t;
        }
        for (std::size_t i = 0; i < fv.size(); ++i) {
            __int128 t = 0;
            for (std::size_t j = 0; j < n; ++j) t += static_cast<__int128>(fv[i][j]) * v[j];
            if (t < fden[i] * (m + 1)) return true;
        }
        return false;
    };

    std::vector<std::vector<std::int64_t>> short_dirs;
    {
        const std::int64_t r = 2;
        std::vector<std::int64_t> v(n, -r);
        while (true) {
            std::int64_t g = 0;
            for (auto x : v) g = std::gcd(g, x);
            if (g == 1) short_dirs.push_back(v);
            std::size_t k = n;
            while (k > 0 && v[k - 1] == r) v[--k] = -r;
            if (k == 0) break;
            ++v[k - 1];
        }
    }

    // Vertices whose whole region was inspected without finding a cut.
    std::set<Point> settled;
    while (true) {
        res.F = RationalPolytope::from_halfspaces(n, cuts);
        if (res.F.empty()) break;
        load_F();
        // Keep only the irredundant description for the next round.
        cuts = res.F.halfspaces;
        for (auto e : res.F.equations) {
            cuts.push_back(e);
            for (auto& x : e.normal) x = -x;
            e.offset = -e.offset;
            cuts.push_back(e);
        }
        std::vector<std::vector<std::int64_t>> added;
        for (auto& v : short_dirs)
            if (!used.count(v) && cuts_off(v)) added.push_back(v);
        if (!added.empty()) {
            for (auto& v : added) add(v);
            continue;
        }
        // Every unsettled vertex contributes its deepest cut; adding all
        // cutting directions at once swamps the next hull computation.
        std::set<std::vector<std::int64_t>> found;
        std::size_t seen = 0;
        for (std::size_t ui = 0; ui < res.F.vertices.size(); ++ui) {
            const auto& u = res.F.vertices[ui];
            if (settled.count(u)) continue;
            // Region {v : <w - u, v> >= -1 for all vertices w of D}.
            std::vector<Halfspace> region;
            for (const auto& w : D.vertices) {
                Point d(n);
                Int L = 1;
                for (std::size_t i = 0; i < n; ++i) {
                    d[i] = w[i] - u[i];
                    L = lcm(L, Int(boost::multiprecision::denominator(d[i])));
                }
                Halfspace h;
                Int g = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    h.normal.push_back(boost::multiprecision::numerator(d[i] * Rational(L)));
                    g = gcd(g, abs(h.normal.back()));
                }
                if (g == 0) throw InvalidInput("Fine interior touches a vertex");
                for (auto& x : h.normal) x /= g;
                h.offset = Rational(-L, g);
                region.push_back(h);
            }
            auto R = RationalPolytope::from_halfspaces(n, region);
            // Depth of the cut at u, ord_D(v) + 1 - <u, v>, scaled by the
            // denominator of u in the machine case.
            Rational best = 0;
            std::vector<std::int64_t> best_v;
            for (auto& v : lattice_points(R)) {
                if (++seen > opt.max_candidates) throw ResourceError("Fine interior candidate pool too large");
                std::int64_t g = 0;
                for (auto x : v) g = std::gcd(g, x);
                if (g != 1 || used.count(v)) continue;
                Rational depth;
                if (machine) {
                    __int128 m = 0, t = 0;
                    for (std::size_t i = 0; i < dv.size(); ++i) {
                        __int128 s = 0;
                        for (std::size_t j = 0; j < n; ++j) s += static_cast<__int128>(dv[i][j]) * v[j];
                        if (i == 0 || s < m) m = s;
                    }
                    for (std::size_t j = 0; j < n; ++j) t += static_cast<__int128>(fv[ui][j]) * v[j];
                    const __int128 dd = fden[ui] * (m + 1) - t;
                    if (dd <= 0) continue;
                    depth = Rational(static_cast<long long>(dd));
                } else {
                    depth = ord(D, v) + 1 - detail::dot(u, std::vector<Int>(v.begin(), v.end()));
                    if (depth <= 0) continue;
                }
                if (best_v.empty() || depth > best) {
                    best = depth;
                    best_v = v;
                }
            }
            if (best_v.empty())
                settled.insert(u);
            else
                found.insert(best_v);
        }
        if (found.empty()) break;
        for (auto& v : found) add(v);
    }
    res.dim = res.F.dimension();
    // Report only directions that support the final polytope, plus the
    // facet-based start when F is empty.
    for (auto& v : used) {
        if (res.F.empty()) {
            res.certificate.push_back(v);
            continue;
        }
        if (ord(res.F, v) == ord(D, v) + 1) res.certificate.push_back(v);
    }
    return res;
}

inline constexpr int kNoCanonicalModel = std::numeric_limits<int>::min();

inline int kodaira_dimension(const FineResult& r, std::size_t n) {
    if (r.dim < 0) return kNoCanonicalModel;
    return std::min(r.dim, static_cast<int>(n) - 1);
}

inline int kodaira_dimension(const RationalPolytope& D) { return kodaira_dimension(fine_interior(D), D.ambient); }

// P_m for a one-dimensional Fine interior [-p, q].
inline Int plurigenus(const Rational& p, const Rational& q, std::int64_t m) {
    if (p < 0 || q < 0) throw InvalidInput("segment endpoints must satisfy p, q >= 0");
    if (m < 0) throw InvalidInput("m must be non-negative");
    return floor_rat(p * m) + floor_rat(q * m) + 1;
}

}  // namespace fano_forge
