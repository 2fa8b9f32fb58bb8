#pragma once
// Exact rational polytopes in low dimension: vertex/facet conversion by
// double description, lattice points, and a normal form for linear
// unimodular equivalence.

#include "abgroup.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fano_forge {

using Point = std::vector<Rational>;

// <x, normal> >= offset (or = offset for equations).
struct Halfspace {
    std::vector<Int> normal;
    Rational offset;
    bool operator==(const Halfspace&) const = default;
    auto operator<=>(const Halfspace& o) const {
        if (normal != o.normal) return normal < o.normal ? std::strong_ordering::less : std::strong_ordering::greater;
        if (offset != o.offset) return offset < o.offset ? std::strong_ordering::less : std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

class UnboundedRegion : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

namespace detail {

inline void make_primitive(std::vector<Int>& v) {
    Int g = 0;
    for (auto& x : v) g = gcd(g, abs(x));
    if (g > 1)
        for (auto& x : v) x /= g;
}

inline Int dot(const std::vector<Int>& a, const std::vector<Int>& b) {
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rational dot(const Point& x, const std::vector<Int>& v) {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * Rational(v[i]);
    return s;
}

inline Int lcd(const Point& x) {
    Int l = 1;
    for (auto& c : x) l = lcm(l, Int(boost::multiprecision::denominator(c)));
    return l;
}

// Rank of a list of rational vectors.
inline std::size_t rank_of(std::vector<std::vector<Rational>> m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t p = rank;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[rank]);
        for (std::size_t i = rank + 1; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[rank][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Extreme rays and a lineality basis of {y : <a, y> >= 0 for all rows a}.
struct ConeRays {
    std::vector<std::vector<Int>> rays;
    std::vector<std::vector<Int>> lineality;
};

inline ConeRays cone_rays(const std::vector<std::vector<Int>>& A, std::size_t d) {
    // Zero sets as packed bit rows so the adjacency test is word-parallel.
    using Bits = std::vector<std::uint64_t>;
    struct Ray {
        std::vector<Int> v;
        Bits zero;
    };
    const std::size_t m = A.size(), W = (m + 63) / 64;
    auto set_bit = [](Bits& b, std::size_t j) { b[j / 64] |= std::uint64_t{1} << (j % 64); };
    std::vector<std::vector<Int>> lin;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Int> e(d, 0);
        e[i] = 1;
        lin.push_back(e);
    }
    std::vector<Ray> rays;
    for (std::size_t k = 0; k < m; ++k) {
        const auto& a = A[k];
        std::size_t li = lin.size();
        for (std::size_t i = 0; i < lin.size(); ++i)
            if (dot(a, lin[i]) != 0) { li = i; break; }
        if (li < lin.size()) {
            auto l = lin[li];
            Int al = dot(a, l);
            if (al < 0) {
                for (auto& x : l) x = -x;
                al = -al;
            }
            lin.erase(lin.begin() + static_cast<std::ptrdiff_t>(li));
            for (auto& u : lin) {
                Int au = dot(a, u);
                if (au == 0) continue;
                for (std::size_t j = 0; j < d; ++j) u[j] = al * u[j] - au * l[j];
                make_primitive(u);
            }
            for (auto& r : rays) {
                Int ar = dot(a, r.v);
                if (ar != 0) {
                    for (std::size_t j = 0; j < d; ++j) r.v[j] = al * r.v[j] - ar * l[j];
                    make_primitive(r.v);
                }
                set_bit(r.zero, k);
            }
            Bits z(W, 0);
            for (std::size_t j = 0; j < k; ++j) set_bit(z, j);
            rays.push_back({l, z});
            continue;
        }
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        std::vector<Int> val(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(a, rays[i].v);
            if (val[i] > 0) pos.push_back(i);
            else if (val[i] < 0) neg.push_back(i);
        }
        const std::size_t eff = d - lin.size();
        Bits z(W);
        for (auto p : pos)
            for (auto q : neg) {
                std::size_t cnt = 0;
                for (std::size_t w = 0; w < W; ++w) {
                    z[w] = rays[p].zero[w] & rays[q].zero[w];
                    cnt += static_cast<std::size_t>(std::popcount(z[w]));
                }
                if (cnt + 2 < eff) continue;
                bool adjacent = true;
                for (std::size_t t = 0; t < rays.size() && adjacent; ++t) {
                    if (t == p || t == q) continue;
                    bool contains = true;
                    for (std::size_t w = 0; w < W && contains; ++w)
                        if (z[w] & ~rays[t].zero[w]) contains = false;
                    if (contains) adjacent = false;
                }
                if (!adjacent) continue;
                std::vector<Int> v(d);
                for (std::size_t j = 0; j < d; ++j) v[j] = val[p] * rays[q].v[j] - val[q] * rays[p].v[j];
                make_primitive(v);
                Bits zz = z;
                set_bit(zz, k);
                next.push_back({v, std::move(zz)});
            }
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (val[i] < 0) continue;
            if (val[i] == 0) set_bit(rays[i].zero, k);
            next.push_back(std::move(rays[i]));
        }
        rays = std::move(next);
    }
    ConeRays out;
    for (auto& r : rays) out.rays.push_back(r.v);
    out.lineality = lin;
    return out;
}

}  // namespace detail

class RationalPolytope {
public:
    std::size_t ambient = 0;
    std::vector<Point> vertices;          // sorted, irredundant
    std::vector<Halfspace> halfspaces;    // facets, sorted
    std::vector<Halfspace> equations;     // affine hull, Hermite-reduced

    bool empty() const { return vertices.empty(); }
    // Affine dimension; -1 when empty.
    int dimension() const {
        if (vertices.empty()) return -1;
        return static_cast<int>(ambient) - static_cast<int>(equations.size());
    }

    bool contains(const Point& x) const {
        for (auto& h : equations)
            if (detail::dot(x, h.normal) != h.offset) return false;
        for (auto& h : halfspaces)
            if (detail::dot(x, h.normal) < h.offset) return false;
        return true;
    }

    static RationalPolytope from_vertices(std::size_t n, std::vector<Point> pts);
    // Empty when infeasible; throws UnboundedRegion when unbounded.
    static RationalPolytope from_halfspaces(std::size_t n, const std::vector<Halfspace>& hs);

    bool operator==(const RationalPolytope& o) const {
        return ambient == o.ambient && vertices == o.vertices;
    }
};

inline RationalPolytope RationalPolytope::from_vertices(std::size_t n, std::vector<Point> pts) {
    RationalPolytope P;
    P.ambient = n;
    for (auto& p : pts)
        if (p.size() != n) throw InvalidInput("point of wrong dimension");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) return P;
    // Polar cone of cone{(x, 1)}: rows (L x, L).
    std::vector<std::vector<Int>> A;
    for (auto& p : pts) {
        Int L = detail::lcd(p);
        std::vector<Int> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = boost::multiprecision::numerator(p[i] * Rational(L));
        row[n] = L;
        A.push_back(row);
    }
    auto cr = detail::cone_rays(A, n + 1);
    // Equations from the lineality space, in Hermite form.
    if (!cr.lineality.empty()) {
        IntMatrix Lm(cr.lineality.size(), n + 1);
        for (std::size_t i = 0; i < cr.lineality.size(); ++i)
            for (std::size_t j = 0; j <= n; ++j) Lm(i, j) = cr.lineality[i][j];
        auto H = hermite_rows(Lm);
        for (std::size_t i = 0; i < H.rows(); ++i) {
            std::vector<Int> row(n + 1);
            bool zero = true;
            for (std::size_t j = 0; j <= n; ++j) {
                row[j] = H(i, j);
                if (j < n && row[j] != 0) zero = false;
            }
            if (zero) continue;
            Int g = 0;
            for (std::size_t j = 0; j < n; ++j) g = gcd(g, abs(row[j]));
            Halfspace h;
            h.normal.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
            for (auto& x : h.normal) x /= g;
            // Leading coefficient positive for a unique sign.
            h.offset = Rational(-row[n], g);
            P.equations.push_back(h);
        }
    }
    // Facets: rays projected orthogonally to the lineality space.
    std::vector<std::vector<Rational>> lin_q;
    for (auto& l : cr.lineality) lin_q.emplace_back(l.begin(), l.end());
    // Gram-Schmidt over Q.
    std::vector<std::vector<Rational>> ortho;
    for (auto& l : lin_q) {
        auto u = l;
        for (auto& o : ortho) {
            Rational num = 0, den = 0;
            for (std::size_t j = 0; j <= n; ++j) { num += u[j] * o[j]; den += o[j] * o[j]; }
            for (std::size_t j = 0; j <= n; ++j) u[j] -= num / den * o[j];
        }
        bool nz = false;
        for (auto& x : u) nz = nz || x != 0;
        if (nz) ortho.push_back(u);
    }
    std::set<Halfspace> facets;
    for (auto& r : cr.rays) {
        std::vector<Rational> u(r.begin(), r.end());
        for (auto& o : ortho) {
            Rational num = 0, den = 0;
            for (std::size_t j = 0; j <= n; ++j) { num += u[j] * o[j]; den += o[j] * o[j]; }
            for (std::size_t j = 0; j <= n; ++j) u[j] -= num / den * o[j];
        }
        Int L = 1;
        for (auto& x : u) L = lcm(L, Int(boost::multiprecision::denominator(x)));
        std::vector<Int> row(n + 1);
        for (std::size_t j = 0; j <= n; ++j) row[j] = boost::multiprecision::numerator(u[j] * Rational(L));
        Int g = 0;
        for (std::size_t j = 0; j < n; ++j) g = gcd(g, abs(row[j]));
        if (g == 0) continue;
        Halfspace h;
        h.normal.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
        for (auto& x : h.normal) x /= g;
        h.offset = Rational(-row[n], g);
        bool tight = false;
        for (auto& p : pts)
            if (detail::dot(p, h.normal) == h.offset) { tight = true; break; }
        if (tight) facets.insert(h);
    }
    P.halfspaces.assign(facets.begin(), facets.end());
    // Vertices: points where tight constraints have full rank.
    const std::size_t need = n;
    for (auto& p : pts) {
        std::vector<std::vector<Rational>> rows;
        for (auto& e : P.equations) rows.emplace_back(e.normal.begin(), e.normal.end());
        for (auto& h : P.halfspaces)
            if (detail::dot(p, h.normal) == h.offset) rows.emplace_back(h.normal.begin(), h.normal.end());
        if (detail::rank_of(rows) == need) P.vertices.push_back(p);
    }
    return P;
}

inline RationalPolytope RationalPolytope::from_halfspaces(std::size_t n, const std::vector<Halfspace>& hs) {
    std::vector<std::vector<Int>> A;
    for (auto& h : hs) {
        if (h.normal.size() != n) throw InvalidInput("halfspace of wrong dimension");
        Int L = boost::multiprecision::denominator(h.offset);
        std::vector<Int> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = h.normal[i] * L;
        row[n] = -boost::multiprecision::numerator(h.offset);
        A.push_back(row);
    }
    std::vector<Int> t(n + 1, 0);
    t[n] = 1;
    A.push_back(t);
    auto cr = detail::cone_rays(A, n + 1);
    std::vector<Point> pts;
    bool recession = !cr.lineality.empty();
    for (auto& r : cr.rays) {
        if (r[n] == 0) {
            recession = true;
            continue;
        }
        Point p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = Rational(r[i], r[n]);
        pts.push_back(p);
    }
    if (pts.empty()) {
        RationalPolytope P;
        P.ambient = n;
        return P;
    }
    if (recession) throw UnboundedRegion("halfspace system is unbounded");
    return from_vertices(n, std::move(pts));
}

// ---------------------------------------------------------------------------

// Lattice points of P (relative interior when interior_only), in
// lexicographic order.
inline std::vector<std::vector<std::int64_t>> lattice_points(const RationalPolytope& P, bool interior_only = false) {
    std::vector<std::vector<std::int64_t>> out;
    if (P.empty()) return out;
    const std::size_t n = P.ambient;
    // Integer constraint sum_{j <= k} a_j x_j >= b on a prefix of coordinates.
    struct Cut {
        std::vector<std::int64_t> a;
        __int128 b;
    };
    std::vector<Cut> own;
    auto add_equation = [](std::vector<Cut>& cs, const Halfspace& e) {
        std::vector<std::int64_t> v, nv;
        for (auto& x : e.normal) {
            v.push_back(to_i64(x));
            nv.push_back(-to_i64(x));
        }
        cs.push_back({v, to_i64(ceil_rat(e.offset))});
        cs.push_back({nv, -static_cast<__int128>(to_i64(floor_rat(e.offset)))});
    };
    for (auto& e : P.equations) add_equation(own, e);
    for (auto& h : P.halfspaces) {
        std::vector<std::int64_t> v;
        for (auto& x : h.normal) v.push_back(to_i64(x));
        own.push_back({v, to_i64(interior_only ? floor_rat(h.offset) + 1 : ceil_rat(h.offset))});
    }
    std::vector<std::int64_t> lo(n), hi(n);
    double box = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Rational mn = P.vertices[0][i], mx = mn;
        for (auto& v : P.vertices) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
        }
        lo[i] = to_i64(ceil_rat(mn));
        hi[i] = to_i64(floor_rat(mx));
        if (lo[i] > hi[i]) return out;
        box *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    // level[k] bounds x_k once x_0..x_{k-1} are fixed.  Large boxes use the
    // exact projections of P onto leading coordinates; otherwise the later
    // coordinates are relaxed to the box.
    std::vector<std::vector<Cut>> level(n);
    level[n - 1] = own;
    const bool project = n >= 3 && box > 4096;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (project) {
            std::vector<Point> pts;
            for (auto& v : P.vertices) pts.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k + 1));
            auto Pk = RationalPolytope::from_vertices(k + 1, std::move(pts));
            for (auto& e : Pk.equations) add_equation(level[k], e);
            for (auto& h : Pk.halfspaces) {
                std::vector<std::int64_t> v;
                for (auto& x : h.normal) v.push_back(to_i64(x));
                level[k].push_back({v, to_i64(ceil_rat(h.offset))});
            }
        } else {
            for (auto c : own) {
                for (std::size_t j = k + 1; j < n; ++j)
                    c.b -= std::max(static_cast<__int128>(c.a[j]) * lo[j], static_cast<__int128>(c.a[j]) * hi[j]);
                c.a.resize(k + 1);
                level[k].push_back(std::move(c));
            }
        }
    }
    std::vector<std::int64_t> x(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        __int128 tlo = lo[k], thi = hi[k];
        for (const auto& c : level[k]) {
            __int128 rest = c.b;
            for (std::size_t j = 0; j < k; ++j) rest -= static_cast<__int128>(c.a[j]) * x[j];
            const std::int64_t a = c.a[k];
            if (a > 0) {
                __int128 q = rest / a;
                if (rest % a != 0 && rest > 0) ++q;
                tlo = std::max(tlo, q);
            } else if (a < 0) {
                __int128 num = -rest, den = -a;
                __int128 q = num / den;
                if (num % den != 0 && num < 0) --q;
                thi = std::min(thi, q);
            } else if (rest > 0) {
                return;
            }
        }
        for (__int128 t = tlo; t <= thi; ++t) {
            x[k] = static_cast<std::int64_t>(t);
            if (k + 1 == n)
                out.push_back(x);
            else
                rec(k + 1);
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------
// Normal form up to GL(n, Z) (no translations).

struct UnimodularNormalForm {
    Int scale;                                // lcd of vertex coordinates
    std::size_t rank = 0;                     // dimension of the linear span
    std::vector<std::vector<Int>> columns;    // scaled vertices in span coordinates
    std::string key() const {
        std::ostringstream os;
        os << rank << '|' << scale;
        for (auto& c : columns) {
            os << '|';
            for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        }
        return os.str();
    }
};

namespace detail {

// Integer coordinates of the columns of M in a basis of the saturated lattice
// of their span.
inline std::vector<std::vector<Int>> span_coordinates(const IntMatrix& M, std::size_t& rank) {
    auto sd = smith_decomposition(M);
    rank = sd.rank;
    IntMatrix UM = sd.U * M;
    std::vector<std::vector<Int>> cols(M.cols(), std::vector<Int>(rank));
    for (std::size_t j = 0; j < M.cols(); ++j)
        for (std::size_t i = 0; i < rank; ++i) cols[j][i] = UM(i, j);
    return cols;
}

// Solves T X = Y over Q for square invertible T.
inline std::vector<std::vector<Rational>> solve(const std::vector<std::vector<Rational>>& T,
                                                const std::vector<std::vector<Rational>>& Y) {
    const std::size_t d = T.size(), m = Y[0].size();
    std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d + m));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) a[i][j] = T[i][j];
        for (std::size_t j = 0; j < m; ++j) a[i][d + j] = Y[i][j];
    }
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t p = c;
        while (p < d && a[p][c] == 0) ++p;
        if (p == d) throw InvalidInput("singular system");
        std::swap(a[p], a[c]);
        Rational inv = 1 / a[c][c];
        for (auto& x : a[c]) x *= inv;
        for (std::size_t i = 0; i < d; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j < d + m; ++j) a[i][j] -= f * a[c][j];
        }
    }
    std::vector<std::vector<Rational>> X(d, std::vector<Rational>(m));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < m; ++j) X[i][j] = a[i][d + j];
    return X;
}

inline IntMatrix columns_matrix(const std::vector<std::vector<Int>>& cols, const std::vector<std::size_t>& idx,
                                std::size_t d) {
    IntMatrix M(d, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        for (std::size_t i = 0; i < d; ++i) M(i, j) = cols[idx[j]][i];
    return M;
}

// Compares the first k columns of two d x k Hermite forms, column-major.
inline int compare_columns(const IntMatrix& a, const IntMatrix& b, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (a(i, j) < b(i, j)) return -1;
            if (a(i, j) > b(i, j)) return 1;
        }
    return 0;
}

}  // namespace detail

// For each ordered d-tuple T of independent vertices, the unimodular U with
// U V_T in Hermite form is unique and U V depends only on the orbit; the form
// is the least (Hermite columns, remaining columns sorted) over T.  Tuples are
// grown by branch and bound, since the first k Hermite columns depend only on
// the first k tuple entries.
inline UnimodularNormalForm unimodular_normal_form(const RationalPolytope& P, std::size_t tuple_cap = 5'000'000) {
    UnimodularNormalForm nf;
    nf.scale = 1;
    if (P.empty()) {
        nf.rank = 0;
        nf.scale = 0;
        return nf;
    }
    for (auto& v : P.vertices) nf.scale = lcm(nf.scale, detail::lcd(v));
    const std::size_t n = P.ambient, m = P.vertices.size();
    IntMatrix M(n, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) M(i, j) = boost::multiprecision::numerator(P.vertices[j][i] * Rational(nf.scale));
    std::size_t d = 0;
    auto cols = detail::span_coordinates(M, d);
    nf.rank = d;
    if (d == 0) return nf;
    if (d == 1) {
        // Segment (or point) on a line through the origin: [a, b] or [-b, -a],
        // taking the one whose left end is larger.
        Int a = cols[0][0], b = cols[0][0];
        for (auto& c : cols) {
            a = std::min(a, c[0]);
            b = std::max(b, c[0]);
        }
        if (-b > a) {
            Int t = a;
            a = -b;
            b = -t;
        }
        nf.columns = {{a}};
        if (b != a) nf.columns.push_back({b});
        return nf;
    }
    std::vector<std::vector<std::size_t>> winners;
    IntMatrix best;
    bool have = false;
    std::size_t visited = 0;
    std::vector<std::size_t> tuple;
    std::vector<bool> used(m, false);
    std::function<void()> grow = [&] {
        const std::size_t k = tuple.size();
        if (k == d) {
            winners.push_back(tuple);
            return;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) continue;
            if (++visited > tuple_cap) throw ResourceError("normal form search exceeded its cap");
            tuple.push_back(j);
            auto H = hermite_rows(detail::columns_matrix(cols, tuple, d));
            // Independent iff the new column has a pivot in row k.
            bool indep = H(k, k) != 0;
            if (indep) {
                int c = have ? detail::compare_columns(H, best, k + 1) : -1;
                if (c < 0) {
                    // New best prefix: extend it; the stored best is reset below.
                    IntMatrix full(d, d);
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t jj = 0; jj <= k; ++jj) full(i, jj) = H(i, jj);
                    // Columns beyond k are marked unknown with a large sentinel.
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t jj = k + 1; jj < d; ++jj) full(i, jj) = Int(1) << 4000;
                    best = full;
                    have = true;
                    std::erase_if(winners, [](const auto&) { return true; });
                }
                if (c <= 0) {
                    used[j] = true;
                    grow();
                    used[j] = false;
                }
            }
            tuple.pop_back();
        }
    };
    grow();
    // Among tuples with the least Hermite block, compare the remaining columns.
    std::vector<std::vector<Int>> best_cols;
    for (auto& T : winners) {
        std::vector<std::vector<Rational>> VT(d, std::vector<Rational>(d)), Y(d, std::vector<Rational>(m));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) VT[i][j] = Rational(cols[T[j]][i]);
            for (std::size_t j = 0; j < m; ++j) Y[i][j] = Rational(cols[j][i]);
        }
        auto X = detail::solve(VT, Y);  // V_T^{-1} V
        auto H = hermite_rows(detail::columns_matrix(cols, T, d));
        std::vector<std::vector<Int>> outc;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<Int> c(d);
            for (std::size_t i = 0; i < d; ++i) c[i] = H(i, j);
            outc.push_back(c);
        }
        std::vector<std::vector<Int>> rest;
        for (std::size_t j = 0; j < m; ++j) {
            if (std::find(T.begin(), T.end(), j) != T.end()) continue;
            std::vector<Int> c(d);
            for (std::size_t i = 0; i < d; ++i) {
                Rational s = 0;
                for (std::size_t q = 0; q < d; ++q) s += Rational(H(i, q)) * X[q][j];
                if (boost::multiprecision::denominator(s) != 1) throw InvalidInput("non-integral transform");
                c[i] = boost::multiprecision::numerator(s);
            }
            rest.push_back(c);
        }
        std::sort(rest.begin(), rest.end());
        outc.insert(outc.end(), rest.begin(), rest.end());
        if (best_cols.empty() || outc < best_cols) best_cols = outc;
    }
    nf.columns = best_cols;
    return nf;
}

inline std::string unimodular_key(const RationalPolytope& P) { return unimodular_normal_form(P).key(); }

// Segment through the origin in normal form [-p, q] with p <= q.
inline std::pair<Rational, Rational> segment_normal_form(const RationalPolytope& P) {
    auto nf = unimodular_normal_form(P);
    if (nf.rank != 1) throw InvalidInput("polytope is not a segment through the origin");
    Rational a(nf.columns.front()[0], nf.scale), b(nf.columns.back()[0], nf.scale);
    return {a, b};
}

}  // namespace fano_forge
