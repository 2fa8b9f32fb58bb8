#pragma once
// Local groups of the maximal cones of a simplicial fan and their ages.

#include "singtest.hpp"

#include <cstdint>
#include <vector>

namespace fano_forge {

// Degree data of a generator matrix: free part W (k x r), torsion lifts E
// (s x r) in Gamma.
struct DegreeData {
    IntMatrix W;
    IntMatrix E;
    TorsionGroup gamma;

    std::size_t k() const { return W.rows(); }
    std::size_t r() const { return W.cols(); }
};

inline DegreeData degree_data(const IntMatrix& P) {
    auto ck = cokernel(P.transpose());
    DegreeData d;
    d.gamma = ck.torsion;
    d.W = IntMatrix(ck.free_rank, P.cols());
    d.E = IntMatrix(ck.torsion.rank(), P.cols());
    for (std::size_t j = 0; j < P.cols(); ++j) {
        for (std::size_t i = 0; i < ck.free_rank; ++i) d.W(i, j) = ck.projection(i, j);
        for (std::size_t l = 0; l < ck.torsion.rank(); ++l)
            d.E(l, j) = mod_floor(ck.projection(ck.free_rank + l, j), Int(ck.torsion.mu[l]));
    }
    return d;
}

inline DegreeData degree_data(const DegreeMatrix& Q) {
    return DegreeData{weight_block(Q), torsion_block(Q), Q.group()};
}

struct ChartElement {
    std::vector<Rational> a;      // in [0,1)^k
    std::vector<Rational> b;      // b(eta), in [0,1)^s
    std::vector<Int> c;           // representative of Z^k / im(W_sigma)
    std::vector<std::int64_t> eta;

    bool is_identity() const {
        for (auto& x : a)
            if (x != 0) return false;
        for (auto& x : b)
            if (x != 0) return false;
        return true;
    }
};

struct AgeProfile {
    std::vector<Rational> alpha;
    Rational age;
};

namespace detail {

inline std::vector<std::vector<Rational>> rational_inverse(const IntMatrix& M) {
    const std::size_t n = M.rows();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(M(i, j));
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw InvalidInput("W_sigma is not of full rank");
        std::swap(a[p], a[c]);
        Rational inv = 1 / a[c][c];
        for (auto& x : a[c]) x *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

inline std::vector<std::size_t> complement(std::size_t r, const std::vector<std::size_t>& sigma) {
    std::vector<bool> in(r, false);
    for (auto s : sigma) {
        if (s >= r || in[s]) throw InvalidInput("invalid cone index set");
        in[s] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < r; ++j)
        if (!in[j]) out.push_back(j);
    return out;
}

}  // namespace detail

// Enumerates Z^k/im(W_sigma) x Gamma and maps it through
// (c, eta) -> (W_sigma^{-1}(c - E_sigma b(eta)), b(eta)).
inline std::vector<ChartElement> chart_group(const IntMatrix& P, const DegreeData& Q,
                                             const std::vector<std::size_t>& sigma) {
    const std::size_t r = P.cols(), k = Q.k(), s = Q.gamma.rank();
    if (sigma.size() != P.rows()) throw InvalidInput("cone must have n rays");
    auto out_idx = detail::complement(r, sigma);
    if (out_idx.size() != k) throw InvalidInput("complement size differs from free rank");
    IntMatrix Ws(k, k);
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t q = 0; q < k; ++q) Ws(t, q) = Q.W(q, out_idx[t]);
    if (determinant(Ws) == 0) throw InvalidInput("W_sigma has rank below k");
    auto Winv = detail::rational_inverse(Ws);
    // Representatives of Z^k / im(W_sigma) via Smith form: U Ws V = D.
    auto sd = smith_decomposition(Ws);
    auto Uinv_r = detail::rational_inverse(sd.U);
    std::vector<Int> dvals(k);
    for (std::size_t t = 0; t < k; ++t) dvals[t] = sd.D(t, t);

    std::vector<ChartElement> out;
    std::vector<Int> y(k, 0);
    while (true) {
        std::vector<Int> c(k);
        for (std::size_t t = 0; t < k; ++t) {
            Rational acc = 0;
            for (std::size_t q = 0; q < k; ++q) acc += Uinv_r[t][q] * Rational(y[q]);
            c[t] = boost::multiprecision::numerator(acc);
        }
        Q.gamma.for_each_element([&](const std::vector<std::int64_t>& e) {
            ChartElement el;
            el.c = c;
            el.eta = e;
            el.b.resize(s);
            for (std::size_t l = 0; l < s; ++l) el.b[l] = Rational(e[l], Q.gamma.mu[l]);
            std::vector<Rational> rhs(k);
            for (std::size_t t = 0; t < k; ++t) {
                Rational v(c[t]);
                for (std::size_t l = 0; l < s; ++l) v -= Rational(Q.E(l, out_idx[t])) * el.b[l];
                rhs[t] = v;
            }
            el.a.resize(k);
            for (std::size_t q = 0; q < k; ++q) {
                Rational v = 0;
                for (std::size_t t = 0; t < k; ++t) v += Winv[q][t] * rhs[t];
                el.a[q] = frac(v);
            }
            out.push_back(std::move(el));
        });
        std::size_t t = k;
        bool done = true;
        while (t > 0) {
            --t;
            if (++y[t] < dvals[t]) { done = false; break; }
            y[t] = 0;
        }
        if (done) break;
    }
    return out;
}

inline std::vector<ChartElement> chart_group(const IntMatrix& P, const std::vector<std::size_t>& sigma) {
    return chart_group(P, degree_data(P), sigma);
}

inline AgeProfile ages(const IntMatrix& P, const DegreeData& Q, const std::vector<std::size_t>& sigma,
                       const ChartElement& e) {
    const std::size_t r = P.cols(), k = Q.k(), s = Q.gamma.rank();
    if (e.a.size() != k || e.b.size() != s) throw InvalidInput("chart element has wrong shape");
    auto exponent = [&](std::size_t col) {
        Rational v = 0;
        for (std::size_t q = 0; q < k; ++q) v += Rational(Q.W(q, col)) * e.a[q];
        for (std::size_t l = 0; l < s; ++l) v += Rational(Q.E(l, col)) * e.b[l];
        return frac(v);
    };
    for (auto j : detail::complement(r, sigma))
        if (exponent(j) != 0) throw InvalidInput("element does not stabilize the affine slice");
    AgeProfile prof;
    auto sorted = sigma;
    std::sort(sorted.begin(), sorted.end());
    for (auto j : sorted) {
        prof.alpha.push_back(exponent(j));
        prof.age += prof.alpha.back();
    }
    return prof;
}

inline SingularityClass classify_chart(const IntMatrix& P, const DegreeData& Q, const std::vector<std::size_t>& sigma) {
    bool equality = false;
    for (const auto& e : chart_group(P, Q, sigma)) {
        if (e.is_identity()) continue;
        auto prof = ages(P, Q, sigma, e);
        if (prof.age < 1) return SingularityClass::NonCanonical;
        if (prof.age == 1) equality = true;
    }
    return equality ? SingularityClass::CanonicalStrict : SingularityClass::Terminal;
}

inline SingularityClass classify_chart(const IntMatrix& P, const std::vector<std::size_t>& sigma) {
    return classify_chart(P, degree_data(P), sigma);
}

}  // namespace fano_forge
