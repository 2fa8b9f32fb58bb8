#pragma once
// Integer age criterion for fake weighted projective spaces, and an
// independent lattice-point oracle on the reconstructed simplex.

#include "degmat.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fano_forge {

enum class SingularityClass { Terminal, CanonicalStrict, NonCanonical };

enum class Mode { Canonical, Terminal };

inline const char* to_string(SingularityClass c) {
    switch (c) {
        case SingularityClass::Terminal: return "terminal";
        case SingularityClass::CanonicalStrict: return "canonical_strict";
        default: return "non_canonical";
    }
}

inline const char* to_string(Mode m) { return m == Mode::Terminal ? "terminal" : "canonical"; }

inline bool accepted(SingularityClass c, Mode m) {
    return c == SingularityClass::Terminal || (m == Mode::Canonical && c == SingularityClass::CanonicalStrict);
}

// R_ij(c, b) with b given by its numerators b_l / mu_l.
inline std::int64_t r_value(const DegreeMatrix& Q, std::size_t i, std::size_t j, std::int64_t c,
                            const std::vector<std::int64_t>& b) {
    if (i == j || i >= Q.cols() || j >= Q.cols()) throw InvalidInput("bad column indices");
    if (c < 0 || c >= Q.w[i]) throw InvalidInput("c out of range");
    if (b.size() != Q.rows.size()) throw InvalidInput("b has wrong length");
    const std::int64_t mu1 = Q.rows.empty() ? 1 : Q.rows[0].mu;
    bool zero = c == 0;
    for (std::size_t l = 0; l < b.size(); ++l) {
        if (b[l] < 0 || b[l] >= Q.rows[l].mu) throw InvalidInput("b out of range");
        zero = zero && b[l] == 0;
    }
    if (zero) throw InvalidInput("(c, b) must be nonzero");
    const __int128 M = static_cast<__int128>(mu1) * Q.w[i];
    __int128 v = static_cast<__int128>(mu1) * Q.w[j] * c;
    for (std::size_t l = 0; l < b.size(); ++l) {
        const auto& r = Q.rows[l];
        __int128 coef = static_cast<__int128>(Q.w[i]) * r.eta[j] - static_cast<__int128>(Q.w[j]) * r.eta[i];
        v += coef * b[l] * (mu1 / r.mu);
    }
    v %= M;
    if (v < 0) v += M;
    return static_cast<std::int64_t>(v);
}

namespace detail {

// Scans all (i, c, b).  Returns the class; in terminal mode stops at the first
// age-one element, in either mode at the first age below one.
inline SingularityClass age_scan(const DegreeMatrix& Q, bool stop_on_equality) {
    const std::size_t r = Q.cols(), s = Q.rows.size();
    const std::int64_t mu1 = s ? Q.rows[0].mu : 1;
    for (std::size_t l = 0; l < s; ++l)
        if (mu1 % Q.rows[l].mu != 0) throw InvalidInput("torsion moduli violate divisibility");
    bool equality = false;
    std::vector<std::int64_t> cc(r), val(r), base(r), b(s);
    std::vector<std::int64_t> bc(r * (s ? s : 1));
    for (std::size_t i = 0; i < r; ++i) {
        const std::int64_t wi = Q.w[i];
        const __int128 M128 = static_cast<__int128>(mu1) * wi;
        if (M128 > (static_cast<__int128>(1) << 60) / static_cast<__int128>(r))
            throw ResourceError("age sums exceed 64-bit range for " + Q.str());
        const std::int64_t M = static_cast<std::int64_t>(M128);
        for (std::size_t j = 0; j < r; ++j) {
            cc[j] = static_cast<std::int64_t>((static_cast<__int128>(mu1) * Q.w[j]) % M);
            for (std::size_t l = 0; l < s; ++l) {
                const auto& row = Q.rows[l];
                __int128 coef = static_cast<__int128>(wi) * row.eta[j] - static_cast<__int128>(Q.w[j]) * row.eta[i];
                coef = coef * (mu1 / row.mu) % M;
                if (coef < 0) coef += M;
                bc[j * s + l] = static_cast<std::int64_t>(coef);
            }
            base[j] = 0;
        }
        std::fill(b.begin(), b.end(), 0);
        // b in mixed radix (outer), c inner.
        while (true) {
            for (std::size_t j = 0; j < r; ++j) val[j] = base[j];
            bool bzero = true;
            for (auto x : b) bzero = bzero && x == 0;
            for (std::int64_t c = 0; c < wi; ++c) {
                if (c > 0 || !bzero) {
                    std::int64_t sum = 0;
                    for (std::size_t j = 0; j < r && sum <= M; ++j)
                        if (j != i) sum += val[j];
                    if (sum < M) return SingularityClass::NonCanonical;
                    if (sum == M) {
                        equality = true;
                        if (stop_on_equality) return SingularityClass::CanonicalStrict;
                    }
                }
                for (std::size_t j = 0; j < r; ++j) {
                    val[j] += cc[j];
                    if (val[j] >= M) val[j] -= M;
                }
            }
            std::size_t k = s;
            bool carry_out = true;
            while (k > 0) {
                --k;
                if (++b[k] < Q.rows[k].mu) { carry_out = false; break; }
                b[k] = 0;
            }
            // The lift of b is not periodic in the formula, so rebuild base.
            for (std::size_t j = 0; j < r; ++j) {
                __int128 acc = 0;
                for (std::size_t l = 0; l < s; ++l) acc += static_cast<__int128>(bc[j * s + l]) * b[l];
                base[j] = static_cast<std::int64_t>(acc % M);
            }
            if (carry_out) break;
        }
    }
    return equality ? SingularityClass::CanonicalStrict : SingularityClass::Terminal;
}

}  // namespace detail

inline SingularityClass classify(const DegreeMatrix& Q) {
    if (!well_shaped(Q)) throw InvalidInput("malformed degree matrix " + Q.str());
    return detail::age_scan(Q, false);
}

// Mode test with early exit; same verdict as accepted(classify(Q), m).
inline bool satisfies(const DegreeMatrix& Q, Mode m) {
    auto c = detail::age_scan(Q, m == Mode::Terminal);
    return accepted(c, m);
}

// Classification by exhaustive enumeration of the lattice points of the
// simplex spanned by the columns of P.
inline SingularityClass lattice_point_oracle(const IntMatrix& P) {
    const std::size_t n = P.rows(), r = P.cols();
    if (r != n + 1) throw InvalidInput("oracle expects n+1 vertices in dimension n");
    IntMatrix B(r, r);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) B(i, j) = P(i, j);
    for (std::size_t j = 0; j < r; ++j) B(n, j) = 1;
    Int D = determinant(B);
    if (D == 0) throw InvalidInput("degenerate simplex");
    // adj(B) * B = D * I; barycentric coordinates are adj * (x, 1) / D.
    IntMatrix adj(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            IntMatrix minor(r - 1, r - 1);
            for (std::size_t a = 0, ma = 0; a < r; ++a) {
                if (a == j) continue;
                for (std::size_t bb = 0, mb = 0; bb < r; ++bb) {
                    if (bb == i) continue;
                    minor(ma, mb++) = B(a, bb);
                }
                ++ma;
            }
            Int cof = determinant(minor);
            adj(i, j) = ((i + j) % 2) ? Int(-cof) : cof;
        }
    if (D < 0) {
        D = -D;
        for (std::size_t i = 0; i < r; ++i) adj.negate_row(i);
    }
    // Origin must be interior.
    for (std::size_t j = 0; j < r; ++j)
        if (adj(j, n) <= 0) throw InvalidInput("origin is not interior to the simplex");
    std::vector<std::vector<std::int64_t>> A(r, std::vector<std::int64_t>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) A[i][j] = to_i64(adj(i, j));
    const std::int64_t Dv = to_i64(D);
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = hi[i] = to_i64(P(i, 0));
        for (std::size_t j = 1; j < r; ++j) {
            lo[i] = std::min(lo[i], to_i64(P(i, j)));
            hi[i] = std::max(hi[i], to_i64(P(i, j)));
        }
    }
    bool boundary = false;
    std::vector<std::int64_t> x(n, 0), part(r);
    // Iterate over the first n-1 coordinates; solve for the last.
    for (std::size_t i = 0; i + 1 < n; ++i) x[i] = lo[i];
    while (true) {
        std::int64_t tlo = lo[n - 1], thi = hi[n - 1];
        for (std::size_t j = 0; j < r; ++j) {
            __int128 a = A[j][n];
            for (std::size_t i = 0; i + 1 < n; ++i) a += static_cast<__int128>(A[j][i]) * x[i];
            part[j] = static_cast<std::int64_t>(a);
            const std::int64_t cj = A[j][n - 1];
            // a + cj * t >= 0
            if (cj > 0) {
                // t >= ceil(-a / cj)
                __int128 num = -a;
                __int128 q = num / cj;
                if (num % cj != 0 && num > 0) ++q;
                tlo = std::max<std::int64_t>(tlo, static_cast<std::int64_t>(q));
            } else if (cj < 0) {
                // t <= floor(a / -cj)
                __int128 den = -cj;
                __int128 q = a / den;
                if (a % den != 0 && a < 0) --q;
                thi = std::min<std::int64_t>(thi, static_cast<std::int64_t>(q));
            } else if (a < 0) {
                tlo = 1;
                thi = 0;
            }
        }
        for (std::int64_t t = tlo; t <= thi; ++t) {
            x[n - 1] = t;
            bool origin = true;
            for (auto v : x) origin = origin && v == 0;
            if (origin) continue;
            int zeros = 0, ones = 0;
            for (std::size_t j = 0; j < r; ++j) {
                __int128 bj = static_cast<__int128>(part[j]) + static_cast<__int128>(A[j][n - 1]) * t;
                if (bj == 0) ++zeros;
                if (bj == Dv) ++ones;
            }
            if (zeros == 0) return SingularityClass::NonCanonical;
            if (!(ones == 1 && zeros == static_cast<int>(n))) boundary = true;
        }
        std::size_t k = n - 1;
        bool done = true;
        while (k > 0) {
            --k;
            if (++x[k] <= hi[k]) { done = false; break; }
            x[k] = lo[k];
        }
        if (done) break;
    }
    return boundary ? SingularityClass::CanonicalStrict : SingularityClass::Terminal;
}

}  // namespace fano_forge
