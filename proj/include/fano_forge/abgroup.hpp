#pragma once
// Integer normal forms and finite abelian group arithmetic.

#include "arith.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fano_forge {

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (auto& r : init) {
            if (r.size() != cols_) throw InvalidInput("ragged matrix literal");
            for (auto x : r) a_.emplace_back(x);
        }
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
        IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_) throw InvalidInput("ragged matrix");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.cols_ != y.rows_) throw InvalidInput("matrix shape mismatch");
        IntMatrix z(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    void swap_rows(std::size_t i, std::size_t j) {
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
    }
    // row_i += f * row_j
    void add_row(std::size_t i, std::size_t j, const Int& f) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) += f * (*this)(j, c);
    }
    void add_col(std::size_t i, std::size_t j, const Int& f) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) += f * (*this)(r, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
    }

    std::vector<std::vector<std::int64_t>> to_i64() const {
        std::vector<std::vector<std::int64_t>> out(rows_, std::vector<std::int64_t>(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i][j] = fano_forge::to_i64((*this)(i, j));
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? ", [" : "[");
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
            os << ']';
        }
        return os << ']';
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

inline Int determinant(IntMatrix m) {
    // Bareiss fraction-free elimination.
    const std::size_t n = m.rows();
    if (n != m.cols()) throw InvalidInput("determinant of non-square matrix");
    if (n == 0) return 1;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

struct SmithDecomposition {
    IntMatrix U, D, V;  // U * M * V == D
    std::size_t rank = 0;
};

inline SmithDecomposition smith_decomposition(const IntMatrix& M) {
    const std::size_t r = M.rows(), c = M.cols();
    SmithDecomposition s{IntMatrix::identity(r), M, IntMatrix::identity(c), 0};
    IntMatrix& D = s.D;
    const std::size_t lim = std::min(r, c);
    std::size_t t = 0;
    for (; t < lim; ++t) {
        while (true) {
            // Pivot: smallest nonzero absolute value in the trailing block.
            std::size_t pi = r, pj = c;
            Int best = 0;
            for (std::size_t i = t; i < r; ++i)
                for (std::size_t j = t; j < c; ++j) {
                    if (D(i, j) == 0) continue;
                    Int a = abs(D(i, j));
                    if (pi == r || a < best) { best = a; pi = i; pj = j; }
                }
            if (pi == r) goto done;
            if (pi != t) { D.swap_rows(t, pi); s.U.swap_rows(t, pi); }
            if (pj != t) { D.swap_cols(t, pj); s.V.swap_cols(t, pj); }
            bool clean = true;
            for (std::size_t i = t + 1; i < r; ++i) {
                if (D(i, t) == 0) continue;
                Int q = floor_div(D(i, t), D(t, t));
                D.add_row(i, t, -q);
                s.U.add_row(i, t, -q);
                if (D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (D(t, j) == 0) continue;
                Int q = floor_div(D(t, j), D(t, t));
                D.add_col(j, t, -q);
                s.V.add_col(j, t, -q);
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            bool divides = true;
            for (std::size_t i = t + 1; i < r && divides; ++i)
                for (std::size_t j = t + 1; j < c; ++j)
                    if (D(i, j) % D(t, t) != 0) {
                        D.add_row(t, i, 1);
                        s.U.add_row(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (D(t, t) < 0) { D.negate_row(t); s.U.negate_row(t); }
    }
done:
    s.rank = t;
    return s;
}

// Row-style Hermite normal form: H = U * M with U unimodular, H in echelon
// form, positive pivots, entries above each pivot reduced into [0, pivot).
inline IntMatrix hermite_rows(IntMatrix H) {
    const std::size_t r = H.rows(), c = H.cols();
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < r; ++col) {
        while (true) {
            std::size_t p = r;
            Int best = 0;
            for (std::size_t i = row; i < r; ++i) {
                if (H(i, col) == 0) continue;
                Int a = abs(H(i, col));
                if (p == r || a < best) { best = a; p = i; }
            }
            if (p == r) break;
            if (p != row) H.swap_rows(row, p);
            bool clean = true;
            for (std::size_t i = row + 1; i < r; ++i) {
                if (H(i, col) == 0) continue;
                H.add_row(i, row, -floor_div(H(i, col), H(row, col)));
                if (H(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (row < r && H(row, col) != 0) {
            if (H(row, col) < 0) H.negate_row(row);
            for (std::size_t i = 0; i < row; ++i)
                H.add_row(i, row, -floor_div(H(i, col), H(row, col)));
            ++row;
        }
    }
    return H;
}

// Finite abelian group Z/mu_1 x ... x Z/mu_s with mu_s | ... | mu_1.
struct TorsionGroup {
    std::vector<std::int64_t> mu;

    TorsionGroup() = default;
    explicit TorsionGroup(std::vector<std::int64_t> m) : mu(std::move(m)) {
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (mu[i] < 2) throw InvalidInput("invariant factor below 2");
            if (i && mu[i - 1] % mu[i] != 0) throw InvalidInput("invariant factors violate divisibility");
        }
    }
    std::size_t rank() const { return mu.size(); }
    std::int64_t order() const {
        std::int64_t o = 1;
        for (auto m : mu) o *= m;
        return o;
    }
    bool operator==(const TorsionGroup&) const = default;

    // Mixed-radix enumeration of canonical lifts, first coordinate slowest.
    template <class F>
    void for_each_element(F&& f) const {
        std::vector<std::int64_t> e(mu.size(), 0);
        while (true) {
            f(static_cast<const std::vector<std::int64_t>&>(e));
            std::size_t k = mu.size();
            while (k > 0) {
                --k;
                if (++e[k] < mu[k]) break;
                e[k] = 0;
                if (k == 0) return;
            }
            if (mu.empty()) return;
        }
    }
};

struct Cokernel {
    std::size_t free_rank = 0;
    TorsionGroup torsion;
    // (free_rank + s) x rows matrix; free coordinates first, then torsion
    // coordinates in the order of torsion.mu (reduce modulo mu to read lifts).
    IntMatrix projection;
};

// Cokernel of M viewed as the map Z^cols -> Z^rows.
inline Cokernel cokernel(const IntMatrix& M) {
    auto s = smith_decomposition(M);
    const std::size_t r = M.rows();
    std::vector<std::size_t> tors_idx, free_idx;
    for (std::size_t t = 0; t < r; ++t) {
        if (t >= s.rank) free_idx.push_back(t);
        else if (s.D(t, t) != 1) tors_idx.push_back(t);
    }
    std::reverse(tors_idx.begin(), tors_idx.end());  // largest factor first
    Cokernel k;
    k.free_rank = free_idx.size();
    std::vector<std::int64_t> mu;
    for (auto t : tors_idx) mu.push_back(to_i64(s.D(t, t)));
    k.torsion = TorsionGroup(mu);
    k.projection = IntMatrix(free_idx.size() + tors_idx.size(), r);
    std::size_t out = 0;
    for (auto t : free_idx) {
        for (std::size_t j = 0; j < r; ++j) k.projection(out, j) = s.U(t, j);
        ++out;
    }
    for (std::size_t q = 0; q < tors_idx.size(); ++q) {
        for (std::size_t j = 0; j < r; ++j) k.projection(out, j) = mod_floor(s.U(tors_idx[q], j), Int(mu[q]));
        ++out;
    }
    return k;
}

// Do the given columns of (free rows over Z, torsion rows over Gamma)
// generate Z^k x Gamma?  Decided by the Smith form of the presentation.
inline bool columns_generate(const IntMatrix& free_rows, const IntMatrix& tors_rows, const TorsionGroup& g,
                             const std::vector<std::size_t>& cols) {
    const std::size_t k = free_rows.rows(), s = g.rank();
    IntMatrix A(k + s, cols.size() + s);
    for (std::size_t q = 0; q < cols.size(); ++q) {
        for (std::size_t i = 0; i < k; ++i) A(i, q) = free_rows(i, cols[q]);
        for (std::size_t l = 0; l < s; ++l) A(k + l, q) = tors_rows(l, cols[q]);
    }
    for (std::size_t l = 0; l < s; ++l) A(k + l, cols.size() + l) = g.mu[l];
    auto sd = smith_decomposition(A);
    if (sd.rank < k + s) return false;
    for (std::size_t t = 0; t < k + s; ++t)
        if (sd.D(t, t) != 1) return false;
    return true;
}

inline bool columns_almost_free(const IntMatrix& free_rows, const IntMatrix& tors_rows, const TorsionGroup& g) {
    const std::size_t r = free_rows.cols();
    for (std::size_t skip = 0; skip < r; ++skip) {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < r; ++j)
            if (j != skip) cols.push_back(j);
        if (!columns_generate(free_rows, tors_rows, g, cols)) return false;
    }
    return true;
}

// Rows of the result form a basis of the kernel of Z^r -> Z^k x Gamma given
// by the columns; the basis is Hermite-normalized.  Columns of the result are
// the primitive ray generators.
inline IntMatrix lattice_kernel_basis(const IntMatrix& free_rows, const IntMatrix& tors_rows,
                                      const TorsionGroup& g) {
    const std::size_t k = free_rows.rows(), s = g.rank(), r = free_rows.cols();
    if (tors_rows.rows() != s || (s && tors_rows.cols() != r)) throw InvalidInput("torsion block shape mismatch");
    if (!columns_almost_free(free_rows, tors_rows, g)) throw InvalidInput("degree data is not almost free");
    IntMatrix A(k + s, r + s);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < k; ++i) A(i, j) = free_rows(i, j);
        for (std::size_t l = 0; l < s; ++l) A(k + l, j) = tors_rows(l, j);
    }
    for (std::size_t l = 0; l < s; ++l) A(k + l, r + l) = -g.mu[l];
    auto sd = smith_decomposition(A);
    const std::size_t n = r + s - sd.rank;
    IntMatrix basis(n, r);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t j = 0; j < r; ++j) basis(q, j) = sd.V(j, sd.rank + q);
    return hermite_rows(basis);
}

// Automorphism of Gamma as a matrix acting on canonical lifts:
// (A e)_l = sum_m a[l][m] e_m mod mu_l.
struct Automorphism {
    std::size_t s = 0;
    std::vector<std::int64_t> a;  // row-major s x s

    std::int64_t operator()(std::size_t l, std::size_t m) const { return a[l * s + m]; }
    std::vector<std::int64_t> apply(const TorsionGroup& g, const std::vector<std::int64_t>& e) const {
        std::vector<std::int64_t> out(s, 0);
        for (std::size_t l = 0; l < s; ++l) {
            __int128 acc = 0;
            for (std::size_t m = 0; m < s; ++m) acc += static_cast<__int128>(a[l * s + m]) * e[m];
            out[l] = static_cast<std::int64_t>(((acc % g.mu[l]) + g.mu[l]) % g.mu[l]);
        }
        return out;
    }
    bool operator==(const Automorphism&) const = default;
};

namespace detail {

inline bool invertible_mod_p(std::vector<std::int64_t> m, std::size_t n, std::int64_t p) {
    for (auto& x : m) x = mod_floor(x, p);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = n;
        for (std::size_t i = col; i < n; ++i)
            if (m[i * n + col] != 0) { piv = i; break; }
        if (piv == n) return false;
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) std::swap(m[col * n + j], m[piv * n + j]);
        std::int64_t inv = inverse_mod(m[col * n + col], p);
        for (std::size_t i = col + 1; i < n; ++i) {
            std::int64_t f = m[i * n + col] * inv % p;
            if (!f) continue;
            for (std::size_t j = col; j < n; ++j) m[i * n + j] = mod_floor(m[i * n + j] - f * m[col * n + j], p);
        }
    }
    return true;
}

}  // namespace detail

// An endomorphism is bijective iff it induces an isomorphism of Gamma/p
// Gamma for every prime p dividing the order.
inline bool is_automorphism(const TorsionGroup& g, const Automorphism& A) {
    const std::size_t s = g.rank();
    if (s == 0) return true;
    for (auto p : prime_factors(g.mu[0])) {
        std::size_t sp = 0;
        while (sp < s && g.mu[sp] % p == 0) ++sp;
        std::vector<std::int64_t> m(sp * sp);
        for (std::size_t l = 0; l < sp; ++l)
            for (std::size_t q = 0; q < sp; ++q) m[l * sp + q] = A(l, q);
        if (!detail::invertible_mod_p(m, sp, p)) return false;
    }
    return true;
}

// Every automorphism of Gamma exactly once, identity first.
inline std::vector<Automorphism> automorphisms(const TorsionGroup& g, std::int64_t cap = 1'000'000) {
    const std::size_t s = g.rank();
    if (g.order() > cap) throw ResourceError("group order " + std::to_string(g.order()) + " exceeds cap");
    std::vector<Automorphism> out;
    Automorphism id{s, std::vector<std::int64_t>(s * s, 0)};
    for (std::size_t l = 0; l < s; ++l) id.a[l * s + l] = 1;
    out.push_back(id);
    if (s == 0) return out;
    // Entry (l, m) must be a multiple of mu_l / gcd(mu_l, mu_m) so that the
    // image of e_m has order dividing mu_m.
    std::vector<std::int64_t> step(s * s), count(s * s);
    double total = 1;
    for (std::size_t l = 0; l < s; ++l)
        for (std::size_t m = 0; m < s; ++m) {
            std::int64_t gg = std::gcd(g.mu[l], g.mu[m]);
            step[l * s + m] = g.mu[l] / gg;
            count[l * s + m] = gg;
            total *= static_cast<double>(gg);
        }
    if (total > 50.0 * static_cast<double>(cap)) throw ResourceError("automorphism candidate space too large");
    std::vector<std::int64_t> idx(s * s, 0);
    Automorphism A{s, std::vector<std::int64_t>(s * s, 0)};
    while (true) {
        for (std::size_t q = 0; q < s * s; ++q) A.a[q] = idx[q] * step[q];
        if (A != id && is_automorphism(g, A)) out.push_back(A);
        std::size_t q = s * s;
        while (q > 0) {
            --q;
            if (++idx[q] < count[q]) break;
            idx[q] = 0;
            if (q == 0) return out;
        }
    }
}

// Automorphism of Z x Gamma fixing the free coordinate:
// (x, gamma) -> (x, x*delta + A(gamma)).
struct FreeTorsionAutomorphism {
    std::vector<std::int64_t> delta;
    Automorphism A;

    std::vector<std::int64_t> apply(const TorsionGroup& g, std::int64_t x, const std::vector<std::int64_t>& e) const {
        auto out = A.apply(g, e);
        for (std::size_t l = 0; l < out.size(); ++l)
            out[l] = mod_floor(out[l] + mod_floor(x, g.mu[l]) * delta[l], g.mu[l]);
        return out;
    }
};

}  // namespace fano_forge
