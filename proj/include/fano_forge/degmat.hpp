#pragma once
// Degree matrices of fake weighted projective spaces and their Gale duals.

#include "abgroup.hpp"

#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace fano_forge {

using WeightVector = std::vector<std::int64_t>;

struct TorsionRow {
    std::int64_t mu = 0;
    std::vector<std::int64_t> eta;

    auto operator<=>(const TorsionRow&) const = default;
};

// Weight row plus torsion rows, largest modulus first.
struct DegreeMatrix {
    WeightVector w;
    std::vector<TorsionRow> rows;

    std::size_t dim() const { return w.size() - 1; }
    std::size_t cols() const { return w.size(); }
    std::int64_t weight_sum() const {
        std::int64_t h = 0;
        for (auto x : w) h += x;
        return h;
    }
    TorsionGroup group() const {
        std::vector<std::int64_t> mu;
        for (auto& r : rows) mu.push_back(r.mu);
        return TorsionGroup(mu);
    }
    std::int64_t torsion_order() const {
        std::int64_t o = 1;
        for (auto& r : rows) o *= r.mu;
        return o;
    }
    // Lift of column i in Gamma.
    std::vector<std::int64_t> eta_column(std::size_t i) const {
        std::vector<std::int64_t> e;
        for (auto& r : rows) e.push_back(r.eta[i]);
        return e;
    }

    // Records sort by weights, then torsion signature.
    auto operator<=>(const DegreeMatrix& o) const {
        if (auto c = w <=> o.w; c != 0) return c;
        if (auto c = rows.size() <=> o.rows.size(); c != 0) return c;
        for (std::size_t l = 0; l < rows.size(); ++l)
            if (auto c = rows[l].mu <=> o.rows[l].mu; c != 0) return c;
        for (std::size_t l = 0; l < rows.size(); ++l)
            if (auto c = rows[l].eta <=> o.rows[l].eta; c != 0) return c;
        return std::strong_ordering::equal;
    }
    bool operator==(const DegreeMatrix& o) const = default;

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
        os << ')';
        for (auto& r : rows) {
            os << " mod" << r.mu << ":(";
            for (std::size_t i = 0; i < r.eta.size(); ++i) os << (i ? "," : "") << r.eta[i];
            os << ')';
        }
        return os.str();
    }
};

inline IntMatrix weight_block(const DegreeMatrix& Q) {
    IntMatrix m(1, Q.cols());
    for (std::size_t i = 0; i < Q.cols(); ++i) m(0, i) = Q.w[i];
    return m;
}

inline IntMatrix torsion_block(const DegreeMatrix& Q) {
    IntMatrix m(Q.rows.size(), Q.cols());
    for (std::size_t l = 0; l < Q.rows.size(); ++l)
        for (std::size_t i = 0; i < Q.cols(); ++i) m(l, i) = Q.rows[l].eta[i];
    return m;
}

// Shape checks shared by the predicates below.
inline bool well_shaped(const DegreeMatrix& Q) {
    if (Q.w.size() < 2) return false;
    for (auto x : Q.w)
        if (x <= 0) return false;
    for (std::size_t l = 0; l < Q.rows.size(); ++l) {
        const auto& r = Q.rows[l];
        if (r.mu < 2 || r.eta.size() != Q.w.size()) return false;
        if (l && Q.rows[l - 1].mu % r.mu != 0) return false;
        for (auto e : r.eta)
            if (e < 0 || e >= r.mu) return false;
    }
    return true;
}

// Any n of the n+1 columns generate Z x Gamma (Smith form test).
inline bool is_almost_free(const DegreeMatrix& Q) {
    if (!well_shaped(Q)) return false;
    return columns_almost_free(weight_block(Q), torsion_block(Q), Q.group());
}

// Equivalent test used on hot paths: a subgroup S of Z x Gamma with coprime
// free parts is everything iff S + p(Z x Gamma) is everything for each prime
// p dividing |Gamma|; that reduces to ranks over F_p.
inline bool is_almost_free_fast(const DegreeMatrix& Q) {
    const std::size_t r = Q.cols();
    for (std::size_t skip = 0; skip < r; ++skip) {
        std::int64_t g = 0;
        for (std::size_t j = 0; j < r; ++j)
            if (j != skip) g = std::gcd(g, Q.w[j]);
        if (g != 1) return false;
    }
    if (Q.rows.empty()) return true;
    for (auto p : prime_factors(Q.rows[0].mu)) {
        std::size_t sp = 0;
        while (sp < Q.rows.size() && Q.rows[sp].mu % p == 0) ++sp;
        const std::size_t h = sp + 1;
        for (std::size_t skip = 0; skip < r; ++skip) {
            // Rank over F_p of the h x (r-1) matrix.
            std::vector<std::vector<std::int64_t>> m;
            m.reserve(r - 1);
            for (std::size_t j = 0; j < r; ++j) {
                if (j == skip) continue;
                std::vector<std::int64_t> col(h);
                col[0] = mod_floor(Q.w[j], p);
                for (std::size_t l = 0; l < sp; ++l) col[l + 1] = Q.rows[l].eta[j] % p;
                m.push_back(std::move(col));
            }
            std::size_t rank = 0;
            for (std::size_t c = 0; c < h && rank < m.size(); ++c) {
                std::size_t piv = m.size();
                for (std::size_t i = rank; i < m.size(); ++i)
                    if (m[i][c] != 0) { piv = i; break; }
                if (piv == m.size()) continue;
                std::swap(m[rank], m[piv]);
                std::int64_t inv = inverse_mod(m[rank][c], p);
                for (std::size_t i = rank + 1; i < m.size(); ++i) {
                    std::int64_t f = m[i][c] * inv % p;
                    if (!f) continue;
                    for (std::size_t t = c; t < h; ++t) m[i][t] = mod_floor(m[i][t] - f * m[rank][t], p);
                }
                ++rank;
            }
            if (rank < h) return false;
        }
    }
    return true;
}

inline bool validate_weight_vector(const WeightVector& w) {
    if (w.size() < 2) return false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0) return false;
        if (i && w[i - 1] > w[i]) return false;
    }
    for (std::size_t skip = 0; skip < w.size(); ++skip) {
        std::int64_t g = 0;
        for (std::size_t j = 0; j < w.size(); ++j)
            if (j != skip) g = std::gcd(g, w[j]);
        if (g != 1) return false;
    }
    return true;
}

// Generator matrix (n x (n+1)); rows are the Hermite-normalized basis of the
// relation lattice, so equal inputs give identical output.
inline IntMatrix simplex(const DegreeMatrix& Q) {
    if (!well_shaped(Q)) throw InvalidInput("malformed degree matrix " + Q.str());
    return lattice_kernel_basis(weight_block(Q), torsion_block(Q), Q.group());
}

// Degree data read off a generator matrix with one-dimensional free part;
// the column order of P is kept and weights are made positive.
inline DegreeMatrix degree_matrix_of(const IntMatrix& P) {
    auto ck = cokernel(P.transpose());
    if (ck.free_rank != 1) throw InvalidInput("generator matrix does not have Picard number one");
    DegreeMatrix Q;
    const std::size_t r = P.cols();
    Q.w.resize(r);
    for (std::size_t i = 0; i < r; ++i) Q.w[i] = to_i64(ck.projection(0, i));
    bool neg = Q.w[0] < 0;
    for (auto& x : Q.w) {
        if (neg) x = -x;
        if (x <= 0) throw InvalidInput("generator columns do not positively span");
    }
    for (std::size_t l = 0; l < ck.torsion.rank(); ++l) {
        TorsionRow row{ck.torsion.mu[l], std::vector<std::int64_t>(r)};
        for (std::size_t i = 0; i < r; ++i) row.eta[i] = to_i64(mod_floor(ck.projection(1 + l, i), Int(row.mu)));
        Q.rows.push_back(row);
    }
    return Q;
}

}  // namespace fano_forge
