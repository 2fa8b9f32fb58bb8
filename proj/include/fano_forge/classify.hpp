#pragma once
// Enumeration of canonical / terminal fake weighted projective spaces:
// weight vectors, torsion rows in normal form, minimality sieve, recursion.

#include "singtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>
#include <vector>

namespace fano_forge {

inline Int sylvester(int i) {
    if (i < 1) throw InvalidInput("Sylvester index starts at 1");
    Int s = 2;
    for (int k = 1; k < i; ++k) s = s * s - s + 1;
    return s;
}

// Weight-sum cap (s_{n+1} - 1)^n.
inline Int weight_sum_cap(int n) {
    Int b = sylvester(n + 1) - 1, out = 1;
    for (int k = 0; k < n; ++k) out *= b;
    return out;
}

// Cap on mu_1 * ... * mu_s: h^{n-1} / (w_1 ... w_n), weights sorted ascending
// so that w_0 is the one left out.
inline std::int64_t torsion_order_cap(const WeightVector& w) {
    const std::size_t n = w.size() - 1;
    Int h = 0, num = 1, den = 1;
    for (auto x : w) h += x;
    for (std::size_t k = 0; k + 1 < n; ++k) num *= h;
    for (std::size_t i = 1; i <= n; ++i) den *= w[i];
    Int q = num / den;
    return q > Int(std::numeric_limits<std::int64_t>::max() / 4) ? std::numeric_limits<std::int64_t>::max() / 4
                                                                 : q.convert_to<std::int64_t>();
}

struct Bounds {
    std::size_t n;
    Int weight_sum_cap;

    explicit Bounds(std::size_t dim) : n(dim), weight_sum_cap(fano_forge::weight_sum_cap(static_cast<int>(dim))) {}
    std::int64_t torsion_cap(const WeightVector& w) const { return torsion_order_cap(w); }
};

// ---------------------------------------------------------------------------
// Weight vectors.
//
// For a torsion-free weight vector with h = sum w and lambda = w / h the age
// test is equivalent to: for k = 2..h-1, sum_i floor(k lambda_i) <= k - 2,
// where in canonical mode the bound may be violated only at levels k with
// k w_i = 0 mod h for some i.  The searches below prune with this criterion
// and confirm every hit with the age test itself.

inline bool weight_level_criterion(const WeightVector& w, Mode mode) {
    std::int64_t h = 0;
    for (auto x : w) h += x;
    for (std::int64_t k = 2; k < h; ++k) {
        std::int64_t f = 0;
        bool boundary = false;
        for (auto x : w) {
            f += static_cast<std::int64_t>(static_cast<__int128>(k) * x / h);
            if (static_cast<__int128>(k) * x % h == 0) boundary = true;
        }
        if (f >= k - 1 && (mode == Mode::Terminal || !boundary)) return false;
    }
    return true;
}

inline bool weight_vector_accepted(const WeightVector& w, Mode mode) {
    if (!validate_weight_vector(w)) return false;
    DegreeMatrix Q{w, {}};
    return satisfies(Q, mode);
}

struct WeightSearchOptions {
    // Stop the exhaustive refinement once this many boxes are alive.
    std::size_t box_budget = 4'000'000;
    // Fallback exhaustive scan of all sums up to this value when the
    // refinement does not close; unset means the fallback is refused.
    std::optional<std::int64_t> max_weight_sum;
    // Extra pruning on a partial assignment (largest weights placed first,
    // descending); return false to cut the branch.
    std::function<bool(const std::vector<std::int64_t>& placed, std::int64_t h)> prune;
    unsigned threads = 1;
};

namespace detail {

// Open Farey cell (a/b, c/d) or the point a/b.
struct FareyCell {
    std::int64_t a, b, c, d;
    bool point;
};

inline std::int64_t lcm_checked(std::int64_t x, std::int64_t y) {
    __int128 l = static_cast<__int128>(x) / std::gcd(x, y) * y;
    if (l > (static_cast<__int128>(1) << 62)) throw ResourceError("weight sum overflow");
    return static_cast<std::int64_t>(l);
}

// Refines the simplex of sorted barycentric coordinates level by level.  At
// level k every open cell is a Farey interval of order at least k, so
// floor(k x) is constant on it and the level-k constraint is exact on boxes.
// A box whose coordinates are all points is a candidate.  Terminates once
// no box is alive; throws if the budget is exceeded.
inline std::vector<WeightVector> farey_weight_search(std::size_t n, Mode mode, std::size_t budget) {
    using Box = std::vector<FareyCell>;
    const std::size_t r = n + 1;
    std::set<WeightVector> found;
    auto emit = [&](const std::vector<std::int64_t>& p, const std::vector<std::int64_t>& q) {
        std::int64_t h = 1;
        for (auto x : q) h = lcm_checked(h, x);
        WeightVector w(r);
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < r; ++i) {
            w[i] = p[i] * (h / q[i]);
            sum += w[i];
        }
        if (sum != h) return;
        if (weight_vector_accepted(w, mode)) found.insert(w);
    };
    std::vector<Box> cur(1, Box(r, FareyCell{0, 1, 1, 1, false}));
    for (std::int64_t k = 2; !cur.empty(); ++k) {
        std::vector<Box> nxt;
        for (const auto& B : cur) {
            std::vector<Box> parts{B};
            for (std::size_t i = 0; i < r; ++i) {
                std::vector<Box> np;
                for (auto& P : parts) {
                    const auto c = P[i];
                    if (!c.point && c.b + c.d == k) {
                        std::int64_t ma = c.a + c.c, mb = c.b + c.d;
                        Box q = P;
                        q[i] = {c.a, c.b, ma, mb, false};
                        np.push_back(q);
                        q[i] = {ma, mb, ma, mb, true};
                        np.push_back(q);
                        q[i] = {ma, mb, c.c, c.d, false};
                        np.push_back(q);
                    } else {
                        np.push_back(P);
                    }
                }
                parts.swap(np);
            }
            for (auto& P : parts) {
                // Sorted coordinates must be feasible: lo(x_i) <= hi(x_{i+1}).
                bool ok = true;
                for (std::size_t i = 0; i + 1 < r && ok; ++i) {
                    const auto& u = P[i];
                    const auto& v = P[i + 1];
                    __int128 l = static_cast<__int128>(u.a) * v.d, rr = static_cast<__int128>(v.c) * u.b;
                    if (l > rr || (l == rr && !(u.point && v.point))) ok = false;
                }
                if (!ok) continue;
                // Coordinates sum to one.
                Rational lo = 0, hi = 0;
                std::size_t open = 0, oi = 0;
                for (std::size_t i = 0; i < r; ++i) {
                    lo += Rational(P[i].a, P[i].b);
                    hi += Rational(P[i].c, P[i].d);
                    if (!P[i].point) { ++open; oi = i; }
                }
                if (open == 0) {
                    if (lo == 1) {
                        std::vector<std::int64_t> p, q;
                        for (auto& c : P) { p.push_back(c.a); q.push_back(c.b); }
                        emit(p, q);
                    }
                    continue;
                }
                if (!(lo < 1 && hi > 1)) continue;
                if (open == 1) {
                    Rational rest = 1;
                    for (std::size_t i = 0; i < r; ++i)
                        if (i != oi) rest -= Rational(P[i].a, P[i].b);
                    const auto& c = P[oi];
                    if (rest > Rational(c.a, c.b) && rest < Rational(c.c, c.d)) {
                        std::vector<std::int64_t> p, q;
                        for (std::size_t i = 0; i < r; ++i) {
                            if (i == oi) {
                                p.push_back(boost::multiprecision::numerator(rest).convert_to<std::int64_t>());
                                q.push_back(boost::multiprecision::denominator(rest).convert_to<std::int64_t>());
                            } else {
                                p.push_back(P[i].a);
                                q.push_back(P[i].b);
                            }
                        }
                        emit(p, q);
                    }
                    continue;
                }
                // Every point of this box has weight sum above k.
                std::int64_t F = 0;
                bool boundary = false;
                for (auto& c : P) {
                    F += k * c.a / c.b;
                    if (c.point && k % c.b == 0) boundary = true;
                }
                if (F >= k || (F >= k - 1 && (mode == Mode::Terminal || !boundary))) continue;
                nxt.push_back(std::move(P));
            }
            if (nxt.size() > budget) throw ResourceError("box refinement exceeded its budget at level " + std::to_string(k));
        }
        cur.swap(nxt);
    }
    return {found.begin(), found.end()};
}

// Exhaustive search over weight vectors with a fixed sum h, largest weight
// first, pruned by the level criterion.  Floors floor(k x / h) come from a
// table so the per-node scans are plain additions.
class FixedSumSearch {
public:
    FixedSumSearch(std::size_t n, Mode mode, std::int64_t h,
                   const std::function<bool(const std::vector<std::int64_t>&, std::int64_t)>* prune)
        : n_(n), mode_(mode), h_(h), prune_(prune) {
        if (h > 46'000) throw ResourceError("weight sum too large for the fixed-sum search");
        const std::size_t H = static_cast<std::size_t>(h);
        table_.resize((H + 1) * H);
        for (std::size_t x = 0; x <= H; ++x)
            for (std::size_t k = 0; k < H; ++k) table_[x * H + k] = static_cast<std::int32_t>(k * x / H);
        F_.assign(H, 0);
        boundary_.assign(H, 0);
    }

    std::vector<WeightVector> run() {
        if (h_ >= static_cast<std::int64_t>(n_ + 1)) dfs(0, h_, h_ / 2 > 0 ? h_ / 2 : 1);
        std::sort(out_.begin(), out_.end());
        return out_;
    }

private:
    std::size_t n_;
    Mode mode_;
    std::int64_t h_;
    const std::function<bool(const std::vector<std::int64_t>&, std::int64_t)>* prune_;
    std::vector<std::int32_t> table_;     // floor(k x / h) at [x * h + k]
    std::vector<std::int32_t> F_;         // sum of floors over placed weights
    std::vector<std::int32_t> boundary_;  // placed weights with k w = 0 mod h
    std::vector<std::int64_t> placed_;
    std::vector<std::int32_t> tight_;
    std::vector<WeightVector> out_;

    const std::int32_t* row(std::int64_t x) const { return table_.data() + x * h_; }

    void place(std::int64_t x, int sign) {
        const std::int32_t* t = row(x);
        for (std::int64_t k = 2; k < h_; ++k) F_[k] += sign * t[k];
        if (mode_ == Mode::Canonical)
            for (std::int64_t k = 2; k < h_; ++k)
                if (k * x % h_ == 0) boundary_[k] += sign;
    }

    // Could some weight <= U still give a boundary point at level k?
    bool boundary_possible(std::int64_t k, std::int64_t U) const {
        if (boundary_[k] > 0) return true;
        return h_ / std::gcd(h_, k) <= U;
    }

    void leaf(std::int64_t rem, std::int64_t U) {
        const bool canonical = mode_ == Mode::Canonical;
        const std::int32_t* tr = row(rem);
        tight_.clear();
        if (!canonical) {
            // Any level already exceeded whatever the split is cuts the node.
            // One branch-free pass: a level already exceeded whatever the
            // split is cuts the node, the tight ones are collected.
            const std::int32_t H = static_cast<std::int32_t>(h_);
            tight_.resize(static_cast<std::size_t>(H));
            std::int32_t over = 0, count = 0;
            for (std::int32_t k = 2; k < H; ++k) {
                const std::int32_t s = F_[k] + tr[k];
                over |= s >= k;
                tight_[count] = k;
                count += s == k - 1;
            }
            if (over) return;
            tight_.resize(static_cast<std::size_t>(count));
        } else {
            for (std::int64_t k = 2; k < h_; ++k) {
                const std::int64_t base = F_[k] + tr[k];
                if (base >= k - 1) {
                    if (boundary_possible(k, U)) { tight_.push_back(static_cast<std::int32_t>(k)); continue; }
                    if (base >= k) return;
                    tight_.push_back(static_cast<std::int32_t>(k));
                }
            }
        }
        const std::int64_t lo = (rem + 1) / 2, hi = std::min(U, rem - 1);
        for (std::int64_t x = hi; x >= lo; --x) {
            const std::int64_t y = rem - x;
            const std::int32_t *tx = row(x), *ty = row(y);
            bool ok = true;
            for (auto k : tight_) {
                if (F_[k] + tx[k] + ty[k] < k - 1) continue;
                bool bd = canonical && (boundary_[k] > 0 || k * x % h_ == 0 || k * y % h_ == 0);
                if (!bd) { ok = false; break; }
            }
            if (!ok) continue;
            WeightVector w(placed_.rbegin(), placed_.rend());
            w.insert(w.begin(), x);
            w.insert(w.begin(), y);
            if (weight_vector_accepted(w, mode_)) out_.push_back(w);
        }
    }

    void dfs(std::size_t depth, std::int64_t rem, std::int64_t U) {
        const std::int64_t m = static_cast<std::int64_t>(n_ + 1 - depth);
        if (prune_ && *prune_ && depth > 0 && !(*prune_)(placed_, h_)) return;
        if (m == 2) {
            leaf(rem, U);
            return;
        }
        const bool canonical = mode_ == Mode::Canonical;
        for (std::int64_t k = 2; k < h_; ++k) {
            const std::int64_t num = k * rem - m * (h_ - 1);
            const std::int64_t lb = num <= 0 ? 0 : (num + h_ - 1) / h_;
            if (F_[k] + lb >= k - 1 && (!canonical || !boundary_possible(k, U))) return;
        }
        std::int64_t lo = (rem + m - 1) / m, hi = std::min(U, rem - (m - 1));
        for (std::int64_t x = hi; x >= lo; --x) {
            placed_.push_back(x);
            place(x, 1);
            dfs(depth + 1, rem - x, x);
            place(x, -1);
            placed_.pop_back();
        }
    }
};

template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i, 0u);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t)
        pool.emplace_back([&, t] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i, t);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    next = count;
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

// All weight vectors with sum in [h_lo, h_hi] passing the age test in mode.
inline std::vector<WeightVector> weight_vectors_by_sum(std::size_t n, Mode mode, std::int64_t h_lo, std::int64_t h_hi,
                                                       const WeightSearchOptions& opt = {}) {
    if (h_hi < h_lo) return {};
    const std::size_t count = static_cast<std::size_t>(h_hi - h_lo + 1);
    std::vector<std::vector<WeightVector>> shards(count);
    // Large sums first so threads finish together.
    detail::parallel_for(count, opt.threads, [&](std::size_t i, unsigned) {
        std::int64_t h = h_hi - static_cast<std::int64_t>(i);
        detail::FixedSumSearch s(n, mode, h, &opt.prune);
        shards[i] = s.run();
    });
    std::vector<WeightVector> out;
    for (auto& s : shards) out.insert(out.end(), s.begin(), s.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Complete list of canonical (terminal) weight vectors of length n+1.
inline std::vector<WeightVector> enumerate_weight_vectors(std::size_t n, Mode mode, const WeightSearchOptions& opt = {}) {
    if (n < 1) throw InvalidInput("dimension must be positive");
    std::vector<WeightVector> out;
    try {
        out = detail::farey_weight_search(n, mode, opt.box_budget);
    } catch (const ResourceError&) {
        if (!opt.max_weight_sum)
            throw ResourceError("weight enumeration in dimension " + std::to_string(n) +
                                " does not close within the box budget; supply a weight list or a weight-sum bound");
        out = weight_vectors_by_sum(n, mode, static_cast<std::int64_t>(n + 1), *opt.max_weight_sum, opt);
    }
    if (opt.max_weight_sum) {
        std::erase_if(out, [&](const WeightVector& w) {
            std::int64_t h = 0;
            for (auto x : w) h += x;
            return h > *opt.max_weight_sum;
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Torsion rows.

// The unique representative of the row-equivalence class of kappa * eta with
// 0 <= eta_i < d_i, by successive choice of the shift m.
inline TorsionRow eta_normal_form(const WeightVector& w, std::int64_t mu, const std::vector<std::int64_t>& eta,
                                  std::int64_t kappa) {
    if (mu < 2) throw InvalidInput("modulus must be at least 2");
    if (std::gcd(mod_floor(kappa, mu), mu) != 1) throw InvalidInput("kappa is not a unit");
    if (eta.size() != w.size()) throw InvalidInput("torsion vector length mismatch");
    TorsionRow out{mu, std::vector<std::int64_t>(w.size())};
    std::int64_t m = 0, step = 1;  // step = mu / g_{i-1}
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::int64_t x = mod_floor(static_cast<std::int64_t>((static_cast<__int128>(kappa) * eta[i] +
                                                                    static_cast<__int128>(m) * w[i]) % mu), mu);
        const std::int64_t A = static_cast<std::int64_t>(static_cast<__int128>(step) * w[i] % mu);
        const std::int64_t d = std::gcd(A, mu);  // = d_i
        const std::int64_t target = x % d;
        if (x != target) {
            // t * A = target - x (mod mu)
            const std::int64_t md = mu / d;
            const std::int64_t rhs = mod_floor((target - x) / d, md);
            const std::int64_t t = md == 1 ? 0 : static_cast<std::int64_t>(static_cast<__int128>(rhs) * inverse_mod((A / d) % md, md) % md);
            m = mod_floor(static_cast<std::int64_t>((static_cast<__int128>(m) + static_cast<__int128>(t) * step) % mu), mu);
        }
        out.eta[i] = target;
        // Next step: mu / g_i where g_i = gcd(mu, w_0..w_i).
        step *= mu / d;
    }
    return out;
}

// Successive divisors d_i = mu g_i / g_{i-1}.
inline std::vector<std::int64_t> normal_form_bounds(const WeightVector& w, std::int64_t mu) {
    std::vector<std::int64_t> d(w.size());
    std::int64_t g_prev = mu;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::int64_t g = std::gcd(g_prev, w[i]);
        d[i] = mu / g_prev * g;
        g_prev = g;
    }
    return d;
}

inline std::vector<std::int64_t> units_mod(std::int64_t mu) {
    std::vector<std::int64_t> u;
    for (std::int64_t k = 1; k < mu; ++k)
        if (std::gcd(k, mu) == 1) u.push_back(k);
    return u;
}

inline bool is_row_minimal(const WeightVector& w, std::int64_t mu, const std::vector<std::int64_t>& eta) {
    auto d = normal_form_bounds(w, mu);
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (eta[i] < 0 || eta[i] >= d[i]) return false;
    for (auto k : units_mod(mu))
        if (eta_normal_form(w, mu, eta, k).eta < eta) return false;
    return true;
}

// Least representative over units kappa (and shifts).
inline TorsionRow row_minimal_form(const WeightVector& w, std::int64_t mu, const std::vector<std::int64_t>& eta) {
    TorsionRow best = eta_normal_form(w, mu, eta, 1);
    for (auto k : units_mod(mu)) {
        auto t = eta_normal_form(w, mu, eta, k);
        if (t.eta < best.eta) best = t;
    }
    return best;
}

struct TorsionSearchOptions {
    // How rows modulo composite mu are produced: lifted from mu/p, searched
    // directly, or whichever looks cheaper.  Results agree.
    enum class Lifting { Auto, Always, Never };
    Lifting lifting = Lifting::Auto;
    std::int64_t max_modulus = 0;  // 0: use the torsion-order cap
    std::int64_t group_cap = 1'000'000;
    std::int64_t orbit_cap = 50'000'000;
};

namespace detail {

inline bool row_passes(const WeightVector& w, const TorsionRow& row, Mode mode) {
    DegreeMatrix Q{w, {row}};
    return satisfies(Q, mode) && is_almost_free_fast(Q);
}

// Row-minimal rows modulo mu by depth-first search over normalized
// coordinates.  Prefixes that some unit already beats are cut.  For every
// chart i already placed, the age sums over placed columns are kept per
// (c, b); at the last column these give, for each (i, c, b), the least value
// the final term must reach, which rejects most candidates in O(1).
class RowSearch {
public:
    RowSearch(const WeightVector& w, std::int64_t mu, Mode mode) : w_(w), mu_(mu), mode_(mode) {
        d_ = normal_form_bounds(w, mu);
        units_ = units_mod(mu);
        const std::size_t r = w.size(), u = units_.size();
        m_.assign((r + 1) * u, 0);
        step_.assign((r + 1) * u, 1);
        state_.assign((r + 1) * u, 0);
        eta_.assign(r, 0);
        off_.assign(r + 1, 0);
        for (std::size_t i = 0; i < r; ++i) {
            if (static_cast<__int128>(mu) * w[i] > (static_cast<__int128>(1) << 56))
                throw ResourceError("torsion search modulus too large");
            off_[i + 1] = off_[i] + static_cast<std::size_t>(w[i] * mu);
        }
        if (off_[r] > 200'000'000) throw ResourceError("torsion search table too large");
        T_.assign(off_[r], 0);
    }

    std::vector<TorsionRow> run() {
        dfs(0);
        return out_;
    }

private:
    struct Deficit {
        std::size_t i;
        std::int64_t c, b, need;
    };

    const WeightVector& w_;
    std::int64_t mu_;
    Mode mode_;
    std::vector<std::int64_t> d_, units_, eta_;
    std::vector<std::int64_t> m_, step_;
    std::vector<int> state_;  // 0 equal so far, 1 greater
    std::vector<std::size_t> off_;
    std::vector<std::int64_t> T_;  // chart i, entry c * mu + b: sum over placed j of R_ij
    std::vector<TorsionRow> out_;

    // Adds sign * R_ij(c, b) to chart i's table for all (c, b).
    void accumulate(std::size_t i, std::size_t j, std::int64_t sign) {
        const std::int64_t M = mu_ * w_[i];
        const std::int64_t cstep = mod_floor(mu_ * w_[j], M);
        const std::int64_t bstep = mod_floor(w_[i] * eta_[j] - w_[j] * eta_[i], M);
        std::int64_t* t = T_.data() + off_[i];
        std::int64_t cv = 0;
        for (std::int64_t c = 0; c < w_[i]; ++c) {
            std::int64_t v = cv;
            for (std::int64_t b = 0; b < mu_; ++b) {
                *t++ += sign * v;
                v += bstep;
                if (v >= M) v -= M;
            }
            cv += cstep;
            if (cv >= M) cv -= M;
        }
    }

    // Unit prefix comparison; returns false when some unit gives a smaller prefix.
    bool advance_units(std::size_t i, std::int64_t v) {
        const std::size_t u = units_.size();
        for (std::size_t q = 0; q < u; ++q) {
            const std::size_t cur = i * u + q, nx = (i + 1) * u + q;
            if (state_[cur] == 1) {
                state_[nx] = 1;
                continue;
            }
            const std::int64_t kappa = units_[q];
            std::int64_t m = m_[cur], step = step_[cur];
            const std::int64_t x = mod_floor(static_cast<std::int64_t>(
                (static_cast<__int128>(kappa) * v + static_cast<__int128>(m) * w_[i]) % mu_), mu_);
            const std::int64_t A = static_cast<std::int64_t>(static_cast<__int128>(step) * w_[i] % mu_);
            const std::int64_t d = std::gcd(A, mu_);
            const std::int64_t target = x % d;
            if (x != target) {
                const std::int64_t md = mu_ / d;
                const std::int64_t rhs = mod_floor((target - x) / d, md);
                const std::int64_t t = md == 1 ? 0 : static_cast<std::int64_t>(static_cast<__int128>(rhs) * inverse_mod((A / d) % md, md) % md);
                m = mod_floor(static_cast<std::int64_t>((static_cast<__int128>(m) + static_cast<__int128>(t) * step) % mu_), mu_);
            }
            if (target < v) return false;
            state_[nx] = target > v ? 1 : 0;
            m_[nx] = m;
            step_[nx] = step * (mu_ / d);
        }
        return true;
    }

    void dfs(std::size_t k) {
        const std::size_t r = w_.size();
        if (k + 1 == r) {
            last_column();
            return;
        }
        for (std::int64_t v = 0; v < d_[k]; ++v) {
            eta_[k] = v;
            if (!advance_units(k, v)) continue;
            for (std::size_t i = 0; i < k; ++i) accumulate(i, k, 1);
            std::fill(T_.begin() + static_cast<std::ptrdiff_t>(off_[k]), T_.begin() + static_cast<std::ptrdiff_t>(off_[k + 1]), 0);
            for (std::size_t j = 0; j < k; ++j) accumulate(k, j, 1);
            dfs(k + 1);
            for (std::size_t i = 0; i < k; ++i) accumulate(i, k, -1);
        }
    }

    void last_column() {
        const std::size_t n = w_.size() - 1;
        const std::int64_t slack = mode_ == Mode::Terminal ? 1 : 0;
        std::vector<Deficit> deficits;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t M = mu_ * w_[i];
            const std::int64_t* t = T_.data() + off_[i];
            for (std::int64_t c = 0; c < w_[i]; ++c)
                for (std::int64_t b = 0; b < mu_; ++b, ++t) {
                    if (c == 0 && b == 0) continue;
                    const std::int64_t need = M - *t + slack;
                    if (need <= 0) continue;
                    if (need > M - 1) return;
                    deficits.push_back({i, c, b, need});
                }
        }
        std::sort(deficits.begin(), deficits.end(), [](const Deficit& a, const Deficit& b) { return a.need > b.need; });
        for (std::int64_t v = 0; v < d_[n]; ++v) {
            eta_[n] = v;
            if (!advance_units(n, v)) continue;
            bool ok = true;
            for (const auto& e : deficits) {
                const std::int64_t M = mu_ * w_[e.i];
                const __int128 val = static_cast<__int128>(mu_) * w_[n] * e.c +
                                     static_cast<__int128>(w_[e.i] * v - w_[n] * eta_[e.i]) * e.b;
                std::int64_t R = static_cast<std::int64_t>(val % M);
                if (R < 0) R += M;
                if (R < e.need) { ok = false; break; }
            }
            if (!ok) continue;
            TorsionRow row{mu_, eta_};
            if (row_passes(w_, row, mode_)) out_.push_back(row);
        }
    }
};

}  // namespace detail

// Row-minimal canonical (terminal) torsion rows for w, grouped by modulus.
// Rows modulo composite mu are lifts of rows modulo mu/p (p the least prime
// factor): reducing a canonical row keeps it canonical and almost free.
inline std::map<std::int64_t, std::vector<TorsionRow>> minimal_torsion_rows_by_modulus(
    const WeightVector& w, Mode mode, const TorsionSearchOptions& opt = {}) {
    std::int64_t cap = opt.max_modulus > 0 ? opt.max_modulus : torsion_order_cap(w);
    std::map<std::int64_t, std::vector<TorsionRow>> by_mu;
    std::map<std::int64_t, std::set<std::vector<std::int64_t>>> index;
    const std::size_t r = w.size();
    for (std::int64_t mu = 2; mu <= cap; ++mu) {
        auto primes = prime_factors(mu);
        std::vector<TorsionRow> rows;
        bool lift = !(primes.size() == 1 && primes[0] == mu) && opt.lifting != TorsionSearchOptions::Lifting::Never;
        if (lift) {
            const auto& par = by_mu[mu / primes[0]];
            if (par.empty()) continue;
            if (opt.lifting == TorsionSearchOptions::Lifting::Auto) {
                // Compare rough work: lifts times a full age test against
                // search leaves, which are cheap.
                double lifts = static_cast<double>(par.size()) * std::pow(static_cast<double>(primes[0]), static_cast<double>(r - 1)) * 16.0;
                double leaves = 1.0;
                for (auto d : normal_form_bounds(w, mu)) leaves *= static_cast<double>(d);
                leaves /= static_cast<double>(units_mod(mu).size());
                lift = lifts < leaves;
            }
        }
        if (!lift) {
            rows = detail::RowSearch(w, mu, mode).run();
        } else {
            const std::int64_t p = primes[0], parent = mu / p;
            const auto& par = by_mu[parent];
            // Other prime quotients must also reduce to known rows.
            std::vector<std::int64_t> others;
            for (auto q : primes)
                if (q != p && mu / q >= 2) others.push_back(q);
            bool others_empty = false;
            for (auto q : others)
                if (by_mu[mu / q].empty()) others_empty = true;
            if (others_empty) continue;
            std::set<std::vector<std::int64_t>> seen;
            std::vector<std::int64_t> t(r, 0), eta(r);
            // Shifting by (mu/p) w moves t along w mod p, so one coordinate
            // where w is a unit mod p can stay zero.
            std::size_t pinned = 0;
            while (pinned < r && w[pinned] % p == 0) ++pinned;
            for (const auto& z : par) {
                std::fill(t.begin(), t.end(), 0);
                while (true) {
                    for (std::size_t i = 0; i < r; ++i) eta[i] = (z.eta[i] + parent * t[i]) % mu;
                    // The age test is invariant on classes, so it runs before
                    // the costlier minimal form.
                    auto nf = eta_normal_form(w, mu, eta, 1);
                    if (detail::row_passes(w, nf, mode)) {
                        auto rm = row_minimal_form(w, mu, nf.eta);
                        if (seen.insert(rm.eta).second) {
                            bool ok = true;
                            for (auto q : others) {
                                const std::int64_t mq = mu / q;
                                std::vector<std::int64_t> red(r);
                                for (std::size_t i = 0; i < r; ++i) red[i] = rm.eta[i] % mq;
                                if (!index[mq].count(row_minimal_form(w, mq, red).eta)) { ok = false; break; }
                            }
                            if (ok) rows.push_back(rm);
                        }
                    }
                    std::size_t k = r;
                    bool done = true;
                    while (k > 0) {
                        --k;
                        if (k == pinned) continue;
                        if (++t[k] < p) { done = false; break; }
                        t[k] = 0;
                    }
                    if (done) break;
                }
            }
        }
        std::sort(rows.begin(), rows.end());
        for (auto& row : rows) index[mu].insert(row.eta);
        if (!rows.empty()) by_mu[mu] = std::move(rows);
    }
    std::erase_if(by_mu, [](const auto& kv) { return kv.second.empty(); });
    return by_mu;
}

inline std::vector<TorsionRow> minimal_torsion_rows(const WeightVector& w, Mode mode, const TorsionSearchOptions& opt = {}) {
    std::vector<TorsionRow> out;
    for (auto& [mu, rows] : minimal_torsion_rows_by_modulus(w, mode, opt)) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

// ---------------------------------------------------------------------------
// Minimality.

// Automorphisms of Gamma are cached per thread.
class AutomorphismCache {
public:
    explicit AutomorphismCache(std::int64_t cap = 1'000'000) : cap_(cap) {}
    const std::vector<Automorphism>& get(const TorsionGroup& g) {
        auto it = cache_.find(g.mu);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(g.mu, automorphisms(g, cap_)).first->second;
    }

private:
    std::int64_t cap_;
    std::map<std::vector<std::int64_t>, std::vector<Automorphism>> cache_;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> weight_preserving_permutations(const WeightVector& w, std::int64_t cap) {
    std::vector<std::size_t> p(w.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
    std::vector<std::vector<std::size_t>> out;
    // Permutations inside blocks of equal weight, in lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t i = 0; i < w.size();) {
        std::size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        blocks.push_back({i, j});
        i = j;
    }
    std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (b == blocks.size()) {
            out.push_back(p);
            if (static_cast<std::int64_t>(out.size()) > cap) throw ResourceError("too many column permutations");
            return;
        }
        auto [lo, hi] = blocks[b];
        std::sort(p.begin() + lo, p.begin() + hi);
        do {
            rec(b + 1);
        } while (std::next_permutation(p.begin() + lo, p.begin() + hi));
        std::sort(p.begin() + lo, p.begin() + hi);
    };
    rec(0);
    return out;
}

// Scans the orbit of Q under Aut(Z x Gamma) and weight-preserving column
// permutations.  For fixed A and permutation, the least choice of delta is the
// row-wise normal form, so the scan runs over A and permutations only.
// Returns the least element, or stops early at the first element below Q.
inline DegreeMatrix orbit_minimum(const DegreeMatrix& Q, AutomorphismCache& cache, std::int64_t orbit_cap,
                                  bool stop_below_input, bool* found_below) {
    if (found_below) *found_below = false;
    if (Q.rows.empty()) return Q;
    const auto g = Q.group();
    const auto& auts = cache.get(g);
    auto perms = weight_preserving_permutations(Q.w, orbit_cap);
    if (static_cast<double>(auts.size()) * static_cast<double>(perms.size()) > static_cast<double>(orbit_cap))
        throw ResourceError("orbit size above cap for " + Q.str());
    const std::size_t r = Q.cols(), s = Q.rows.size();
    DegreeMatrix best = Q;
    for (std::size_t l = 0; l < s; ++l) best.rows[l] = eta_normal_form(Q.w, Q.rows[l].mu, Q.rows[l].eta, 1);
    if (stop_below_input && best < Q) {
        if (found_below) *found_below = true;
        return best;
    }
    std::vector<std::vector<std::int64_t>> cols(r);
    std::vector<std::int64_t> rowbuf(r);
    DegreeMatrix cand = Q;
    for (const auto& A : auts) {
        for (std::size_t i = 0; i < r; ++i) cols[i] = A.apply(g, Q.eta_column(i));
        for (const auto& p : perms) {
            // Compare row by row, stopping once the candidate is larger.
            int cmp = 0;
            for (std::size_t l = 0; l < s && cmp <= 0; ++l) {
                for (std::size_t i = 0; i < r; ++i) rowbuf[i] = cols[p[i]][l];
                cand.rows[l] = eta_normal_form(Q.w, Q.rows[l].mu, rowbuf, 1);
                if (cmp == 0) {
                    if (cand.rows[l].eta < best.rows[l].eta) cmp = -1;
                    else if (cand.rows[l].eta > best.rows[l].eta) cmp = 1;
                }
            }
            if (cmp < 0) {
                best = cand;
                if (stop_below_input) {
                    if (found_below) *found_below = true;
                    return best;
                }
            }
        }
    }
    return best;
}

}  // namespace detail

inline DegreeMatrix minimal_representative(const DegreeMatrix& Q, AutomorphismCache& cache,
                                           std::int64_t orbit_cap = 50'000'000) {
    if (!is_almost_free_fast(Q)) throw InvalidInput("degree matrix is not almost free: " + Q.str());
    return detail::orbit_minimum(Q, cache, orbit_cap, false, nullptr);
}

inline DegreeMatrix minimal_representative(const DegreeMatrix& Q) {
    AutomorphismCache cache;
    return minimal_representative(Q, cache);
}

inline bool is_minimal(const DegreeMatrix& Q, AutomorphismCache& cache, std::int64_t orbit_cap = 50'000'000) {
    bool below = false;
    detail::orbit_minimum(Q, cache, orbit_cap, true, &below);
    return !below;
}

// ---------------------------------------------------------------------------
// The recursion.

struct ClassificationRecord {
    DegreeMatrix Q;
    SingularityClass cls;
    std::size_t depth() const { return Q.rows.size(); }
    bool operator==(const ClassificationRecord&) const = default;
};

struct ClassifyOptions {
    unsigned threads = 1;
    TorsionSearchOptions torsion;
    WeightSearchOptions weights;
};

// All minimal degree matrices of the given weight vector in mode.
inline std::vector<ClassificationRecord> classify_weight_vector(const WeightVector& w, Mode mode,
                                                                const TorsionSearchOptions& opt,
                                                                AutomorphismCache& cache) {
    std::vector<ClassificationRecord> out;
    DegreeMatrix base{w, {}};
    if (!validate_weight_vector(w)) throw InvalidInput("invalid weight vector " + base.str());
    auto cls = classify(base);
    if (!accepted(cls, mode)) return out;
    out.push_back({base, cls});
    const std::size_t n = w.size() - 1;
    const std::int64_t cap = torsion_order_cap(w);
    auto rows = minimal_torsion_rows(w, mode, opt);
    std::vector<DegreeMatrix> level;
    for (const auto& row : rows) {
        DegreeMatrix Q{w, {row}};
        if (is_minimal(Q, cache, opt.orbit_cap)) level.push_back(Q);
    }
    for (std::size_t depth = 1; !level.empty(); ++depth) {
        for (auto& Q : level) out.push_back({Q, classify(Q)});
        if (depth >= n - 1) break;
        std::vector<DegreeMatrix> next;
        for (const auto& Q : level) {
            const std::int64_t last = Q.rows.back().mu, order = Q.torsion_order();
            for (const auto& row : rows) {
                if (last % row.mu != 0 || order * row.mu > cap) continue;
                DegreeMatrix S = Q;
                S.rows.push_back(row);
                if (static_cast<std::int64_t>(S.torsion_order()) > opt.group_cap)
                    throw ResourceError("torsion group above cap for " + S.str());
                if (!is_almost_free_fast(S) || !satisfies(S, mode)) continue;
                if (is_minimal(S, cache, opt.orbit_cap)) next.push_back(S);
            }
        }
        level = std::move(next);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.Q < b.Q; });
    return out;
}

// Classification from a list of weight vectors (already filtered by mode).
// Shards run in parallel; the callback sees each finished shard (in any
// order) and the result is sorted, so output does not depend on threads.
inline std::vector<ClassificationRecord> classify_weight_list(
    const std::vector<WeightVector>& weights, Mode mode, const ClassifyOptions& opt,
    const std::function<void(std::size_t, const std::vector<ClassificationRecord>&)>& on_shard = {},
    const std::function<std::optional<std::vector<ClassificationRecord>>(std::size_t)>& resume = {}) {
    std::vector<std::vector<ClassificationRecord>> shards(weights.size());
    std::mutex cb_mu;
    unsigned threads = std::max(1u, opt.threads);
    std::vector<AutomorphismCache> caches;
    for (unsigned t = 0; t < threads; ++t) caches.emplace_back(opt.torsion.group_cap);
    detail::parallel_for(weights.size(), threads, [&](std::size_t i, unsigned worker) {
        if (resume) {
            if (auto prev = resume(i)) {
                shards[i] = std::move(*prev);
                return;
            }
        }
        shards[i] = classify_weight_vector(weights[i], mode, opt.torsion, caches[worker]);
        if (on_shard) {
            std::lock_guard<std::mutex> lk(cb_mu);
            on_shard(i, shards[i]);
        }
    });
    std::vector<ClassificationRecord> out;
    for (auto& s : shards) out.insert(out.end(), s.begin(), s.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.Q.dim() != b.Q.dim()) return a.Q.dim() < b.Q.dim();
        return a.Q < b.Q;
    });
    return out;
}

inline std::vector<ClassificationRecord> classify_all(std::size_t n, Mode mode, const ClassifyOptions& opt = {}) {
    auto weights = enumerate_weight_vectors(n, mode, opt.weights);
    return classify_weight_list(weights, mode, opt);
}

}  // namespace fano_forge
