#pragma once
// Random almost-free degree matrices for property tests.

#include "support.hpp"

namespace testing_support {

// Sorted weights in [1, wmax] with every n-subset coprime.
inline WeightVector random_weights(std::size_t n, std::int64_t wmax) {
    while (true) {
        WeightVector w(n + 1);
        for (auto& x : w) x = uniform(1, wmax);
        std::sort(w.begin(), w.end());
        if (validate_weight_vector(w)) return w;
    }
}

// Up to max_rows torsion rows forming a divisibility chain; retries until
// the matrix is almost free.
inline DegreeMatrix random_degree_matrix(std::size_t n, std::int64_t wmax, std::size_t max_rows, std::int64_t mu_max) {
    while (true) {
        DegreeMatrix Q{random_weights(n, wmax), {}};
        std::size_t s = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(max_rows)));
        std::int64_t mu = uniform(2, mu_max);
        for (std::size_t l = 0; l < s; ++l) {
            if (l) {
                std::vector<std::int64_t> divs;
                for (std::int64_t d = 2; d <= mu; ++d)
                    if (mu % d == 0) divs.push_back(d);
                mu = divs[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(divs.size()) - 1))];
            }
            TorsionRow row{mu, std::vector<std::int64_t>(n + 1)};
            for (auto& e : row.eta) e = uniform(0, mu - 1);
            Q.rows.push_back(row);
        }
        if (is_almost_free(Q)) return Q;
    }
}

}  // namespace testing_support
