#include "random_degree.hpp"

#include "fano_forge/chart.hpp"

#include <gtest/gtest.h>

using namespace fano_forge;
using namespace testing_support;

namespace {

// Worst class over the charts of the simplex fan.
SingularityClass chart_class(const DegreeMatrix& Q) {
    auto P = simplex(Q);
    auto data = degree_data(P);
    bool equality = false;
    for (std::size_t skip = 0; skip < P.cols(); ++skip) {
        std::vector<std::size_t> sigma;
        for (std::size_t j = 0; j < P.cols(); ++j)
            if (j != skip) sigma.push_back(j);
        auto c = classify_chart(P, data, sigma);
        if (c == SingularityClass::NonCanonical) return c;
        if (c == SingularityClass::CanonicalStrict) equality = true;
    }
    return equality ? SingularityClass::CanonicalStrict : SingularityClass::Terminal;
}

const IntMatrix kExample{{1, 1, -2}, {0, 3, -3}};

}  // namespace

TEST(WorkedExample, LocalGroupsAndAges) {
    auto data = degree_data(kExample);
    EXPECT_EQ(data.gamma.mu, (std::vector<std::int64_t>{3}));
    for (std::size_t skip = 0; skip < 3; ++skip) {
        std::vector<std::size_t> sigma;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != skip) sigma.push_back(j);
        auto H = chart_group(kExample, data, sigma);
        EXPECT_EQ(H.size(), 3u);
        std::multiset<std::vector<Rational>> profiles;
        for (auto& e : H) {
            if (e.is_identity()) continue;
            auto prof = ages(kExample, data, sigma, e);
            EXPECT_EQ(prof.age, 1);
            auto a = prof.alpha;
            std::sort(a.begin(), a.end());
            profiles.insert(a);
        }
        std::vector<Rational> expected{Rational(1, 3), Rational(2, 3)};
        EXPECT_EQ(profiles.count(expected), 2u);
        EXPECT_EQ(classify_chart(kExample, data, sigma), SingularityClass::CanonicalStrict);
    }
}

TEST(WorkedExample, DegreeMatrixView) {
    auto Q = degree_matrix_of(kExample);
    EXPECT_EQ(Q.w, (WeightVector{1, 1, 1}));
    EXPECT_EQ(classify(Q), SingularityClass::CanonicalStrict);
    EXPECT_EQ(lattice_point_oracle(kExample), SingularityClass::CanonicalStrict);
    EXPECT_TRUE(satisfies(Q, Mode::Canonical));
    EXPECT_FALSE(satisfies(Q, Mode::Terminal));
}

TEST(Classify, KnownWeightedSpaces) {
    EXPECT_EQ(classify(DegreeMatrix{{1, 1, 1}, {}}), SingularityClass::Terminal);
    EXPECT_EQ(classify(DegreeMatrix{{1, 1, 2}, {}}), SingularityClass::CanonicalStrict);
    EXPECT_EQ(classify(DegreeMatrix{{1, 2, 3}, {}}), SingularityClass::CanonicalStrict);
    EXPECT_EQ(classify(DegreeMatrix{{1, 1, 3}, {}}), SingularityClass::NonCanonical);
    // Terminal threefolds.
    EXPECT_EQ(classify(DegreeMatrix{{1, 2, 3, 5}, {}}), SingularityClass::Terminal);
    EXPECT_EQ(classify(DegreeMatrix{{3, 4, 5, 7}, {}}), SingularityClass::Terminal);
    EXPECT_EQ(classify(DegreeMatrix{{1, 1, 1, 3}, {}}), SingularityClass::CanonicalStrict);
}

TEST(Classify, AgreesWithLatticePointOracle) {
    int counts[3] = {0, 0, 0};
    for (int t = 0; t < 1500; ++t) {
        std::size_t n = static_cast<std::size_t>(uniform(2, 4));
        auto Q = random_degree_matrix(n, n == 4 ? 5 : 8, n - 1, 6);
        auto c = classify(Q);
        ++counts[static_cast<int>(c)];
        ASSERT_EQ(c, lattice_point_oracle(simplex(Q))) << Q.str();
    }
    // The sample must exercise every class.
    EXPECT_GT(counts[0], 10);
    EXPECT_GT(counts[1], 10);
    EXPECT_GT(counts[2], 10);
}

TEST(Classify, AgreesWithChartAges) {
    for (int t = 0; t < 300; ++t) {
        std::size_t n = static_cast<std::size_t>(uniform(2, 3));
        auto Q = random_degree_matrix(n, 6, n - 1, 5);
        EXPECT_EQ(classify(Q), chart_class(Q)) << Q.str();
    }
}

TEST(Classify, InvariantUnderColumnPermutation) {
    for (int t = 0; t < 300; ++t) {
        std::size_t n = static_cast<std::size_t>(uniform(2, 4));
        auto Q = random_degree_matrix(n, 6, n - 1, 6);
        std::vector<std::size_t> perm(n + 1);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng());
        DegreeMatrix S = Q;
        for (std::size_t j = 0; j <= n; ++j) {
            S.w[j] = Q.w[perm[j]];
            for (std::size_t l = 0; l < Q.rows.size(); ++l) S.rows[l].eta[j] = Q.rows[l].eta[perm[j]];
        }
        EXPECT_EQ(classify(S), classify(Q)) << Q.str();
    }
}

TEST(Classify, TerminalImpliesCanonical) {
    for (int t = 0; t < 500; ++t) {
        auto Q = random_degree_matrix(static_cast<std::size_t>(uniform(2, 4)), 6, 2, 6);
        if (satisfies(Q, Mode::Terminal)) {
            EXPECT_TRUE(satisfies(Q, Mode::Canonical));
        }
        EXPECT_EQ(satisfies(Q, Mode::Canonical), accepted(classify(Q), Mode::Canonical));
        EXPECT_EQ(satisfies(Q, Mode::Terminal), accepted(classify(Q), Mode::Terminal));
    }
}

TEST(RValue, MatchesRationalFormula) {
    // R_ij(c, b) / (mu_1 w_i) is the fractional part of w_j c / w_i plus the
    // torsion contribution, computed here with exact rationals.
    for (int t = 0; t < 200; ++t) {
        auto Q = random_degree_matrix(3, 7, 2, 6);
        const std::int64_t mu1 = Q.rows.empty() ? 1 : Q.rows[0].mu;
        std::size_t i = static_cast<std::size_t>(uniform(0, 3)), j = static_cast<std::size_t>(uniform(0, 2));
        if (j >= i) ++j;
        std::int64_t c = uniform(0, Q.w[i] - 1);
        std::vector<std::int64_t> b;
        bool zero = c == 0;
        for (auto& row : Q.rows) {
            b.push_back(uniform(0, row.mu - 1));
            zero = zero && b.back() == 0;
        }
        if (zero) continue;
        Rational x(Q.w[j] * c, Q.w[i]);
        for (std::size_t l = 0; l < Q.rows.size(); ++l)
            x += Rational(Q.w[i] * Q.rows[l].eta[j] - Q.w[j] * Q.rows[l].eta[i], Q.w[i]) * Rational(b[l], Q.rows[l].mu);
        EXPECT_EQ(Rational(r_value(Q, i, j, c, b), mu1 * Q.w[i]), frac(x));
    }
}

TEST(Chart, RejectsBadCones) {
    EXPECT_THROW(chart_group(kExample, {0}), InvalidInput);
    EXPECT_THROW(chart_group(kExample, {0, 0}), InvalidInput);
}
