#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"
#include "expcp/statistics.hpp"
#include "oracles.hpp"

using namespace expcp;

namespace {

const std::vector<double> kSmall{1, 1, 2, 2};

std::vector<double> random_sample(std::mt19937_64& rng, int min_k = 2, int max_k = 50) {
    std::uniform_int_distribution<int> len(min_k, max_k);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    const int K = len(rng);
    const int split = std::uniform_int_distribution<int>(1, K - 1)(rng);
    auto x = oracle::exponential_draws(rng, split, rate(rng));
    auto tail = oracle::exponential_draws(rng, K - split, rate(rng));
    x.insert(x.end(), tail.begin(), tail.end());
    return x;
}

std::vector<StatisticSpec> lambda_grid() {
    std::vector<StatisticSpec> out;
    for (int i = 0; i <= 10; ++i) out.push_back(StatisticSpec::phi(-1.0 + 0.1 * i));
    return out;
}

}  // namespace

TEST(Sample, RejectsBadInput) {
    EXPECT_THROW(Sample({1.0}), InputError);
    EXPECT_THROW(Sample({1.0, 0.0}), InputError);
    EXPECT_THROW(Sample({1.0, -2.0}), InputError);
    EXPECT_THROW(Sample({1.0, std::nan("")}), InputError);
    EXPECT_THROW(Sample({1.0, INFINITY}), InputError);
    EXPECT_NO_THROW(Sample({1.0, 3.0}));
}

TEST(Sample, SliceReverseScale) {
    Sample s({1, 2, 3, 4});
    EXPECT_EQ(s.slice(1, 3).size(), 2u);
    EXPECT_DOUBLE_EQ(s.slice(1, 3)[0], 2.0);
    EXPECT_THROW(s.slice(2, 3), InputError);
    EXPECT_DOUBLE_EQ(s.reversed()[0], 4.0);
    EXPECT_DOUBLE_EQ(s.scaled(2.0)[3], 8.0);
    EXPECT_THROW(s.scaled(0.0), InputError);
}

TEST(PrefixMeans, ConstantData) {
    PrefixMeans m(Sample({2.0, 2.0}));
    ASSERT_EQ(m.head_means().size(), 2u);
    EXPECT_DOUBLE_EQ(m.head(1), 2.0);
    EXPECT_DOUBLE_EQ(m.head(2), 2.0);
    ASSERT_EQ(m.tail_means().size(), 1u);
    EXPECT_DOUBLE_EQ(m.tail(1), 2.0);
    EXPECT_DOUBLE_EQ(m.grand(), 2.0);
}

TEST(PrefixMeans, SmallSample) {
    PrefixMeans m{Sample(kSmall)};
    const std::vector<double> head{1, 1, 4.0 / 3, 1.5};
    const std::vector<double> tail{5.0 / 3, 2, 2};
    for (int k = 1; k <= 4; ++k) EXPECT_NEAR(m.head(k), head[k - 1], 1e-15);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(m.tail(k), tail[k - 1], 1e-15);
    EXPECT_DOUBLE_EQ(m.grand(), 1.5);
}

TEST(PrefixMeans, TwoPoints) {
    PrefixMeans m(Sample({1, 3}));
    EXPECT_DOUBLE_EQ(m.head(1), 1.0);
    EXPECT_DOUBLE_EQ(m.head(2), 2.0);
    EXPECT_DOUBLE_EQ(m.tail(1), 3.0);
    EXPECT_DOUBLE_EQ(m.grand(), 2.0);
}

TEST(PrefixMeans, MatchesDirectMeans) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        auto x = random_sample(rng, 2, 200);
        PrefixMeans m{Sample(x)};
        const int K = static_cast<int>(x.size());
        for (int k = 1; k < K; ++k) {
            EXPECT_NEAR(m.head(k), oracle::mean(x, 0, k), 1e-12 * m.head(k));
            EXPECT_NEAR(m.tail(k), oracle::mean(x, k, K), 1e-12 * m.tail(k));
        }
    }
}

TEST(KlExponential, Values) {
    EXPECT_EQ(kl_exponential(3.0, 3.0), 0.0);
    EXPECT_NEAR(kl_exponential(1.0, std::exp(1.0)), std::exp(1.0) - 2.0, 1e-14);
    EXPECT_NEAR(kl_exponential(2.0, 1.0), std::log(2.0) - 0.5, 1e-14);
    EXPECT_THROW(kl_exponential(0.0, 1.0), InputError);
    EXPECT_THROW(kl_exponential(1.0, -1.0), InputError);
}

TEST(PhiFamily, SmallSampleBranches) {
    PrefixMeans m{Sample(kSmall)};
    EXPECT_NEAR(phi_family_at_k(m, 2, 0.0), 2 * (std::log(2.0) - 0.5), 1e-14);
    EXPECT_NEAR(phi_family_at_k(m, 2, 0.0), 0.3862944, 1e-7);
    EXPECT_NEAR(phi_family_at_k(m, 2, -1.0), 0.6137056, 1e-7);
    EXPECT_NEAR(phi_family_at_k(m, 2, -0.5), oracle::phi_naive(kSmall, 2, -0.5), 1e-13);
    EXPECT_THROW(phi_family_at_k(m, 0, -0.5), InputError);
    EXPECT_THROW(phi_family_at_k(m, 4, -0.5), InputError);
    EXPECT_THROW(phi_family_at_k(m, 2, 0.5), InputError);
}

TEST(PhiFamily, ConstantSampleIsZero) {
    Sample c(std::vector<double>(40, 1.7));
    for (const auto& spec : lambda_grid()) {
        auto r = evaluate(c, spec);
        EXPECT_EQ(r.max_value, 0.0);
        for (const auto& p : r.per_k) EXPECT_EQ(p.value, 0.0);
    }
}

TEST(PhiFamily, MatchesNaiveFormula) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(-1.0, 0.0);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng);
        PrefixMeans m{Sample(x)};
        double l = lam(rng);
        if (rep % 10 == 0) l = 0.0;
        if (rep % 10 == 1) l = -1.0;
        for (int k = 1; k < static_cast<int>(x.size()); ++k) {
            const double want = oracle::phi_naive(x, k, l);
            EXPECT_NEAR(phi_family_at_k(m, k, l), want, 1e-9 * (1.0 + std::abs(want)));
        }
    }
}

TEST(TrimmedRange, Examples) {
    auto r = trimmed_range(40, 0.05);
    EXPECT_EQ(r.first, 2);
    EXPECT_EQ(r.last, 38);
    r = trimmed_range(19, 0.05);
    EXPECT_EQ(r.first, 1);
    EXPECT_EQ(r.last, 18);
    r = trimmed_range(100, 0.05);
    EXPECT_EQ(r.first, 5);
    EXPECT_EQ(r.last, 95);
}

TEST(TrimmedRange, MatchesBruteForceMembership) {
    for (double eps : {0.01, 0.05, 0.1, 0.125, 0.2, 0.25, 0.3, 0.45, 0.49}) {
        for (int K = 2; K <= 600; ++K) {
            const auto want = oracle::trimmed_set(K, eps);
            const auto r = trimmed_range(K, eps);
            if (want.empty()) {
                EXPECT_TRUE(r.empty()) << "K=" << K << " eps=" << eps;
                continue;
            }
            ASSERT_FALSE(r.empty()) << "K=" << K << " eps=" << eps;
            EXPECT_EQ(r.first, want.front()) << "K=" << K << " eps=" << eps;
            EXPECT_EQ(r.last, want.back()) << "K=" << K << " eps=" << eps;
            EXPECT_EQ(r.last - r.first + 1, static_cast<int>(want.size()));
        }
    }
}

TEST(TrimmedRange, MinimumSize) {
    for (double eps : {0.05, 0.2, 0.3, 0.45}) {
        const int k0 = min_size_for_epsilon(eps);
        for (int K = k0; K < k0 + 200; ++K) EXPECT_FALSE(trimmed_range(K, eps).empty());
    }
}

TEST(PhiScan, EmptyRangeNamesMinimumK) {
    Sample tiny({1.0, 2.0, 3.0});
    try {
        phi_family_scan(tiny, -0.5, 0.45);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        const std::string want = "K >= " + std::to_string(min_size_for_epsilon(0.45));
        EXPECT_NE(std::string(e.what()).find(want), std::string::npos) << e.what();
    }
}

TEST(PhiScan, CoversExactlyTrimmedRange) {
    std::mt19937_64 rng(5);
    auto x = oracle::exponential_draws(rng, 40);
    auto r = phi_family_scan(Sample(x), -0.3, 0.05);
    ASSERT_EQ(r.per_k.size(), 37u);
    EXPECT_EQ(r.per_k.front().k, 2);
    EXPECT_EQ(r.per_k.back().k, 38);
}

TEST(Lrt, SmallSample) {
    auto r = lrt_scan(Sample(kSmall));
    ASSERT_EQ(r.per_k.size(), 3u);
    EXPECT_NEAR(r.per_k[0].value, 0.1787671, 1e-7);
    EXPECT_NEAR(r.per_k[1].value, 0.4711321, 1e-7);
    EXPECT_NEAR(r.per_k[2].value, 0.1313341, 1e-7);
    EXPECT_NEAR(r.max_value, 0.4711322, 1e-6);
    EXPECT_EQ(r.k_hat, 2);
    for (int k = 1; k <= 3; ++k)
        EXPECT_NEAR(r.per_k[k - 1].value, oracle::lrt_density_product(kSmall, k), 1e-12);
}

TEST(Lrt, ConstantIsZero) {
    auto r = lrt_scan(Sample(std::vector<double>(30, 0.4)));
    EXPECT_EQ(r.max_value, 0.0);
    EXPECT_EQ(r.k_hat, 1);
}

TEST(Lrt, DensityProductOracle) {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
        auto x = random_sample(rng);
        auto r = lrt_scan(Sample(x));
        for (const auto& p : r.per_k)
            EXPECT_NEAR(p.value, oracle::lrt_density_product(x, p.k), 1e-10);
    }
}

TEST(S, SmallSample) {
    auto r = s_scan(Sample(kSmall));
    ASSERT_EQ(r.per_k.size(), 3u);
    EXPECT_NEAR(r.per_k[0].value, 0.03351884, 1e-8);
    EXPECT_NEAR(r.per_k[1].value, 0.11778304, 1e-8);
    EXPECT_NEAR(r.per_k[2].value, 0.02462514, 1e-8);
    EXPECT_EQ(r.k_hat, 2);
    EXPECT_NEAR(s_scan(Sample({2, 2, 1, 1})).max_value, r.max_value, 1e-15);
}

TEST(S, DualFormsAgree) {
    std::mt19937_64 rng(202);
    for (int rep = 0; rep < 1000; ++rep) {
        auto x = random_sample(rng);
        auto r = s_scan(Sample(x));
        for (const auto& p : r.per_k) {
            EXPECT_NEAR(p.value, oracle::s_divergence_form(x, p.k), 1e-10);
            EXPECT_NEAR(p.value, oracle::s_log_form(x, p.k), 1e-10);
        }
    }
}

TEST(Evaluate, Dispatch) {
    Sample s(kSmall);
    EXPECT_NEAR(evaluate(s, StatisticSpec::lrt()).max_value, 0.4711321, 1e-7);
    EXPECT_NEAR(evaluate(s, StatisticSpec::s()).max_value, 0.1177830, 1e-7);
    EXPECT_EQ(evaluate(Sample(std::vector<double>(40, 1.0)), StatisticSpec::phi(0.0)).max_value, 0.0);
}

TEST(Evaluate, NormalizedLrtKeepsRawProfile) {
    std::mt19937_64 rng(3);
    Sample x(oracle::exponential_draws(rng, 100));
    auto raw = evaluate(x, StatisticSpec::lrt());
    auto norm = evaluate(x, StatisticSpec::lrt_normalized());
    ASSERT_EQ(raw.per_k.size(), norm.per_k.size());
    for (std::size_t i = 0; i < raw.per_k.size(); ++i) EXPECT_EQ(raw.per_k[i].value, norm.per_k[i].value);
    EXPECT_EQ(raw.k_hat, norm.k_hat);
    EXPECT_NEAR(norm.max_value, normalize_lrt(raw.max_value, 100), 1e-12);
    EXPECT_THROW(evaluate(Sample(std::vector<double>(15, 1.0)), StatisticSpec::lrt_normalized()),
                 InputError);
}

TEST(Evaluate, MaxOnlyMatchesProfile) {
    std::mt19937_64 rng(9);
    std::vector<StatisticSpec> specs = lambda_grid();
    specs.push_back(StatisticSpec::lrt());
    specs.push_back(StatisticSpec::lrt_normalized());
    specs.push_back(StatisticSpec::s());
    for (int rep = 0; rep < 100; ++rep) {
        auto x = random_sample(rng, 20, 120);
        PrefixMeans m{Sample(x)};
        for (const auto& spec : specs) EXPECT_EQ(evaluate_max(m, spec), evaluate(m, spec).max_value);
    }
}

TEST(Evaluate, KHatIsSmallestArgmax) {
    // Symmetric data makes k=1 and k=3 tie for the largest LRT term.
    auto r = lrt_scan(Sample({1, 3, 3, 1}));
    double best = 0.0;
    for (const auto& p : r.per_k) best = std::max(best, p.value);
    for (const auto& p : r.per_k) {
        if (p.value == best) {
            EXPECT_EQ(r.k_hat, p.k);
            break;
        }
    }
}

TEST(Spec, ValidateAndTokens) {
    EXPECT_THROW(StatisticSpec::phi(0.1).validate(), InputError);
    EXPECT_THROW(StatisticSpec::phi(-1.1).validate(), InputError);
    EXPECT_THROW(StatisticSpec::phi(-0.5, 0.5).validate(), InputError);
    EXPECT_THROW(StatisticSpec::phi(-0.5, 0.0).validate(), InputError);
    EXPECT_NO_THROW(StatisticSpec::phi(-1.0).validate());
    EXPECT_NO_THROW(StatisticSpec::phi(0.0).validate());
    for (auto kind : {StatKind::PhiFamily, StatKind::Lrt, StatKind::LrtNormalized, StatKind::S})
        EXPECT_EQ(parse_kind_token(kind_token(kind)), kind);
    EXPECT_THROW(parse_kind_token("cusum"), InputError);
}

// Property suites: each runs at least 500 randomized cases.

TEST(Properties, ScaleInvariance) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> logc(-6.0, 6.0);
    std::vector<StatisticSpec> specs = lambda_grid();
    specs.push_back(StatisticSpec::lrt());
    specs.push_back(StatisticSpec::s());
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 20, 80);
        Sample s(x);
        Sample scaled = s.scaled(std::exp(logc(rng)));
        for (const auto& spec : specs) {
            auto a = evaluate(s, spec);
            auto b = evaluate(scaled, spec);
            ASSERT_EQ(a.per_k.size(), b.per_k.size());
            for (std::size_t i = 0; i < a.per_k.size(); ++i)
                EXPECT_NEAR(b.per_k[i].value, a.per_k[i].value, 1e-10 * (1.0 + a.per_k[i].value));
        }
    }
}

TEST(Properties, PhiReversalDuality) {
    std::mt19937_64 rng(1002);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 20, 80);
        Sample s(x);
        Sample rev = s.reversed();
        const int K = static_cast<int>(x.size());
        PrefixMeans ms(s), mr(rev);
        for (int i = 0; i <= 10; ++i) {
            const double l = -1.0 + 0.1 * i;
            const double dual = -1.0 - l;
            for (int k = 1; k < K; ++k) {
                const double a = phi_family_at_k(mr, k, l);
                const double b = phi_family_at_k(ms, K - k, dual);
                EXPECT_NEAR(a, b, 1e-10 * (1.0 + b));
            }
            EXPECT_NEAR(evaluate(rev, StatisticSpec::phi(l)).max_value,
                        evaluate(s, StatisticSpec::phi(dual)).max_value, 1e-10);
        }
    }
}

TEST(Properties, LrtAndSReversalInvariance) {
    std::mt19937_64 rng(1003);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 2, 80);
        Sample s(x);
        Sample rev = s.reversed();
        const int K = static_cast<int>(x.size());
        for (const auto& spec : {StatisticSpec::lrt(), StatisticSpec::s()}) {
            auto a = evaluate(s, spec);
            auto b = evaluate(rev, spec);
            EXPECT_NEAR(a.max_value, b.max_value, 1e-10);
            for (int k = 1; k < K; ++k)
                EXPECT_NEAR(a.per_k[k - 1].value, b.per_k[K - k - 1].value, 1e-10);
        }
    }
}

TEST(Properties, BranchContinuity) {
    // The gap at lambda = -1e-6 is the true derivative times 1e-6, which grows
    // like (log of the mean ratio)^3; splits with a single observation on one
    // side can push it past any fixed bound, so continuity is checked on splits
    // with at least 5 observations per side and accuracy everywhere.
    std::mt19937_64 rng(1004);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 2, 60);
        PrefixMeans m{Sample(x)};
        const int K = static_cast<int>(x.size());
        for (int k = 1; k < K; ++k) {
            const double at0 = phi_family_at_k(m, k, 0.0);
            const double at1 = phi_family_at_k(m, k, -1.0);
            const double near0 = phi_family_at_k(m, k, -1e-6);
            const double near1 = phi_family_at_k(m, k, -1.0 + 1e-6);
            if (k >= 5 && K - k >= 5) {
                EXPECT_NEAR(near0, at0, 1e-4 * std::max(1.0, at0));
                EXPECT_NEAR(near1, at1, 1e-4 * std::max(1.0, at1));
            }
            EXPECT_NEAR(near0, oracle::phi_long_double(x, k, -1e-6), 1e-10 * (1.0 + near0));
            EXPECT_NEAR(near1, oracle::phi_long_double(x, k, -1.0 + 1e-6), 1e-10 * (1.0 + near1));
        }
    }
}

TEST(Properties, BranchLimitsFromOutsideDomain) {
    std::mt19937_64 rng(1005);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 10, 60);
        PrefixMeans m{Sample(x)};
        const int k = static_cast<int>(x.size()) / 2;
        const double at0 = phi_family_at_k(m, k, 0.0);
        const double at1 = phi_family_at_k(m, k, -1.0);
        EXPECT_NEAR(oracle::phi_long_double(x, k, 1e-6), at0, 1e-4 * std::max(1.0, at0));
        EXPECT_NEAR(oracle::phi_long_double(x, k, -1.0 - 1e-6), at1, 1e-4 * std::max(1.0, at1));
    }
}

TEST(Properties, Nonnegativity) {
    std::mt19937_64 rng(1006);
    std::uniform_real_distribution<double> lam(-1.0, 0.0);
    for (int rep = 0; rep < 500; ++rep) {
        auto x = random_sample(rng, 20, 80);
        // Near-constant data stresses cancellation.
        if (rep % 3 == 0)
            for (auto& v : x) v = 1.0 + 1e-13 * v;
        Sample s(x);
        for (const auto& spec : {StatisticSpec::phi(lam(rng)), StatisticSpec::phi(0.0),
                                 StatisticSpec::phi(-1.0), StatisticSpec::lrt(), StatisticSpec::s()}) {
            for (const auto& p : evaluate(s, spec).per_k) EXPECT_GE(p.value, -1e-12);
        }
    }
}
