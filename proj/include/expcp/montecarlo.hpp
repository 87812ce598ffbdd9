#pragma once

// Seeded Monte Carlo engine for null distributions, critical values, empirical
// sizes and empirical powers.
//
// Replication r always draws its observations from an engine seeded with
// replication_seed(master_seed, r), and results are stored by replication
// index before any sorting or counting. Output is therefore bit-identical for
// any number of worker threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "expcp/critical_table.hpp"
#include "expcp/rng.hpp"
#include "expcp/sample.hpp"
#include "expcp/statistics.hpp"

namespace expcp {

/// Worker threads for a run; 0 means std::thread::hardware_concurrency().
struct Parallelism {
    unsigned threads = 0;
    unsigned resolved() const noexcept;
};

/// n draws X = -ln(U)/theta from the engine, in order.
Sample sample_standard_exponential(Engine& engine, std::size_t n, double theta = 1.0);

struct SimulationPlan {
    std::vector<StatisticSpec> specs;
    std::vector<int> sample_sizes;
    std::vector<double> alphas;
    int replications = 5000;
    std::uint64_t master_seed = 0;

    /// Throws InputError on B < 100, alpha outside (0,1), K < 2, K < 16 with
    /// a normalized LRT, or a phi spec whose scan set is empty for some K.
    void validate() const;
};

/// Default grids: K in {40,...,500}, alpha in {0.1,0.05,0.01}, 11 phi members
/// lambda = -1(0.1)0 with eps = 0.05, then the normalized LRT and S.
std::vector<int> default_critical_sizes();
std::vector<int> default_size_study_sizes();
std::vector<double> default_alphas();
std::vector<StatisticSpec> default_specs(double epsilon = 0.05);

/// Statistic values for B null samples of length K, one vector per spec, each
/// sorted ascending. Every spec sees the same B samples.
std::vector<std::vector<double>> simulate_null_distributions(std::span<const StatisticSpec> specs,
                                                             int sample_size, int replications,
                                                             std::uint64_t master_seed,
                                                             Parallelism par = {});

std::vector<double> simulate_null_distribution(const StatisticSpec& spec, int sample_size,
                                               int replications, std::uint64_t master_seed,
                                               Parallelism par = {});

/// 1-based index ceil((1 - alpha) B) of the upper order statistic used as the
/// critical value.
std::size_t critical_index(double alpha, int replications);

double critical_value_from_sorted(std::span<const double> sorted, double alpha);

CriticalValueTable estimate_critical_values(const SimulationPlan& plan, Parallelism par = {});

enum class Accuracy { Accurate, Liberal, Conservative };

const char* accuracy_token(Accuracy a);

/// Exact binomial check of an empirical size at level 0.01. With F the
/// Binomial(B, alpha) CDF at the observed count: F >= 0.995 is liberal,
/// F <= 0.005 is conservative.
Accuracy binomial_accuracy_test(int rejections, int replications, double alpha_nominal);

struct PowerScenario {
    int sample_size = 0;
    double tau = 0.5;
    double theta0 = 1.0;
    double theta1 = 2.0;

    /// Integer part of tau * K.
    int change_index() const;
    void validate() const;
};

struct StudyCell {
    StatisticSpec spec;
    int sample_size = 0;
    double alpha = 0.0;
    std::optional<PowerScenario> scenario;  // power studies only
    double critical_value = 0.0;
    int rejections = 0;
    int replications = 0;
    std::optional<Accuracy> accuracy;  // size studies only

    double proportion() const noexcept {
        return replications > 0 ? static_cast<double>(rejections) / replications : 0.0;
    }
};

enum class StudyKind { Size, Power };

struct StudyReport {
    StudyKind kind = StudyKind::Size;
    std::vector<StudyCell> cells;
    int replications = 0;
    std::uint64_t seed = 0;
    bool shared_samples = false;
};

struct SizeStudyOptions {
    /// Seed for the fresh H0 samples. Ignored with shared_samples.
    std::uint64_t fresh_seed = 0;
    /// Reuse the table's own seed and B, reproducing its samples exactly.
    bool shared_samples = false;
};

/// Empirical sizes for every (spec, K, alpha) of the plan, using the plan's B
/// (or each entry's B in shared mode). Throws MissingTableError for absent entries.
StudyReport size_study(const CriticalValueTable& table, const SimulationPlan& plan,
                       const SizeStudyOptions& options, Parallelism par = {});

/// Rejection rates when X_1..X_k ~ Exp(theta0) and X_{k+1}..X_K ~ Exp(theta1).
StudyReport power_study(const CriticalValueTable& table, std::span<const PowerScenario> scenarios,
                        std::span<const StatisticSpec> specs, std::span<const double> alphas,
                        int replications, std::uint64_t master_seed, Parallelism par = {});

}  // namespace expcp
