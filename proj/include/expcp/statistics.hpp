#pragma once

// Scan statistics for a single change in the rate of an exponential sequence.
//
// Every statistic is a maximum over candidate split points k of a per-split
// discrepancy between the fitted rate of X_1..X_k, the fitted rate of
// X_{k+1}..X_K and (for LRT and S) the pooled rate. All of them depend on the
// data only through the head/tail means, which are computed once per sample.

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "expcp/sample.hpp"

namespace expcp {

enum class StatKind { PhiFamily, Lrt, LrtNormalized, S };

/// Which statistic to compute. lambda and epsilon are only meaningful for the
/// phi-divergence family and are zero otherwise.
struct StatisticSpec {
    StatKind kind = StatKind::Lrt;
    double lambda = 0.0;
    double epsilon = 0.0;

    static StatisticSpec phi(double lambda, double epsilon = 0.05);
    static StatisticSpec lrt() { return {StatKind::Lrt, 0.0, 0.0}; }
    static StatisticSpec lrt_normalized() { return {StatKind::LrtNormalized, 0.0, 0.0}; }
    static StatisticSpec s() { return {StatKind::S, 0.0, 0.0}; }

    /// Throws InputError unless lambda is in [-1, 0] and epsilon in (0, 0.5)
    /// for the phi family, or both are zero for the other kinds.
    void validate() const;

    /// Short human-readable label, e.g. "t-phi(lambda=-0.5,eps=0.05)" or "s".
    std::string label() const;

    friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;
    friend bool operator<(const StatisticSpec& a, const StatisticSpec& b);
};

/// CLI / file token for a statistic kind: "t-phi", "lrt", "lrt-norm", "s".
std::string kind_token(StatKind kind);
StatKind parse_kind_token(const std::string& token);

/// Head and tail means for every split of one sample.
class PrefixMeans {
public:
    explicit PrefixMeans(const Sample& sample);

    int size() const noexcept { return static_cast<int>(head_.size()); }
    /// Mean of X_1..X_k, k in 1..K.
    double head(int k) const { return head_[k - 1]; }
    /// Mean of X_{k+1}..X_K, k in 1..K-1.
    double tail(int k) const { return tail_[k - 1]; }
    double grand() const noexcept { return head_.back(); }

    std::span<const double> head_means() const noexcept { return head_; }
    std::span<const double> tail_means() const noexcept { return tail_; }

private:
    std::vector<double> head_;
    std::vector<double> tail_;
};

PrefixMeans prefix_means(const Sample& sample);

struct ScanPoint {
    int k = 0;
    double value = 0.0;
};

struct ScanResult {
    std::vector<ScanPoint> per_k;
    int k_hat = 0;
    double max_value = 0.0;
};

/// Inclusive range of split indices scanned by a statistic.
struct ScanRange {
    int first = 1;
    int last = 0;
    bool empty() const noexcept { return last < first; }
};

/// N(eps) = {k in 1..K-1 : eps <= k/K <= 1-eps}; empty when K is too small.
ScanRange trimmed_range(int sample_size, double epsilon);
/// Smallest K for which trimmed_range(K, epsilon) is nonempty.
int min_size_for_epsilon(double epsilon);

/// Kullback-Leibler divergence between Exp(theta) and Exp(theta_prime).
double kl_exponential(double theta, double theta_prime);

double phi_family_at_k(const PrefixMeans& means, int k, double lambda);
double lrt_at_k(const PrefixMeans& means, int k);
double s_at_k(const PrefixMeans& means, int k);

ScanResult phi_family_scan(const Sample& sample, double lambda, double epsilon);
ScanResult lrt_scan(const Sample& sample);
ScanResult s_scan(const Sample& sample);

ScanResult evaluate(const Sample& sample, const StatisticSpec& spec);
ScanResult evaluate(const PrefixMeans& means, const StatisticSpec& spec);

/// Maximum only, without materialising the per-k profile. Same value as
/// evaluate(...).max_value.
double evaluate_max(const PrefixMeans& means, const StatisticSpec& spec);

}  // namespace expcp
