#include "expcp/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"

namespace expcp {
namespace {

// Relative differences this small are rounding noise in the means; the true
// divergence there is below 1e-29.
constexpr double kSameMean = 8.0 * std::numeric_limits<double>::epsilon();

// x - 1 - ln x evaluated at x = 1 + d, exact zero when d is rounding noise.
double kl_core(double d) {
    if (std::abs(d) <= kSameMean) return 0.0;
    return std::max(0.0, d - std::log1p(d));
}

// Divergence of the fitted rate 1/part_mean from the pooled rate 1/pooled_mean.
double kl_from_pooled(double part_mean, double pooled_mean) {
    return kl_core((part_mean - pooled_mean) / pooled_mean);
}

void check_split(const PrefixMeans& means, int k) {
    if (k < 1 || k > means.size() - 1) {
        throw InputError("split index " + std::to_string(k) + " outside 1.." +
                         std::to_string(means.size() - 1));
    }
}

template <class Term, class Visit>
void scan(ScanRange range, Term term, Visit visit) {
    for (int k = range.first; k <= range.last; ++k) visit(k, term(k));
}

ScanRange full_range(int sample_size) { return {1, sample_size - 1}; }

ScanRange range_for(const StatisticSpec& spec, int sample_size) {
    if (spec.kind != StatKind::PhiFamily) return full_range(sample_size);
    const ScanRange r = trimmed_range(sample_size, spec.epsilon);
    if (r.empty()) {
        std::ostringstream msg;
        msg << "scan set N(eps) is empty for K=" << sample_size << ", eps=" << spec.epsilon
            << "; use K >= " << min_size_for_epsilon(spec.epsilon);
        throw InputError(msg.str());
    }
    return r;
}

double term_for(const StatisticSpec& spec, const PrefixMeans& means, int k) {
    switch (spec.kind) {
        case StatKind::PhiFamily:
            return phi_family_at_k(means, k, spec.lambda);
        case StatKind::S:
            return s_at_k(means, k);
        case StatKind::Lrt:
        case StatKind::LrtNormalized:
            return lrt_at_k(means, k);
    }
    return 0.0;
}

double finish(const StatisticSpec& spec, double raw_max, int sample_size) {
    if (spec.kind == StatKind::LrtNormalized) return normalize_lrt(raw_max, sample_size);
    return raw_max;
}

}  // namespace

StatisticSpec StatisticSpec::phi(double lambda, double epsilon) {
    return {StatKind::PhiFamily, lambda, epsilon};
}

void StatisticSpec::validate() const {
    if (kind == StatKind::PhiFamily) {
        if (!(lambda >= -1.0 && lambda <= 0.0)) {
            throw InputError("lambda must lie in [-1, 0]");
        }
        if (!(epsilon > 0.0 && epsilon < 0.5)) {
            throw InputError("epsilon must lie in (0, 0.5)");
        }
    } else if (lambda != 0.0 || epsilon != 0.0) {
        throw InputError("lambda/epsilon only apply to the t-phi family");
    }
}

std::string StatisticSpec::label() const {
    if (kind != StatKind::PhiFamily) return kind_token(kind);
    std::ostringstream out;
    out << "t-phi(lambda=" << lambda << ",eps=" << epsilon << ")";
    return out.str();
}

bool operator<(const StatisticSpec& a, const StatisticSpec& b) {
    return std::tie(a.kind, a.lambda, a.epsilon) < std::tie(b.kind, b.lambda, b.epsilon);
}

std::string kind_token(StatKind kind) {
    switch (kind) {
        case StatKind::PhiFamily: return "t-phi";
        case StatKind::Lrt: return "lrt";
        case StatKind::LrtNormalized: return "lrt-norm";
        case StatKind::S: return "s";
    }
    return "?";
}

StatKind parse_kind_token(const std::string& token) {
    if (token == "t-phi") return StatKind::PhiFamily;
    if (token == "lrt") return StatKind::Lrt;
    if (token == "lrt-norm") return StatKind::LrtNormalized;
    if (token == "s") return StatKind::S;
    throw InputError("unknown statistic '" + token + "' (expected t-phi, lrt, lrt-norm or s)");
}

PrefixMeans::PrefixMeans(const Sample& sample) {
    const auto x = sample.values();
    const std::size_t n = x.size();
    head_.resize(n);
    tail_.resize(n - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += x[i];
        head_[i] = sum / static_cast<double>(i + 1);
    }
    // Suffix sums accumulated separately so tail means carry no cancellation
    // from total - prefix.
    double suffix = 0.0;
    for (std::size_t k = n - 1; k >= 1; --k) {
        suffix += x[k];
        tail_[k - 1] = suffix / static_cast<double>(n - k);
    }
}

PrefixMeans prefix_means(const Sample& sample) { return PrefixMeans(sample); }

ScanRange trimmed_range(int sample_size, double epsilon) {
    const double n = static_cast<double>(sample_size);
    // 1e-9 absorbs representation error in eps*K (e.g. 0.05*40) without
    // changing membership for any realistic K.
    const int first = std::max(1, static_cast<int>(std::ceil(epsilon * n - 1e-9)));
    const int last =
        std::min(sample_size - 1, static_cast<int>(std::floor((1.0 - epsilon) * n + 1e-9)));
    return {first, last};
}

int min_size_for_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 0.5)");
    // Beyond 1/(1-2eps) the window [eps K, (1-eps) K] has length >= 1.
    int size = std::max(2, static_cast<int>(std::ceil(1.0 / (1.0 - 2.0 * epsilon))));
    while (size > 2 && !trimmed_range(size - 1, epsilon).empty()) --size;
    return size;
}

double kl_exponential(double theta, double theta_prime) {
    if (!(theta > 0.0 && std::isfinite(theta) && theta_prime > 0.0 && std::isfinite(theta_prime))) {
        throw InputError("exponential rates must be positive and finite");
    }
    return kl_core((theta_prime - theta) / theta);
}

double phi_family_at_k(const PrefixMeans& means, int k, double lambda) {
    check_split(means, k);
    if (!(lambda >= -1.0 && lambda <= 0.0)) throw InputError("lambda must lie in [-1, 0]");
    const int n = means.size();
    double head = means.head(k);
    double tail = means.tail(k);
    if (std::abs(head - tail) <= kSameMean * std::min(head, tail)) return 0.0;
    const double weight = 2.0 * k * static_cast<double>(n - k) / n;
    // The term is unchanged by (head, tail, lambda) -> (tail, head, -1-lambda);
    // the form below is well conditioned for lambda near 0, so fold onto it.
    if (lambda < -0.5) {
        std::swap(head, tail);
        lambda = -1.0 - lambda;
    }
    if (lambda == 0.0) return weight * kl_core((head - tail) / tail);
    // {r^-lambda / (1 + lambda (1 - r)) - 1} with r = head/tail, as one expm1.
    const double r = head / tail;
    const double inner = std::expm1(-lambda * std::log(r) - std::log1p(lambda * (1.0 - r)));
    return std::max(0.0, weight * inner / (lambda * (lambda + 1.0)));
}

double lrt_at_k(const PrefixMeans& means, int k) {
    check_split(means, k);
    const int n = means.size();
    const double g = means.grand();
    return 2.0 * (k * kl_from_pooled(means.head(k), g) +
                  (n - k) * kl_from_pooled(means.tail(k), g));
}

double s_at_k(const PrefixMeans& means, int k) {
    check_split(means, k);
    const double n = means.size();
    const double g = means.grand();
    const double left = k / n;
    const double right = (n - k) / n;
    return 2.0 * k * right *
           (left * kl_from_pooled(means.head(k), g) + right * kl_from_pooled(means.tail(k), g));
}

ScanResult evaluate(const PrefixMeans& means, const StatisticSpec& spec) {
    spec.validate();
    const int n = means.size();
    const ScanRange range = range_for(spec, n);
    ScanResult out;
    out.per_k.reserve(static_cast<std::size_t>(range.last - range.first + 1));
    double best = -1.0;
    scan(range, [&](int k) { return term_for(spec, means, k); },
         [&](int k, double v) {
             out.per_k.push_back({k, v});
             if (v > best) {
                 best = v;
                 out.k_hat = k;
             }
         });
    out.max_value = finish(spec, best, n);
    return out;
}

ScanResult evaluate(const Sample& sample, const StatisticSpec& spec) {
    return evaluate(PrefixMeans(sample), spec);
}

double evaluate_max(const PrefixMeans& means, const StatisticSpec& spec) {
    spec.validate();
    const int n = means.size();
    const ScanRange range = range_for(spec, n);
    double best = 0.0;
    scan(range, [&](int k) { return term_for(spec, means, k); },
         [&](int, double v) { best = std::max(best, v); });
    return finish(spec, best, n);
}

ScanResult phi_family_scan(const Sample& sample, double lambda, double epsilon) {
    return evaluate(sample, StatisticSpec::phi(lambda, epsilon));
}

ScanResult lrt_scan(const Sample& sample) { return evaluate(sample, StatisticSpec::lrt()); }

ScanResult s_scan(const Sample& sample) { return evaluate(sample, StatisticSpec::s()); }

}  // namespace expcp
