#include "expcp/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "expcp/error.hpp"

namespace expcp {
namespace {

void require_normalizable(int sample_size) {
    if (sample_size < kMinNormalizedSize) {
        throw InputError("normalized LRT needs K >= " + std::to_string(kMinNormalizedSize) +
                         " (ln ln ln K undefined), got K=" + std::to_string(sample_size));
    }
}

void require_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("significance level must lie in (0, 1)");
    }
}

// Theta-function form of the Kolmogorov CDF; converges fast for small q where
// the alternating series does not.
double kolmogorov_cdf_small(double q) {
    constexpr double pi = std::numbers::pi;
    const double c = pi * pi / (8.0 * q * q);
    double sum = 0.0;
    for (int j = 1; j < 1000; ++j) {
        const double odd = 2.0 * j - 1.0;
        const double term = std::exp(-odd * odd * c);
        sum += term;
        if (term < 1e-17) break;
    }
    return std::sqrt(2.0 * pi) / q * sum;
}

}  // namespace

double norm_a(int sample_size) {
    require_normalizable(sample_size);
    return std::sqrt(2.0 * std::log(std::log(static_cast<double>(sample_size))));
}

double norm_b(int sample_size) {
    require_normalizable(sample_size);
    const double ll = std::log(std::log(static_cast<double>(sample_size)));
    return 2.0 * ll + 0.5 * std::log(ll) - 0.5 * std::log(std::numbers::pi);
}

double normalize_lrt(double lrt, int sample_size) {
    return norm_a(sample_size) * std::sqrt(std::max(lrt, 0.0)) - norm_b(sample_size);
}

double lrt_asymptotic_critical(double alpha) {
    require_level(alpha);
    return -std::log(-0.5 * std::log1p(-alpha));
}

double kolmogorov_survival(double q) {
    if (q <= 0.0) return 1.0;
    if (q < 1.0) return 1.0 - kolmogorov_cdf_small(q);
    double sum = 0.0;
    for (int j = 1; j < 1000; ++j) {
        const double term = std::exp(-2.0 * j * j * q * q);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return 2.0 * sum;
}

double s_asymptotic_critical(double alpha) {
    require_level(alpha);
    double lo = 0.0;
    double hi = 10.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_survival(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double q = 0.5 * (lo + hi);
    return q * q;
}

double t_phi_asymptotic_critical(double alpha) {
    struct Anchor {
        double alpha;
        double value;
    };
    static constexpr std::array<Anchor, 3> anchors{{{0.1, 8.31}, {0.05, 9.90}, {0.01, 13.45}}};
    for (const auto& a : anchors) {
        if (std::abs(a.alpha - alpha) < 1e-12) return a.value;
    }
    throw InputError("no asymptotic t-phi value stored for alpha=" + std::to_string(alpha) +
                     "; simulate instead");
}

AsymptoticCriticalSet asymptotic_critical_set(double alpha) {
    AsymptoticCriticalSet out;
    out.alpha = alpha;
    out.lrt_normalized = lrt_asymptotic_critical(alpha);
    out.s = s_asymptotic_critical(alpha);
    try {
        out.t_phi = t_phi_asymptotic_critical(alpha);
    } catch (const InputError&) {
        out.t_phi.reset();
    }
    return out;
}

}  // namespace expcp
