#pragma once

#include <optional>

namespace expcp {

// Darling-Erdos normalising constants for the likelihood-ratio scan:
//   a(K) = sqrt(2 ln ln K)
//   b(K) = 2 ln ln K + 0.5 ln ln ln K - 0.5 ln pi
// Both require K >= 16 so that ln ln ln K is defined and positive.
inline constexpr int kMinNormalizedSize = 16;

double norm_a(int sample_size);
double norm_b(int sample_size);

/// a(K) * sqrt(lrt) - b(K).
double normalize_lrt(double lrt, int sample_size);

/// Upper-alpha point of the Gumbel-type limit exp(-2 exp(-t)).
double lrt_asymptotic_critical(double alpha);

/// P(sup |B(t)| > q) for a Brownian bridge B (Kolmogorov survival function).
double kolmogorov_survival(double q);

/// Upper-alpha point of sup B(t)^2, i.e. the squared Kolmogorov quantile.
double s_asymptotic_critical(double alpha);

/// Tabulated limit for the trimmed phi-divergence scan (independent of lambda).
/// Only alpha in {0.1, 0.05, 0.01} is stored; anything else throws InputError.
double t_phi_asymptotic_critical(double alpha);

struct AsymptoticCriticalSet {
    double alpha = 0.0;
    std::optional<double> t_phi;  // absent for untabulated alpha
    double lrt_normalized = 0.0;
    double s = 0.0;
};

AsymptoticCriticalSet asymptotic_critical_set(double alpha);

}  // namespace expcp
