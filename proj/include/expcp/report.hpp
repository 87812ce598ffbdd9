#pragma once

// CSV and Markdown emitters for critical-value tables and study reports.
// Markdown layouts: one row per K grouped
// by alpha, one column per statistic (phi members by lambda, then LRT
// variants and S).

#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "expcp/critical_table.hpp"
#include "expcp/montecarlo.hpp"

namespace expcp {

using Metadata = std::map<std::string, std::string>;

/// Column heading for a statistic: "-0.5" for phi members (with eps when it
/// is not 0.05), "LRT", "~LRT" or "S".
std::string column_label(const StatisticSpec& spec);

/// "1/5" for reciprocals of integers, otherwise the shortest decimal.
std::string format_rate(double theta);

/// Critical values with an "inf" row per alpha from the asymptotic limits.
void write_critical_markdown(const CriticalValueTable& table, std::span<const StatisticSpec> specs,
                             std::span<const int> sizes, std::span<const double> alphas,
                             std::ostream& out);

/// Empirical sizes; cells flagged by the binomial check carry a '*'.
void write_size_markdown(const StudyReport& report, std::ostream& out);

/// One table per (alpha, tau); rows are (K, theta1).
void write_power_markdown(const StudyReport& report, std::ostream& out);

inline constexpr const char* kStudyColumns =
    "study,stat,lambda,epsilon,K,alpha,tau,theta0,theta1,critical_value,rejections,B,proportion,"
    "accuracy";

void write_study_csv(const StudyReport& report, const Metadata& metadata, std::ostream& out);

/// "# key=value" lines, used to echo the resolved configuration into outputs.
void write_metadata_comment(const Metadata& metadata, std::ostream& out, const char* prefix = "# ",
                            const char* suffix = "");

}  // namespace expcp
