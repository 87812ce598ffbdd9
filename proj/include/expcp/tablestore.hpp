#pragma once

// CSV persistence for critical-value tables.
//
//   # expcp critical-value table
//   # format: 1
//   # meta: <key>=<value>        (zero or more, sorted by key)
//   # warning: <text>            (zero or more)
//   stat,lambda,epsilon,K,alpha,critical_value,B,seed
//   t-phi,-0.5,0.050000000000000003,100,0.050000000000000003,9.0232,5000,42
//
// Reals are written with 17 significant digits so read(write(t)) == t.
// lambda/epsilon are blank for statistics other than t-phi.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "expcp/critical_table.hpp"

namespace expcp {

inline constexpr int kTableFormatVersion = 1;
inline constexpr const char* kTableColumns = "stat,lambda,epsilon,K,alpha,critical_value,B,seed";

void write_table(const CriticalValueTable& table, std::ostream& out);
void write_table(const CriticalValueTable& table, const std::filesystem::path& path);

/// Throws FormatError naming the line for malformed rows, duplicate keys or
/// an unsupported format version.
CriticalValueTable read_table(std::istream& in);
CriticalValueTable read_table(const std::filesystem::path& path);

enum class LookupPolicy { Exact, NearestKWarn };

struct LookupResult {
    double critical_value = 0.0;
    TableKey key;  // the entry actually used
    TableEntry entry;
    std::optional<std::string> warning;

    std::string provenance() const;
};

/// Exact (spec, K, alpha) hit, or under NearestKWarn the entry with the same
/// spec and alpha whose K is nearest (ties to the smaller K), with a warning.
/// Throws MissingTableError when nothing qualifies.
LookupResult lookup(const CriticalValueTable& table, const StatisticSpec& spec, int sample_size,
                    double alpha, LookupPolicy policy = LookupPolicy::Exact);

/// 17-significant-digit formatting shared with the report writers.
std::string format_real(double value);

}  // namespace expcp
