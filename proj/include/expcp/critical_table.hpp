#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "expcp/statistics.hpp"

namespace expcp {

struct TableKey {
    StatisticSpec spec;
    int sample_size = 0;
    double alpha = 0.0;

    friend bool operator==(const TableKey&, const TableKey&) = default;
    friend bool operator<(const TableKey& a, const TableKey& b);
};

struct TableEntry {
    double critical_value = 0.0;
    int replications = 0;
    std::uint64_t master_seed = 0;

    friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// Simulated critical values keyed by (statistic, K, alpha). Every entry
/// records the replication count and seed that produced it.
class CriticalValueTable {
public:
    using Entries = std::map<TableKey, TableEntry>;

    /// Throws InputError if the key is already present.
    void insert(const TableKey& key, const TableEntry& entry);
    void insert_or_assign(const TableKey& key, const TableEntry& entry);
    const TableEntry* find(const TableKey& key) const;

    const Entries& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Free-form provenance (tool version, config, ...). Ordered for stable output.
    std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
    const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

    std::vector<std::string>& warnings() noexcept { return warnings_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    friend bool operator==(const CriticalValueTable&, const CriticalValueTable&) = default;

private:
    Entries entries_;
    std::map<std::string, std::string> metadata_;
    std::vector<std::string> warnings_;
};

}  // namespace expcp
