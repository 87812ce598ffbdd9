#pragma once

// Multiple change points by recursive binary segmentation: test the whole
// sequence for a single change, split at the estimated location when the test
// rejects, and repeat on both halves. The same alpha is used at every level;
// no multiplicity correction is applied.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expcp/critical_table.hpp"
#include "expcp/montecarlo.hpp"
#include "expcp/sample.hpp"
#include "expcp/statistics.hpp"
#include "expcp/tablestore.hpp"

namespace expcp {

struct SimulationSettings {
    int replications = 5000;
    std::uint64_t seed = 0;
    Parallelism parallelism;
};

/// Supplies critical values per segment length. Looks in a table first; if
/// simulation is enabled, misses are simulated and cached in that table.
class CriticalValueProvider {
public:
    CriticalValueProvider(CriticalValueTable table, LookupPolicy policy,
                          std::optional<SimulationSettings> simulate = std::nullopt);

    static CriticalValueProvider simulating(SimulationSettings settings) {
        return CriticalValueProvider({}, LookupPolicy::Exact, settings);
    }

    struct Answer {
        double value = 0.0;
        std::string provenance;
    };

    /// Throws MissingTableError when the table misses and simulation is off.
    Answer critical_value(const StatisticSpec& spec, int sample_size, double alpha);

    /// The backing table, including any entries simulated so far.
    CriticalValueTable table() const;

private:
    CriticalValueTable table_;
    LookupPolicy policy_;
    std::optional<SimulationSettings> simulate_;
    std::map<std::pair<StatisticSpec, int>, std::vector<double>> distributions_;
    mutable std::mutex mutex_;
};

struct SegmentationConfig {
    StatisticSpec spec = StatisticSpec::lrt();
    double alpha = 0.05;
    int min_segment = 20;
    int max_depth = 10;

    /// Throws InputError on min_segment < 4, max_depth < 1, alpha outside
    /// (0,1), or a min_segment too short for the statistic.
    void validate() const;
};

/// One detected change. location counts the observations before the change,
/// so X_1..X_location precede it. Segments are half-open [start, end) in
/// 0-based positions and start < location < end.
struct ChangeRecord {
    int location = 0;
    int segment_start = 0;
    int segment_end = 0;
    int depth = 0;
    int local_k = 0;
    double statistic = 0.0;
    double critical_value = 0.0;
    std::string provenance;
};

struct ChangePointSet {
    std::vector<ChangeRecord> changes;  // ascending by location

    std::vector<int> locations() const;
};

ChangePointSet binary_segment(const Sample& sample, const SegmentationConfig& config,
                              CriticalValueProvider& critical_values);

}  // namespace expcp
