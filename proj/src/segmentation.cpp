#include "expcp/segmentation.hpp"

#include <algorithm>
#include <sstream>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"

namespace expcp {

CriticalValueProvider::CriticalValueProvider(CriticalValueTable table, LookupPolicy policy,
                                             std::optional<SimulationSettings> simulate)
    : table_(std::move(table)), policy_(policy), simulate_(simulate) {
    if (simulate_ && simulate_->replications < 100) throw InputError("B must be at least 100");
}

CriticalValueProvider::Answer CriticalValueProvider::critical_value(const StatisticSpec& spec,
                                                                    int sample_size, double alpha) {
    std::lock_guard lock(mutex_);
    // With simulation available, only an exact hit counts; otherwise honour
    // the caller's lookup policy.
    const LookupPolicy policy = simulate_ ? LookupPolicy::Exact : policy_;
    try {
        const LookupResult hit = lookup(table_, spec, sample_size, alpha, policy);
        return {hit.critical_value, hit.provenance()};
    } catch (const MissingTableError&) {
        if (!simulate_) throw;
    }
    auto& dist = distributions_[{spec, sample_size}];
    if (dist.empty()) {
        dist = simulate_null_distribution(spec, sample_size, simulate_->replications,
                                          simulate_->seed, simulate_->parallelism);
    }
    const double value = critical_value_from_sorted(dist, alpha);
    table_.insert_or_assign({spec, sample_size, alpha},
                            {value, simulate_->replications, simulate_->seed});
    std::ostringstream prov;
    prov << "simulated " << spec.label() << " K=" << sample_size << " alpha=" << alpha
         << " B=" << simulate_->replications << " seed=" << simulate_->seed;
    return {value, prov.str()};
}

CriticalValueTable CriticalValueProvider::table() const {
    std::lock_guard lock(mutex_);
    return table_;
}

void SegmentationConfig::validate() const {
    spec.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("significance level must lie in (0, 1)");
    if (min_segment < 4) throw InputError("min_segment must be at least 4");
    if (max_depth < 1) throw InputError("max_depth must be at least 1");
    if (spec.kind == StatKind::LrtNormalized && min_segment < kMinNormalizedSize) {
        throw InputError("normalized LRT needs min_segment >= 16");
    }
    if (spec.kind == StatKind::PhiFamily) {
        const int needed = min_size_for_epsilon(spec.epsilon);
        if (min_segment < needed) {
            throw InputError("min_segment must be >= " + std::to_string(needed) +
                             " for eps=" + std::to_string(spec.epsilon));
        }
    }
}

std::vector<int> ChangePointSet::locations() const {
    std::vector<int> out;
    out.reserve(changes.size());
    for (const auto& c : changes) out.push_back(c.location);
    return out;
}

namespace {

void segment(const Sample& sample, int start, int end, int depth, const SegmentationConfig& config,
             CriticalValueProvider& critical_values, std::vector<ChangeRecord>& out) {
    const int length = end - start;
    if (length < config.min_segment || depth >= config.max_depth) return;
    const Sample part =
        sample.slice(static_cast<std::size_t>(start), static_cast<std::size_t>(end));
    const ScanResult scan = evaluate(part, config.spec);
    const auto cv = critical_values.critical_value(config.spec, length, config.alpha);
    if (!(scan.max_value > cv.value)) return;

    ChangeRecord rec;
    rec.location = start + scan.k_hat;
    rec.segment_start = start;
    rec.segment_end = end;
    rec.depth = depth;
    rec.local_k = scan.k_hat;
    rec.statistic = scan.max_value;
    rec.critical_value = cv.value;
    rec.provenance = cv.provenance;
    out.push_back(rec);

    segment(sample, start, rec.location, depth + 1, config, critical_values, out);
    segment(sample, rec.location, end, depth + 1, config, critical_values, out);
}

}  // namespace

ChangePointSet binary_segment(const Sample& sample, const SegmentationConfig& config,
                              CriticalValueProvider& critical_values) {
    config.validate();
    ChangePointSet result;
    segment(sample, 0, static_cast<int>(sample.size()), 0, config, critical_values, result.changes);
    std::sort(result.changes.begin(), result.changes.end(),
              [](const ChangeRecord& a, const ChangeRecord& b) { return a.location < b.location; });
    return result;
}

}  // namespace expcp
