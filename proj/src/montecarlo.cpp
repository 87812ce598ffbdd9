#include "expcp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/distributions/binomial.hpp>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"

namespace expcp {
namespace {

using Draw = std::function<Sample(Engine&)>;

// values[s][r] = statistic s on replication r. Replications are split into
// contiguous blocks per worker; each slot is written by exactly one worker.
std::vector<std::vector<double>> simulate_values(std::span<const StatisticSpec> specs,
                                                 int replications, std::uint64_t master_seed,
                                                 Parallelism par, const Draw& draw) {
    std::vector<std::vector<double>> values(specs.size(),
                                            std::vector<double>(static_cast<std::size_t>(replications)));
    const auto work = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            Engine engine = replication_engine(master_seed, static_cast<std::uint64_t>(r));
            const PrefixMeans means(draw(engine));
            for (std::size_t s = 0; s < specs.size(); ++s) {
                values[s][static_cast<std::size_t>(r)] = evaluate_max(means, specs[s]);
            }
        }
    };

    const unsigned workers =
        std::min<unsigned>(par.resolved(), static_cast<unsigned>(std::max(replications, 1)));
    if (workers <= 1) {
        work(0, replications);
        return values;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(replications) * w / workers);
        const int end = static_cast<int>(static_cast<long long>(replications) * (w + 1) / workers);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return values;
}

Draw null_draw(int sample_size) {
    return [sample_size](Engine& engine) {
        return sample_standard_exponential(engine, static_cast<std::size_t>(sample_size), 1.0);
    };
}

Draw change_draw(const PowerScenario& scenario) {
    return [scenario](Engine& engine) {
        const int k = scenario.change_index();
        std::vector<double> x(static_cast<std::size_t>(scenario.sample_size));
        for (int i = 0; i < scenario.sample_size; ++i) {
            const double theta = i < k ? scenario.theta0 : scenario.theta1;
            x[static_cast<std::size_t>(i)] = exponential_from_uniform(uniform_open(engine), theta);
        }
        return Sample(std::move(x));
    };
}

int count_exceeding(std::span<const double> values, double critical) {
    return static_cast<int>(std::count_if(values.begin(), values.end(),
                                          [critical](double v) { return v > critical; }));
}

std::string describe(const TableKey& key) {
    std::ostringstream out;
    out << "(" << key.spec.label() << ", K=" << key.sample_size << ", alpha=" << key.alpha << ")";
    return out.str();
}

const TableEntry& require_entry(const CriticalValueTable& table, const TableKey& key) {
    const TableEntry* entry = table.find(key);
    if (entry == nullptr) {
        throw MissingTableError("no critical value for " + describe(key) +
                                "; run `expcp critvals` for it");
    }
    return *entry;
}

}  // namespace

unsigned Parallelism::resolved() const noexcept {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

double exponential_from_uniform(double u, double theta) {
    if (!(theta > 0.0)) throw InputError("exponential rate must be positive");
    return -std::log(u) / theta;
}

Sample sample_standard_exponential(Engine& engine, std::size_t n, double theta) {
    if (!(theta > 0.0 && std::isfinite(theta))) throw InputError("exponential rate must be positive");
    std::vector<double> x(n);
    for (double& v : x) v = exponential_from_uniform(uniform_open(engine), theta);
    return Sample(std::move(x));
}

void SimulationPlan::validate() const {
    if (replications < 100) throw InputError("B must be at least 100");
    if (specs.empty()) throw InputError("no statistics requested");
    if (sample_sizes.empty()) throw InputError("no sample sizes requested");
    if (alphas.empty()) throw InputError("no significance levels requested");
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw InputError("significance level must lie in (0, 1)");
    }
    for (const auto& spec : specs) {
        spec.validate();
        for (int k : sample_sizes) {
            if (k < 2) throw InputError("sample size must be at least 2");
            if (spec.kind == StatKind::LrtNormalized && k < kMinNormalizedSize) {
                throw InputError("normalized LRT needs K >= 16, got K=" + std::to_string(k));
            }
            if (spec.kind == StatKind::PhiFamily && trimmed_range(k, spec.epsilon).empty()) {
                throw InputError("scan set N(eps) is empty for K=" + std::to_string(k) +
                                 "; use K >= " + std::to_string(min_size_for_epsilon(spec.epsilon)));
            }
        }
    }
}

std::vector<int> default_critical_sizes() { return {40, 50, 60, 64, 100, 200, 300, 400, 500}; }

std::vector<int> default_size_study_sizes() { return {40, 50, 60, 64, 100, 200, 300, 500}; }

std::vector<double> default_alphas() { return {0.1, 0.05, 0.01}; }

std::vector<StatisticSpec> default_specs(double epsilon) {
    std::vector<StatisticSpec> specs;
    for (int i = 10; i >= 0; --i) specs.push_back(StatisticSpec::phi(-i / 10.0, epsilon));
    specs.push_back(StatisticSpec::lrt_normalized());
    specs.push_back(StatisticSpec::s());
    return specs;
}

std::vector<std::vector<double>> simulate_null_distributions(std::span<const StatisticSpec> specs,
                                                             int sample_size, int replications,
                                                             std::uint64_t master_seed,
                                                             Parallelism par) {
    if (replications < 1) throw InputError("B must be positive");
    for (const auto& spec : specs) spec.validate();
    auto values = simulate_values(specs, replications, master_seed, par, null_draw(sample_size));
    for (auto& v : values) std::sort(v.begin(), v.end());
    return values;
}

std::vector<double> simulate_null_distribution(const StatisticSpec& spec, int sample_size,
                                               int replications, std::uint64_t master_seed,
                                               Parallelism par) {
    const StatisticSpec specs[] = {spec};
    return std::move(simulate_null_distributions(specs, sample_size, replications, master_seed, par)[0]);
}

std::size_t critical_index(double alpha, int replications) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("significance level must lie in (0, 1)");
    if (replications < 1) throw InputError("B must be positive");
    const double raw = std::ceil((1.0 - alpha) * replications - 1e-9);
    return static_cast<std::size_t>(std::clamp(raw, 1.0, static_cast<double>(replications)));
}

double critical_value_from_sorted(std::span<const double> sorted, double alpha) {
    return sorted[critical_index(alpha, static_cast<int>(sorted.size())) - 1];
}

CriticalValueTable estimate_critical_values(const SimulationPlan& plan, Parallelism par) {
    plan.validate();
    CriticalValueTable table;
    for (double alpha : plan.alphas) {
        if (alpha < 1.0 / plan.replications) {
            std::ostringstream msg;
            msg << "B=" << plan.replications << " too small for alpha=" << alpha
                << ": critical value is the sample maximum";
            table.warnings().push_back(msg.str());
        }
    }
    for (int k : plan.sample_sizes) {
        const auto dists =
            simulate_null_distributions(plan.specs, k, plan.replications, plan.master_seed, par);
        for (std::size_t s = 0; s < plan.specs.size(); ++s) {
            for (double alpha : plan.alphas) {
                table.insert_or_assign({plan.specs[s], k, alpha},
                                       {critical_value_from_sorted(dists[s], alpha),
                                        plan.replications, plan.master_seed});
            }
        }
    }
    return table;
}

const char* accuracy_token(Accuracy a) {
    switch (a) {
        case Accuracy::Accurate: return "accurate";
        case Accuracy::Liberal: return "liberal";
        case Accuracy::Conservative: return "conservative";
    }
    return "?";
}

Accuracy binomial_accuracy_test(int rejections, int replications, double alpha_nominal) {
    if (replications < 1 || rejections < 0 || rejections > replications) {
        throw InputError("rejection count must lie in 0..B");
    }
    if (!(alpha_nominal > 0.0 && alpha_nominal < 1.0)) {
        throw InputError("significance level must lie in (0, 1)");
    }
    const boost::math::binomial_distribution<double> dist(replications, alpha_nominal);
    const double cdf = boost::math::cdf(dist, static_cast<double>(rejections));
    if (cdf >= 0.995) return Accuracy::Liberal;
    if (cdf <= 0.005) return Accuracy::Conservative;
    return Accuracy::Accurate;
}

int PowerScenario::change_index() const {
    return static_cast<int>(std::floor(tau * sample_size + 1e-9));
}

void PowerScenario::validate() const {
    if (sample_size < 2) throw InputError("sample size must be at least 2");
    if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0, 1)");
    if (!(theta0 > 0.0 && std::isfinite(theta0) && theta1 > 0.0 && std::isfinite(theta1))) {
        throw InputError("rates must be positive and finite");
    }
    if (theta0 == theta1) throw InputError("theta1 must differ from theta0");
    const int k = change_index();
    if (k < 1 || k > sample_size - 1) {
        throw InputError("change index [tau*K]=" + std::to_string(k) + " outside 1..K-1");
    }
}

StudyReport size_study(const CriticalValueTable& table, const SimulationPlan& plan,
                       const SizeStudyOptions& options, Parallelism par) {
    plan.validate();
    StudyReport report;
    report.kind = StudyKind::Size;
    report.shared_samples = options.shared_samples;
    report.replications = plan.replications;
    report.seed = options.shared_samples ? plan.master_seed : options.fresh_seed;

    for (int k : plan.sample_sizes) {
        for (const auto& spec : plan.specs) {
            for (double alpha : plan.alphas) require_entry(table, {spec, k, alpha});
        }
    }

    for (int k : plan.sample_sizes) {
        // Group (spec, alpha) cells that can share one batch of samples.
        std::map<std::pair<std::uint64_t, int>, std::vector<StatisticSpec>> batches;
        for (const auto& spec : plan.specs) {
            for (double alpha : plan.alphas) {
                const TableEntry& e = require_entry(table, {spec, k, alpha});
                const auto batch = options.shared_samples
                                       ? std::make_pair(e.master_seed, e.replications)
                                       : std::make_pair(options.fresh_seed, plan.replications);
                auto& members = batches[batch];
                if (std::find(members.begin(), members.end(), spec) == members.end()) {
                    members.push_back(spec);
                }
            }
        }
        std::map<std::tuple<StatisticSpec, double>, StudyCell> cells;
        for (const auto& [batch, specs] : batches) {
            const auto values = simulate_values(specs, batch.second, batch.first, par, null_draw(k));
            for (std::size_t s = 0; s < specs.size(); ++s) {
                for (double alpha : plan.alphas) {
                    const TableEntry& e = require_entry(table, {specs[s], k, alpha});
                    if (options.shared_samples &&
                        std::make_pair(e.master_seed, e.replications) != batch) {
                        continue;
                    }
                    StudyCell cell;
                    cell.spec = specs[s];
                    cell.sample_size = k;
                    cell.alpha = alpha;
                    cell.critical_value = e.critical_value;
                    cell.replications = batch.second;
                    cell.rejections = count_exceeding(values[s], e.critical_value);
                    cell.accuracy = binomial_accuracy_test(cell.rejections, cell.replications, alpha);
                    cells[{specs[s], alpha}] = cell;
                }
            }
        }
        for (double alpha : plan.alphas) {
            for (const auto& spec : plan.specs) report.cells.push_back(cells.at({spec, alpha}));
        }
    }
    return report;
}

StudyReport power_study(const CriticalValueTable& table, std::span<const PowerScenario> scenarios,
                        std::span<const StatisticSpec> specs, std::span<const double> alphas,
                        int replications, std::uint64_t master_seed, Parallelism par) {
    if (replications < 1) throw InputError("B must be positive");
    for (const auto& spec : specs) spec.validate();
    for (const auto& sc : scenarios) {
        sc.validate();
        for (const auto& spec : specs) {
            for (double alpha : alphas) require_entry(table, {spec, sc.sample_size, alpha});
        }
    }

    StudyReport report;
    report.kind = StudyKind::Power;
    report.replications = replications;
    report.seed = master_seed;
    for (const auto& sc : scenarios) {
        const auto values = simulate_values(specs, replications, master_seed, par, change_draw(sc));
        for (double alpha : alphas) {
            for (std::size_t s = 0; s < specs.size(); ++s) {
                const TableEntry& e = require_entry(table, {specs[s], sc.sample_size, alpha});
                StudyCell cell;
                cell.spec = specs[s];
                cell.sample_size = sc.sample_size;
                cell.alpha = alpha;
                cell.scenario = sc;
                cell.critical_value = e.critical_value;
                cell.replications = replications;
                cell.rejections = count_exceeding(values[s], e.critical_value);
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

}  // namespace expcp
