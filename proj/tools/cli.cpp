#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"
#include "expcp/montecarlo.hpp"
#include "expcp/report.hpp"
#include "expcp/rng.hpp"
#include "expcp/segmentation.hpp"
#include "expcp/statistics.hpp"
#include "expcp/tablestore.hpp"

namespace expcp::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20110101;
// Stream tags so the table, size and power runs never share samples by accident.
constexpr std::uint64_t kSizeStream = 1;
constexpr std::uint64_t kPowerStream = 2;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

struct Options {
    std::vector<std::string> stats;
    std::vector<double> lambdas;
    double epsilon = 0.05;
    std::vector<int> sizes;
    std::vector<double> alphas;
    int replications = 5000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    std::string tables;
    bool simulate_tables = false;
    bool shared_samples = false;
    std::string out;
    std::string markdown;
    bool timestamp = false;
    // power
    std::vector<double> taus;
    std::vector<std::string> theta1s;
    // detect / segment
    std::string input;
    bool profile = false;
    bool nearest_k = false;
    int min_segment = 20;
    int max_depth = 10;
    bool no_simulate = false;
    std::string save_tables;
};

std::vector<double> lambda_grid() {
    std::vector<double> out;
    for (int i = 10; i >= 0; --i) out.push_back(-i / 10.0);
    return out;
}

std::vector<StatisticSpec> resolve_specs(const Options& o) {
    if (o.stats.empty()) {
        auto specs = default_specs(o.epsilon);
        if (o.lambdas.empty()) return specs;
        std::vector<StatisticSpec> out;
        for (double l : o.lambdas) out.push_back(StatisticSpec::phi(l, o.epsilon));
        out.push_back(StatisticSpec::lrt_normalized());
        out.push_back(StatisticSpec::s());
        for (const auto& s : out) s.validate();
        return out;
    }
    std::vector<StatisticSpec> out;
    for (const auto& token : o.stats) {
        const StatKind kind = parse_kind_token(token);
        if (kind == StatKind::PhiFamily) {
            for (double l : o.lambdas.empty() ? lambda_grid() : o.lambdas) {
                out.push_back(StatisticSpec::phi(l, o.epsilon));
            }
        } else {
            out.push_back({kind, 0.0, 0.0});
        }
    }
    for (const auto& s : out) s.validate();
    return out;
}

StatisticSpec resolve_single_spec(const Options& o) {
    Options copy = o;
    if (copy.stats.empty()) copy.stats = {"lrt"};
    if (copy.stats.size() != 1) throw InputError("exactly one --stat is required");
    if (parse_kind_token(copy.stats[0]) == StatKind::PhiFamily) {
        if (copy.lambdas.size() > 1) throw InputError("exactly one --lambda is required");
        if (copy.lambdas.empty()) copy.lambdas = {-0.5};
    }
    return resolve_specs(copy).front();
}

Json spec_json(const StatisticSpec& s) {
    Json j;
    j["stat"] = kind_token(s.kind);
    if (s.kind == StatKind::PhiFamily) {
        j["lambda"] = s.lambda;
        j["epsilon"] = s.epsilon;
    }
    return j;
}

Json specs_json(const std::vector<StatisticSpec>& specs) {
    Json arr = Json::array();
    for (const auto& s : specs) arr.push_back(spec_json(s));
    return arr;
}

Metadata base_metadata(const std::string& command, const Json& config, bool timestamp) {
    Metadata m;
    m["tool"] = std::string("expcp ") + EXPCP_VERSION;
    m["command"] = command;
    m["config"] = config.dump();
    if (timestamp) {
        m["created"] = std::to_string(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
    }
    return m;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw InputError("cannot open '" + path + "' for writing");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

std::vector<double> parse_rates(const std::vector<std::string>& texts) {
    std::vector<double> out;
    for (const auto& t : texts) out.push_back(parse_rate(t));
    return out;
}

SimulationPlan make_plan(const std::vector<StatisticSpec>& specs, const std::vector<int>& sizes,
                         const std::vector<double>& alphas, const Options& o) {
    SimulationPlan plan;
    plan.specs = specs;
    plan.sample_sizes = sizes;
    plan.alphas = alphas;
    plan.replications = o.replications;
    plan.master_seed = o.seed;
    plan.validate();
    return plan;
}

std::string table_path(const Options& o) {
    if (!o.tables.empty()) return o.tables;
    if (const char* env = std::getenv("EXPCP_TABLES"); env != nullptr && *env != '\0') return env;
    return {};
}

CriticalValueTable obtain_table(const Options& o, const SimulationPlan& plan, Parallelism par) {
    if (o.simulate_tables) return estimate_critical_values(plan, par);
    const std::string path = table_path(o);
    if (path.empty()) {
        throw MissingTableError(
            "no critical-value table: pass --tables, set EXPCP_TABLES or use --simulate-tables");
    }
    return read_table(std::filesystem::path(path));
}

Json table_source_json(const Options& o) {
    if (o.simulate_tables) return "simulated";
    const std::string p = table_path(o);
    return p.empty() ? Json(nullptr) : Json(p);
}

void add_common(CLI::App& cmd, Options& o, bool grids) {
    cmd.add_option("--stat", o.stats, "Statistic(s): t-phi, lrt, lrt-norm, s")->delimiter(',');
    cmd.add_option("--lambda", o.lambdas, "Phi-family lambda value(s) in [-1, 0]")->delimiter(',');
    cmd.add_option("--epsilon", o.epsilon, "Trimming fraction for the phi family")->capture_default_str();
    if (grids) {
        cmd.add_option("--K", o.sizes, "Sample size(s)")->delimiter(',');
    }
    cmd.add_option("--alpha", o.alphas, "Significance level(s)")->delimiter(',');
    cmd.add_option("--B", o.replications, "Monte Carlo replications")->capture_default_str();
    cmd.add_option("--seed", o.seed, "Master seed for all randomness")->capture_default_str();
    cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores); never changes output");
    cmd.add_option("--out", o.out, "Output path (default stdout)");
}

void add_table_source(CLI::App& cmd, Options& o) {
    cmd.add_option("--tables", o.tables, "Critical-value CSV (default $EXPCP_TABLES)");
    cmd.add_flag("--simulate-tables", o.simulate_tables,
                 "Simulate the needed critical values with --B/--seed instead of reading a table");
}

int cmd_critvals(const Options& o, std::ostream& out) {
    const auto specs = resolve_specs(o);
    const auto sizes = o.sizes.empty() ? default_critical_sizes() : o.sizes;
    const auto alphas = o.alphas.empty() ? default_alphas() : o.alphas;
    const SimulationPlan plan = make_plan(specs, sizes, alphas, o);

    Json config;
    config["statistics"] = specs_json(specs);
    config["K"] = sizes;
    config["alpha"] = alphas;
    config["B"] = o.replications;
    config["seed"] = o.seed;

    CriticalValueTable table = estimate_critical_values(plan, {o.threads});
    for (auto& [k, v] : base_metadata("critvals", config, o.timestamp)) table.metadata()[k] = v;

    Output csv(o.out, out);
    write_table(table, csv.get());
    if (!o.markdown.empty()) {
        Output md(o.markdown, out);
        write_metadata_comment(table.metadata(), md.get(), "<!-- ", " -->");
        write_critical_markdown(table, specs, sizes, alphas, md.get());
    }
    return kOk;
}

int cmd_size(const Options& o, std::ostream& out) {
    const auto specs = resolve_specs(o);
    const auto sizes = o.sizes.empty() ? default_size_study_sizes() : o.sizes;
    const auto alphas = o.alphas.empty() ? default_alphas() : o.alphas;
    const SimulationPlan plan = make_plan(specs, sizes, alphas, o);
    const Parallelism par{o.threads};

    const CriticalValueTable table = obtain_table(o, plan, par);
    SizeStudyOptions opts;
    opts.shared_samples = o.shared_samples;
    opts.fresh_seed = derive_seed(o.seed, kSizeStream);
    const StudyReport report = size_study(table, plan, opts, par);

    Json config;
    config["statistics"] = specs_json(specs);
    config["K"] = sizes;
    config["alpha"] = alphas;
    config["B"] = o.replications;
    config["seed"] = o.seed;
    config["size_seed"] = opts.fresh_seed;
    config["shared_samples"] = o.shared_samples;
    config["tables"] = table_source_json(o);
    const Metadata meta = base_metadata("size", config, o.timestamp);

    Output csv(o.out, out);
    write_study_csv(report, meta, csv.get());
    if (!o.markdown.empty()) {
        Output md(o.markdown, out);
        write_metadata_comment(meta, md.get(), "<!-- ", " -->");
        write_size_markdown(report, md.get());
    }
    return kOk;
}

int cmd_power(const Options& o, std::ostream& out) {
    const auto specs = resolve_specs(o);
    const auto sizes = o.sizes.empty() ? std::vector<int>{40, 50, 100, 200} : o.sizes;
    const auto alphas = o.alphas.empty() ? std::vector<double>{0.05, 0.01} : o.alphas;
    const auto taus = o.taus.empty() ? std::vector<double>{0.2, 0.3, 0.5} : o.taus;
    const auto theta1s = o.theta1s.empty()
                             ? std::vector<double>{5, 4, 3, 2, 1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5}
                             : parse_rates(o.theta1s);
    const SimulationPlan plan = make_plan(specs, sizes, alphas, o);
    const Parallelism par{o.threads};

    std::vector<PowerScenario> scenarios;
    for (double tau : taus) {
        for (int k : sizes) {
            for (double theta1 : theta1s) {
                PowerScenario sc{k, tau, 1.0, theta1};
                sc.validate();
                scenarios.push_back(sc);
            }
        }
    }
    const CriticalValueTable table = obtain_table(o, plan, par);
    const std::uint64_t power_seed = derive_seed(o.seed, kPowerStream);
    const StudyReport report =
        power_study(table, scenarios, specs, alphas, o.replications, power_seed, par);

    Json config;
    config["statistics"] = specs_json(specs);
    config["K"] = sizes;
    config["alpha"] = alphas;
    config["tau"] = taus;
    config["theta0"] = 1.0;
    config["theta1"] = theta1s;
    config["B"] = o.replications;
    config["seed"] = o.seed;
    config["power_seed"] = power_seed;
    config["tables"] = table_source_json(o);
    const Metadata meta = base_metadata("power", config, o.timestamp);

    Output csv(o.out, out);
    write_study_csv(report, meta, csv.get());
    if (!o.markdown.empty()) {
        Output md(o.markdown, out);
        write_metadata_comment(meta, md.get(), "<!-- ", " -->");
        write_power_markdown(report, md.get());
    }
    return kOk;
}

double single_alpha(const Options& o) {
    if (o.alphas.size() > 1) throw InputError("exactly one --alpha is allowed here");
    return o.alphas.empty() ? 0.05 : o.alphas.front();
}

Json header_json(const std::string& command, const Json& config) {
    Json j;
    j["tool"] = "expcp";
    j["version"] = EXPCP_VERSION;
    j["command"] = command;
    j["config"] = config;
    return j;
}

int cmd_detect(const Options& o, std::ostream& out) {
    const StatisticSpec spec = resolve_single_spec(o);
    const double alpha = single_alpha(o);
    const Sample sample = read_sample(o.input);
    const int n = static_cast<int>(sample.size());
    const Parallelism par{o.threads};

    const PrefixMeans means(sample);
    const ScanResult scan = evaluate(means, spec);

    CriticalValueTable table;
    LookupResult hit;
    if (o.simulate_tables) {
        SimulationPlan plan;
        plan.specs = {spec};
        plan.sample_sizes = {n};
        plan.alphas = {alpha};
        plan.replications = o.replications;
        plan.master_seed = o.seed;
        table = estimate_critical_values(plan, par);
        hit = lookup(table, spec, n, alpha, LookupPolicy::Exact);
    } else {
        table = obtain_table(o, {}, par);
        hit = lookup(table, spec, n, alpha, o.nearest_k ? LookupPolicy::NearestKWarn : LookupPolicy::Exact);
    }

    Json config = spec_json(spec);
    config["alpha"] = alpha;
    config["input"] = o.input;
    config["tables"] = table_source_json(o);
    if (o.simulate_tables) {
        config["B"] = o.replications;
        config["seed"] = o.seed;
    }
    config["lookup"] = o.nearest_k ? "nearest-k" : "exact";

    Json j = header_json("detect", config);
    j["statistic"] = spec.label();
    j["K"] = n;
    j["max_value"] = scan.max_value;
    j["k_hat"] = scan.k_hat;
    j["critical_value"] = hit.critical_value;
    j["critical_value_provenance"] = hit.provenance();
    j["critical_value_B"] = hit.entry.replications;
    j["critical_value_seed"] = hit.entry.master_seed;
    j["warning"] = hit.warning ? Json(*hit.warning) : Json(nullptr);
    j["reject"] = scan.max_value > hit.critical_value;
    j["theta_hat_before"] = 1.0 / means.head(scan.k_hat);
    j["theta_hat_after"] = 1.0 / means.tail(scan.k_hat);
    if (o.profile) {
        Json prof = Json::array();
        for (const auto& p : scan.per_k) prof.push_back({{"k", p.k}, {"value", p.value}});
        j["profile"] = prof;
    }
    Output dst(o.out, out);
    dst.get() << j.dump(2) << '\n';
    return kOk;
}

int cmd_segment(const Options& o, std::ostream& out) {
    SegmentationConfig config;
    config.spec = resolve_single_spec(o);
    config.alpha = single_alpha(o);
    config.min_segment = o.min_segment;
    config.max_depth = o.max_depth;
    config.validate();
    const Sample sample = read_sample(o.input);

    CriticalValueTable base;
    const std::string path = table_path(o);
    if (!path.empty()) base = read_table(std::filesystem::path(path));
    std::optional<SimulationSettings> sim;
    if (!o.no_simulate) sim = SimulationSettings{o.replications, o.seed, {o.threads}};
    if (o.replications < 100) throw InputError("B must be at least 100");
    CriticalValueProvider provider(std::move(base),
                                   o.nearest_k ? LookupPolicy::NearestKWarn : LookupPolicy::Exact, sim);
    const ChangePointSet result = binary_segment(sample, config, provider);

    Json cfg = spec_json(config.spec);
    cfg["alpha"] = config.alpha;
    cfg["min_segment"] = config.min_segment;
    cfg["max_depth"] = config.max_depth;
    cfg["input"] = o.input;
    cfg["tables"] = path.empty() ? Json(nullptr) : Json(path);
    cfg["simulate_on_demand"] = !o.no_simulate;
    cfg["B"] = o.replications;
    cfg["seed"] = o.seed;

    Json j = header_json("segment", cfg);
    j["K"] = sample.size();
    j["locations"] = result.locations();
    Json changes = Json::array();
    for (const auto& c : result.changes) {
        changes.push_back({{"location", c.location},
                           {"segment_start", c.segment_start},
                           {"segment_end", c.segment_end},
                           {"depth", c.depth},
                           {"k_hat_local", c.local_k},
                           {"statistic", c.statistic},
                           {"critical_value", c.critical_value},
                           {"provenance", c.provenance}});
    }
    j["changes"] = changes;
    Output dst(o.out, out);
    dst.get() << j.dump(2) << '\n';

    if (!o.save_tables.empty()) {
        CriticalValueTable cached = provider.table();
        for (auto& [k, v] : base_metadata("segment", cfg, o.timestamp)) cached.metadata()[k] = v;
        write_table(cached, std::filesystem::path(o.save_tables));
    }
    return kOk;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r,");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

double parse_rate(const std::string& text) {
    const std::string t = trim(text);
    const auto slash = t.find('/');
    std::optional<double> v;
    if (slash == std::string::npos) {
        v = to_double(t);
    } else {
        const auto num = to_double(trim(t.substr(0, slash)));
        const auto den = to_double(trim(t.substr(slash + 1)));
        if (num && den && *den != 0.0) v = *num / *den;
    }
    if (!v || !(*v > 0.0) || !std::isfinite(*v)) {
        throw InputError("'" + text + "' is not a positive rate (use e.g. 3, 0.5 or 1/5)");
    }
    return *v;
}

Sample read_sample(const std::string& path) {
    if (path.empty()) throw InputError("--input is required");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto v = to_double(t);
        if (!v) {
            if (!seen_content) {
                seen_content = true;  // header row of a single-column CSV
                continue;
            }
            throw InputError(path + ":" + std::to_string(line_no) + ": '" + t + "' is not a number");
        }
        seen_content = true;
        if (!(*v > 0.0) || !std::isfinite(*v)) {
            throw InputError(path + ":" + std::to_string(line_no) + ": observation " + t +
                             " is not positive and finite");
        }
        values.push_back(*v);
    }
    if (values.size() < 2) {
        throw InputError(path + ": need at least 2 observations, got " + std::to_string(values.size()));
    }
    return Sample(std::move(values));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Change-point detection for exponential sequences with phi-divergence, "
                 "likelihood-ratio and weighted KL scan statistics"};
    app.name("expcp");
    app.set_version_flag("--version", std::string("expcp ") + EXPCP_VERSION);
    app.require_subcommand(1);

    Options o;
    auto* critvals = app.add_subcommand("critvals", "Simulate critical values");
    add_common(*critvals, o, true);
    critvals->add_option("--markdown", o.markdown, "Also write a Markdown table to this path ('-' = stdout)");
    critvals->add_flag("--timestamp", o.timestamp, "Record the creation time in the table");

    auto* size = app.add_subcommand("size", "Empirical sizes under H0");
    add_common(*size, o, true);
    add_table_source(*size, o);
    size->add_flag("--shared-samples", o.shared_samples,
                   "Reuse the samples behind the critical values (reproduces exactly nominal sizes)");
    size->add_option("--markdown", o.markdown, "Also write a Markdown table to this path ('-' = stdout)");
    size->add_flag("--timestamp", o.timestamp, "Record the creation time in the output");

    auto* power = app.add_subcommand("power", "Empirical powers under a single change");
    add_common(*power, o, true);
    add_table_source(*power, o);
    power->add_option("--tau", o.taus, "Relative change location(s) in (0,1)")->delimiter(',');
    power->add_option("--theta1", o.theta1s, "Post-change rate(s), e.g. 5,1/5")->delimiter(',');
    power->add_option("--markdown", o.markdown, "Also write Markdown tables to this path ('-' = stdout)");
    power->add_flag("--timestamp", o.timestamp, "Record the creation time in the output");

    auto* detect = app.add_subcommand("detect", "Test one sequence for a single change");
    add_common(*detect, o, false);
    add_table_source(*detect, o);
    detect->add_option("--input", o.input, "File with one positive number per line")->required();
    detect->add_flag("--profile", o.profile, "Include the per-k statistic profile");
    detect->add_flag("--nearest-k", o.nearest_k, "Fall back to the nearest tabulated K (with a warning)");

    auto* segment = app.add_subcommand("segment", "Binary segmentation for multiple changes");
    add_common(*segment, o, false);
    segment->add_option("--tables", o.tables, "Critical-value CSV consulted first (default $EXPCP_TABLES)");
    segment->add_option("--input", o.input, "File with one positive number per line")->required();
    segment->add_option("--min-segment", o.min_segment, "Shortest segment that is tested")->capture_default_str();
    segment->add_option("--max-depth", o.max_depth, "Recursion depth cap")->capture_default_str();
    segment->add_flag("--no-simulate", o.no_simulate, "Fail instead of simulating missing critical values");
    segment->add_flag("--nearest-k", o.nearest_k, "With --no-simulate, use the nearest tabulated K");
    segment->add_option("--save-tables", o.save_tables, "Write the table including simulated entries");
    segment->add_flag("--timestamp", o.timestamp, "Record the creation time in saved tables");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*critvals) return cmd_critvals(o, out);
        if (*size) return cmd_size(o, out);
        if (*power) return cmd_power(o, out);
        if (*detect) return cmd_detect(o, out);
        if (*segment) return cmd_segment(o, out);
    } catch (const MissingTableError& e) {
        err << "expcp: " << e.what() << '\n';
        return kMissingTable;
    } catch (const InputError& e) {
        err << "expcp: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "expcp: internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInternalError;
}

}  // namespace expcp::cli
