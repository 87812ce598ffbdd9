#include "expcp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "expcp/asymptotics.hpp"
#include "expcp/tablestore.hpp"

namespace expcp {
namespace {

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string short_real(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

void row(std::ostream& out, const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) out << ' ' << c << " |";
    out << '\n';
}

void header(std::ostream& out, std::vector<std::string> lead, std::span<const StatisticSpec> specs) {
    for (const auto& s : specs) lead.push_back(column_label(s));
    row(out, lead);
    out << '|';
    for (std::size_t i = 0; i < lead.size(); ++i) out << "---|";
    out << '\n';
}

std::string asymptotic_cell(const StatisticSpec& spec, double alpha) {
    switch (spec.kind) {
        case StatKind::PhiFamily: {
            const auto set = asymptotic_critical_set(alpha);
            if (!set.t_phi || spec.epsilon != 0.05) return "";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", *set.t_phi);
            return buf;
        }
        case StatKind::LrtNormalized: return fixed4(lrt_asymptotic_critical(alpha));
        case StatKind::S: return fixed4(s_asymptotic_critical(alpha));
        case StatKind::Lrt: return "";
    }
    return "";
}

template <class T>
std::vector<T> unique_in_order(const std::vector<T>& xs) {
    std::vector<T> out;
    for (const auto& x : xs) {
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
    return out;
}

}  // namespace

std::string column_label(const StatisticSpec& spec) {
    switch (spec.kind) {
        case StatKind::PhiFamily: {
            std::string label = short_real(spec.lambda == 0.0 ? 0.0 : spec.lambda);
            if (spec.epsilon != 0.05) label += " (eps=" + short_real(spec.epsilon) + ")";
            return label;
        }
        case StatKind::Lrt: return "LRT";
        case StatKind::LrtNormalized: return "~LRT";
        case StatKind::S: return "S";
    }
    return "?";
}

std::string format_rate(double theta) {
    if (theta < 1.0) {
        const double inv = 1.0 / theta;
        if (std::abs(inv - std::round(inv)) < 1e-9) return "1/" + short_real(std::round(inv));
    }
    return short_real(theta);
}

void write_metadata_comment(const Metadata& metadata, std::ostream& out, const char* prefix,
                            const char* suffix) {
    for (const auto& [k, v] : metadata) out << prefix << k << '=' << v << suffix << '\n';
}

void write_critical_markdown(const CriticalValueTable& table, std::span<const StatisticSpec> specs,
                             std::span<const int> sizes, std::span<const double> alphas,
                             std::ostream& out) {
    out << "Simulated critical values";
    if (!table.empty()) {
        const auto& e = table.entries().begin()->second;
        out << " (B=" << e.replications << ", seed=" << e.master_seed << ")";
    }
    out << "\n\n";
    header(out, {"alpha", "K"}, specs);
    for (double alpha : alphas) {
        bool first = true;
        for (int k : sizes) {
            std::vector<std::string> cells{first ? short_real(alpha) : "", std::to_string(k)};
            first = false;
            for (const auto& s : specs) {
                const TableEntry* e = table.find({s, k, alpha});
                cells.push_back(e ? fixed4(e->critical_value) : "");
            }
            row(out, cells);
        }
        std::vector<std::string> inf{"", "inf"};
        for (const auto& s : specs) inf.push_back(asymptotic_cell(s, alpha));
        row(out, inf);
    }
}

void write_size_markdown(const StudyReport& report, std::ostream& out) {
    std::vector<StatisticSpec> specs;
    std::vector<int> sizes;
    std::vector<double> alphas;
    std::map<std::tuple<double, int, StatisticSpec>, const StudyCell*> index;
    for (const auto& c : report.cells) {
        specs.push_back(c.spec);
        sizes.push_back(c.sample_size);
        alphas.push_back(c.alpha);
        index[{c.alpha, c.sample_size, c.spec}] = &c;
    }
    specs = unique_in_order(specs);
    sizes = unique_in_order(sizes);
    alphas = unique_in_order(alphas);

    out << "Empirical sizes (B=" << report.replications << ", "
        << (report.shared_samples ? "shared samples" : "fresh samples, seed=" + std::to_string(report.seed))
        << "); * marks levels significantly different from alpha\n\n";
    header(out, {"alpha", "K"}, specs);
    for (double alpha : alphas) {
        bool first = true;
        for (int k : sizes) {
            std::vector<std::string> cells{first ? short_real(alpha) : "", std::to_string(k)};
            first = false;
            for (const auto& s : specs) {
                const auto it = index.find({alpha, k, s});
                if (it == index.end()) {
                    cells.emplace_back();
                    continue;
                }
                const StudyCell& c = *it->second;
                std::string v = fixed4(c.proportion());
                if (c.accuracy && *c.accuracy != Accuracy::Accurate) v += "*";
                cells.push_back(v);
            }
            row(out, cells);
        }
    }
}

void write_power_markdown(const StudyReport& report, std::ostream& out) {
    std::vector<StatisticSpec> specs;
    std::vector<std::pair<double, double>> groups;  // (alpha, tau)
    for (const auto& c : report.cells) {
        specs.push_back(c.spec);
        if (c.scenario) groups.emplace_back(c.alpha, c.scenario->tau);
    }
    specs = unique_in_order(specs);
    groups = unique_in_order(groups);

    bool first_group = true;
    for (const auto& [alpha, tau] : groups) {
        if (!first_group) out << '\n';
        first_group = false;
        out << "Empirical powers (B=" << report.replications << ", seed=" << report.seed
            << "), alpha=" << short_real(alpha) << ", tau=" << short_real(tau) << "\n\n";
        header(out, {"K", "theta1"}, specs);
        std::vector<std::pair<int, double>> rows;
        std::map<std::tuple<int, double, StatisticSpec>, const StudyCell*> index;
        for (const auto& c : report.cells) {
            if (!c.scenario || c.alpha != alpha || c.scenario->tau != tau) continue;
            rows.emplace_back(c.sample_size, c.scenario->theta1);
            index[{c.sample_size, c.scenario->theta1, c.spec}] = &c;
        }
        rows = unique_in_order(rows);
        int last_k = -1;
        for (const auto& [k, theta1] : rows) {
            std::vector<std::string> cells{k == last_k ? "" : std::to_string(k), format_rate(theta1)};
            last_k = k;
            for (const auto& s : specs) {
                const auto it = index.find({k, theta1, s});
                cells.push_back(it == index.end() ? "" : fixed4(it->second->proportion()));
            }
            row(out, cells);
        }
    }
}

void write_study_csv(const StudyReport& report, const Metadata& metadata, std::ostream& out) {
    write_metadata_comment(metadata, out);
    out << kStudyColumns << '\n';
    const char* study = report.kind == StudyKind::Size ? "size" : "power";
    for (const auto& c : report.cells) {
        const bool phi = c.spec.kind == StatKind::PhiFamily;
        out << study << ',' << kind_token(c.spec.kind) << ',' << (phi ? format_real(c.spec.lambda) : "")
            << ',' << (phi ? format_real(c.spec.epsilon) : "") << ',' << c.sample_size << ','
            << format_real(c.alpha) << ',';
        if (c.scenario) {
            out << format_real(c.scenario->tau) << ',' << format_real(c.scenario->theta0) << ','
                << format_real(c.scenario->theta1);
        } else {
            out << ",,";
        }
        out << ',' << format_real(c.critical_value) << ',' << c.rejections << ',' << c.replications
            << ',' << format_real(c.proportion()) << ','
            << (c.accuracy ? accuracy_token(*c.accuracy) : "") << '\n';
    }
}

}  // namespace expcp
