#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "expcp/asymptotics.hpp"
#include "expcp/error.hpp"
#include "expcp/montecarlo.hpp"
#include "expcp/segmentation.hpp"
#include "expcp/statistics.hpp"
#include "expcp/tablestore.hpp"

namespace py = pybind11;
using namespace expcp;

namespace {

CriticalValueTable estimate(const std::vector<StatisticSpec>& specs, const std::vector<int>& sizes,
                            const std::vector<double>& alphas, int replications, std::uint64_t seed,
                            unsigned threads) {
    SimulationPlan plan{specs, sizes, alphas, replications, seed};
    py::gil_scoped_release release;
    return estimate_critical_values(plan, {threads});
}

std::vector<double> simulate(const StatisticSpec& spec, int sample_size, int replications,
                             std::uint64_t seed, unsigned threads) {
    py::gil_scoped_release release;
    return simulate_null_distribution(spec, sample_size, replications, seed, {threads});
}

ChangePointSet segment(const std::vector<double>& x, const StatisticSpec& spec, double alpha,
                       int min_segment, int max_depth, const std::optional<CriticalValueTable>& table,
                       bool simulate_missing, int replications, std::uint64_t seed, unsigned threads) {
    std::optional<SimulationSettings> sim;
    if (simulate_missing) sim = SimulationSettings{replications, seed, {threads}};
    CriticalValueProvider provider(table.value_or(CriticalValueTable{}), LookupPolicy::Exact, sim);
    SegmentationConfig config{spec, alpha, min_segment, max_depth};
    const Sample sample(x);
    py::gil_scoped_release release;
    return binary_segment(sample, config, provider);
}

std::string table_to_csv(const CriticalValueTable& t) {
    std::ostringstream out;
    write_table(t, out);
    return out.str();
}

CriticalValueTable table_from_csv(const std::string& text) {
    std::istringstream in(text);
    return read_table(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Change-point detection in exponential sequences: scan statistics, "
              "Monte Carlo critical values and binary segmentation.";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<MissingTableError>(m, "MissingTableError", PyExc_LookupError);

    py::enum_<StatKind>(m, "StatKind")
        .value("PHI", StatKind::PhiFamily)
        .value("LRT", StatKind::Lrt)
        .value("LRT_NORMALIZED", StatKind::LrtNormalized)
        .value("S", StatKind::S);

    py::class_<StatisticSpec>(m, "StatisticSpec")
        .def_static("phi", &StatisticSpec::phi, py::arg("lam"), py::arg("epsilon") = 0.05)
        .def_static("lrt", &StatisticSpec::lrt)
        .def_static("lrt_normalized", &StatisticSpec::lrt_normalized)
        .def_static("s", &StatisticSpec::s)
        .def_static("parse", [](const std::string& token, double lam, double eps) {
            const StatKind kind = parse_kind_token(token);
            StatisticSpec spec{kind, 0.0, 0.0};
            if (kind == StatKind::PhiFamily) spec = StatisticSpec::phi(lam, eps);
            spec.validate();
            return spec;
        }, py::arg("token"), py::arg("lam") = 0.0, py::arg("epsilon") = 0.05)
        .def_readonly("kind", &StatisticSpec::kind)
        .def_readonly("lam", &StatisticSpec::lambda)
        .def_readonly("epsilon", &StatisticSpec::epsilon)
        .def("label", &StatisticSpec::label)
        .def("__repr__", [](const StatisticSpec& s) { return "<StatisticSpec " + s.label() + ">"; })
        .def("__eq__", [](const StatisticSpec& a, const StatisticSpec& b) { return a == b; });

    py::class_<ScanResult>(m, "ScanResult")
        .def_readonly("max_value", &ScanResult::max_value)
        .def_readonly("k_hat", &ScanResult::k_hat)
        .def_property_readonly("ks", [](const ScanResult& r) {
            std::vector<int> out;
            for (const auto& p : r.per_k) out.push_back(p.k);
            return out;
        })
        .def_property_readonly("values", [](const ScanResult& r) {
            std::vector<double> out;
            for (const auto& p : r.per_k) out.push_back(p.value);
            return out;
        });

    m.def("evaluate", [](const std::vector<double>& x, const StatisticSpec& spec) {
        return evaluate(Sample(x), spec);
    }, py::arg("x"), py::arg("spec"), "Per-split profile and maximum of a scan statistic.");
    m.def("trimmed_range", [](int K, double eps) {
        const auto r = trimmed_range(K, eps);
        return std::make_pair(r.first, r.last);
    }, py::arg("sample_size"), py::arg("epsilon"));
    m.def("kl_exponential", &kl_exponential, py::arg("theta"), py::arg("theta_prime"));

    m.def("norm_a", &norm_a, py::arg("sample_size"));
    m.def("norm_b", &norm_b, py::arg("sample_size"));
    m.def("normalize_lrt", &normalize_lrt, py::arg("lrt"), py::arg("sample_size"));
    m.def("lrt_asymptotic_critical", &lrt_asymptotic_critical, py::arg("alpha"));
    m.def("s_asymptotic_critical", &s_asymptotic_critical, py::arg("alpha"));
    m.def("kolmogorov_survival", &kolmogorov_survival, py::arg("q"));

    m.def("default_specs", &default_specs, py::arg("epsilon") = 0.05);
    m.def("simulate_null_distribution", &simulate, py::arg("spec"), py::arg("sample_size"),
          py::arg("replications"), py::arg("seed"), py::arg("threads") = 0u,
          "Sorted null-distribution draws of a statistic.");
    m.def("critical_index", &critical_index, py::arg("alpha"), py::arg("replications"));
    m.def("critical_value_from_sorted", [](const std::vector<double>& sorted, double alpha) {
        return critical_value_from_sorted(sorted, alpha);
    }, py::arg("sorted"), py::arg("alpha"));
    m.def("binomial_accuracy_test", [](int rejections, int replications, double alpha) {
        return std::string(accuracy_token(binomial_accuracy_test(rejections, replications, alpha)));
    }, py::arg("rejections"), py::arg("replications"), py::arg("alpha"));

    py::class_<CriticalValueTable>(m, "CriticalValueTable")
        .def(py::init<>())
        .def("__len__", &CriticalValueTable::size)
        .def("lookup", [](const CriticalValueTable& t, const StatisticSpec& spec, int K, double alpha,
                          bool nearest) {
            return lookup(t, spec, K, alpha, nearest ? LookupPolicy::NearestKWarn : LookupPolicy::Exact)
                .critical_value;
        }, py::arg("spec"), py::arg("sample_size"), py::arg("alpha"), py::arg("nearest") = false)
        .def("to_csv", &table_to_csv)
        .def_static("from_csv", &table_from_csv, py::arg("text"))
        .def("save", [](const CriticalValueTable& t, const std::filesystem::path& p) { write_table(t, p); },
             py::arg("path"))
        .def_static("load", [](const std::filesystem::path& p) { return read_table(p); }, py::arg("path"))
        .def("__eq__", [](const CriticalValueTable& a, const CriticalValueTable& b) { return a == b; });

    m.def("estimate_critical_values", &estimate, py::arg("specs"), py::arg("sample_sizes"),
          py::arg("alphas"), py::arg("replications") = 5000, py::arg("seed") = 20110101,
          py::arg("threads") = 0u);

    py::class_<ChangeRecord>(m, "ChangeRecord")
        .def_readonly("location", &ChangeRecord::location)
        .def_readonly("segment_start", &ChangeRecord::segment_start)
        .def_readonly("segment_end", &ChangeRecord::segment_end)
        .def_readonly("depth", &ChangeRecord::depth)
        .def_readonly("local_k", &ChangeRecord::local_k)
        .def_readonly("statistic", &ChangeRecord::statistic)
        .def_readonly("critical_value", &ChangeRecord::critical_value)
        .def_readonly("provenance", &ChangeRecord::provenance)
        .def("__repr__", [](const ChangeRecord& c) {
            return "<ChangeRecord location=" + std::to_string(c.location) + ">";
        });

    m.def("binary_segment", [](const std::vector<double>& x, const StatisticSpec& spec, double alpha,
                               int min_segment, int max_depth, std::optional<CriticalValueTable> table,
                               bool simulate_missing, int replications, std::uint64_t seed,
                               unsigned threads) {
        return segment(x, spec, alpha, min_segment, max_depth, table, simulate_missing, replications,
                       seed, threads)
            .changes;
    }, py::arg("x"), py::arg("spec") = StatisticSpec::lrt(), py::arg("alpha") = 0.05,
          py::arg("min_segment") = 20, py::arg("max_depth") = 10, py::arg("table") = py::none(),
          py::arg("simulate_missing") = true, py::arg("replications") = 5000,
          py::arg("seed") = 20110101, py::arg("threads") = 0u,
          "Change points found by recursive binary segmentation, ascending by location.");

#ifdef EXPCP_VERSION
    m.attr("__version__") = EXPCP_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
