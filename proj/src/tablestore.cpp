#include "expcp/tablestore.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "expcp/error.hpp"

namespace expcp {
namespace {

constexpr const char* kTitle = "# expcp critical-value table";
constexpr const char* kFormatPrefix = "# format: ";
constexpr const char* kMetaPrefix = "# meta: ";
constexpr const char* kWarningPrefix = "# warning: ";

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw FormatError("table line " + std::to_string(line_no) + ": " + what);
}

template <class T>
T parse_number(const std::string& field, std::size_t line_no, const char* column) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        fail(line_no, std::string("bad ") + column + " value '" + field + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) fail(line_no, std::string(column) + " is not finite");
    }
    return value;
}

void check_single_line(const std::string& text) {
    if (text.find('\n') != std::string::npos || text.find('\r') != std::string::npos) {
        throw InputError("table metadata must not contain line breaks");
    }
}

}  // namespace

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_table(const CriticalValueTable& table, std::ostream& out) {
    out << kTitle << '\n' << kFormatPrefix << kTableFormatVersion << '\n';
    for (const auto& [key, value] : table.metadata()) {
        if (key.find('=') != std::string::npos) throw InputError("metadata key must not contain '='");
        check_single_line(key);
        check_single_line(value);
        out << kMetaPrefix << key << '=' << value << '\n';
    }
    for (const auto& w : table.warnings()) {
        check_single_line(w);
        out << kWarningPrefix << w << '\n';
    }
    out << kTableColumns << '\n';
    for (const auto& [key, entry] : table.entries()) {
        const bool phi = key.spec.kind == StatKind::PhiFamily;
        out << kind_token(key.spec.kind) << ',' << (phi ? format_real(key.spec.lambda) : "") << ','
            << (phi ? format_real(key.spec.epsilon) : "") << ',' << key.sample_size << ','
            << format_real(key.alpha) << ',' << format_real(entry.critical_value) << ','
            << entry.replications << ',' << entry.master_seed << '\n';
    }
}

void write_table(const CriticalValueTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    write_table(table, out);
    out.flush();
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

CriticalValueTable read_table(std::istream& in) {
    CriticalValueTable table;
    std::map<TableKey, std::size_t> seen;
    bool have_version = false;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (starts_with(line, kFormatPrefix)) {
                const std::string v = line.substr(std::string(kFormatPrefix).size());
                if (v != std::to_string(kTableFormatVersion)) {
                    fail(line_no, "unsupported table format version '" + v + "' (expected " +
                                      std::to_string(kTableFormatVersion) + ")");
                }
                have_version = true;
            } else if (starts_with(line, kMetaPrefix)) {
                const std::string kv = line.substr(std::string(kMetaPrefix).size());
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos) fail(line_no, "metadata line without '='");
                table.metadata()[kv.substr(0, eq)] = kv.substr(eq + 1);
            } else if (starts_with(line, kWarningPrefix)) {
                table.warnings().push_back(line.substr(std::string(kWarningPrefix).size()));
            } else if (starts_with(line, "#") || line.empty()) {
                continue;
            } else if (line == kTableColumns) {
                if (!have_version) fail(line_no, "header row before '# format:' line");
                have_header = true;
            } else {
                fail(line_no, std::string("expected header row '") + kTableColumns + "'");
            }
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8) fail(line_no, "expected 8 fields, got " + std::to_string(f.size()));

        TableKey key;
        try {
            key.spec.kind = parse_kind_token(f[0]);
        } catch (const InputError& e) {
            fail(line_no, e.what());
        }
        if (key.spec.kind == StatKind::PhiFamily) {
            key.spec.lambda = parse_number<double>(f[1], line_no, "lambda");
            key.spec.epsilon = parse_number<double>(f[2], line_no, "epsilon");
        } else if (!f[1].empty() || !f[2].empty()) {
            fail(line_no, "lambda/epsilon must be blank for " + f[0]);
        }
        try {
            key.spec.validate();
        } catch (const InputError& e) {
            fail(line_no, e.what());
        }
        key.sample_size = parse_number<int>(f[3], line_no, "K");
        key.alpha = parse_number<double>(f[4], line_no, "alpha");
        if (key.sample_size < 2) fail(line_no, "K must be at least 2");
        if (!(key.alpha > 0.0 && key.alpha < 1.0)) fail(line_no, "alpha must lie in (0, 1)");

        TableEntry entry;
        entry.critical_value = parse_number<double>(f[5], line_no, "critical_value");
        entry.replications = parse_number<int>(f[6], line_no, "B");
        entry.master_seed = parse_number<std::uint64_t>(f[7], line_no, "seed");
        if (entry.replications < 1) fail(line_no, "B must be positive");

        const auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted) {
            throw FormatError("duplicate entry (" + key.spec.label() + ", K=" +
                              std::to_string(key.sample_size) + ", alpha=" + format_real(key.alpha) +
                              ") on lines " + std::to_string(it->second) + " and " +
                              std::to_string(line_no));
        }
        table.insert(key, entry);
    }
    if (!have_header) throw FormatError("table has no header row");
    return table;
}

CriticalValueTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingTableError("cannot open table file '" + path.string() + "'");
    return read_table(in);
}

std::string LookupResult::provenance() const {
    std::ostringstream out;
    out << "table entry " << key.spec.label() << " K=" << key.sample_size << " alpha=" << key.alpha
        << " B=" << entry.replications << " seed=" << entry.master_seed;
    if (warning) out << " [" << *warning << "]";
    return out.str();
}

LookupResult lookup(const CriticalValueTable& table, const StatisticSpec& spec, int sample_size,
                    double alpha, LookupPolicy policy) {
    const TableKey wanted{spec, sample_size, alpha};
    if (const TableEntry* hit = table.find(wanted)) {
        return {hit->critical_value, wanted, *hit, std::nullopt};
    }
    std::ostringstream miss;
    miss << "no critical value for (" << spec.label() << ", K=" << sample_size
         << ", alpha=" << alpha << ")";
    if (policy == LookupPolicy::Exact) {
        throw MissingTableError(miss.str() + "; simulate it with `expcp critvals`");
    }
    const std::pair<const TableKey, TableEntry>* best = nullptr;
    for (const auto& item : table.entries()) {
        const TableKey& k = item.first;
        if (!(k.spec == spec) || k.alpha != alpha) continue;
        if (best == nullptr) {
            best = &item;
            continue;
        }
        const int d = std::abs(k.sample_size - sample_size);
        const int d_best = std::abs(best->first.sample_size - sample_size);
        if (d < d_best || (d == d_best && k.sample_size < best->first.sample_size)) best = &item;
    }
    if (best == nullptr) {
        throw MissingTableError(miss.str() + " at any K; simulate it with `expcp critvals`");
    }
    LookupResult out{best->second.critical_value, best->first, best->second, std::nullopt};
    out.warning = "requested K=" + std::to_string(sample_size) + " not tabulated; using nearest K=" +
                  std::to_string(best->first.sample_size);
    return out;
}

}  // namespace expcp
