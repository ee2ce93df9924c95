#pragma once

#include "risaoi/aoi.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace risaoi {

/// Everything a run or sweep needs, in configuration units (dB, dBm,
/// meters, radians). Conversion to linear units happens in
/// to_system_config and nowhere else.
struct ExperimentConfig {
    int horizon = 100;   // T
    int risCount = 5;    // N
    int devices = 20;    // 2I
    int elements = 30;   // L
    int assignedRis = 3; // k
    double pMaxDbm = 12.0;
    double thresholdDb = 45.0;
    double noiseDbm = -110.0;
    double dS = 5.0;
    double dW = 145.0;
    double dR = 150.0;
    double centralAngle = std::numbers::pi / 2.0;
    PathLossExponents exponents;
    double ricianK = 2.0;
    double bsHeight = 10.0;
    double risHeight = 10.0;
    double referencePathLossDb = 0.0;
    Age initialAge = 1;
    double sdpTolerance = kDefaultSdpTolerance;
    int sdpMaxIterations = kDefaultSdpMaxIterations;
    int grCandidates = 1000;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    std::string sweepVar = "none";
    std::vector<double> sweepValues;
    std::vector<std::uint64_t> seeds = default_seeds();
    std::string output = "results.csv";
    int jobs = 1;

    static std::vector<std::uint64_t> default_seeds() {
        std::vector<std::uint64_t> s(20);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = i + 1;
        return s;
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to exactly `v`; never
/// locale-dependent.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_real(std::string_view s, std::string_view key) {
    s = trim(s);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(std::string(key) + ": expected a finite number, got '" + std::string(s) + "'");
    return v;
}

template <typename Int>
Int parse_integer(std::string_view s, std::string_view key) {
    s = trim(s);
    Int v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// "1-3,7" -> {1, 2, 3, 7}. Order is kept; a repeated seed is an error.
inline std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
    std::vector<std::uint64_t> out;
    for (auto item : detail::split_list(s)) {
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(detail::parse_integer<std::uint64_t>(item, "seeds"));
            continue;
        }
        const auto lo = detail::parse_integer<std::uint64_t>(item.substr(0, dash), "seeds");
        const auto hi = detail::parse_integer<std::uint64_t>(item.substr(dash + 1), "seeds");
        if (hi < lo) throw ConfigError("seeds: empty range '" + std::string(item) + "'");
        if (hi - lo >= 10'000'000) throw ConfigError("seeds: range too large '" + std::string(item) + "'");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) throw ConfigError("seeds: empty list");
    std::vector<std::uint64_t> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (const auto d = std::adjacent_find(sorted.begin(), sorted.end()); d != sorted.end())
        throw ConfigError("seeds: seed " + std::to_string(*d) + " listed twice");
    return out;
}

/// Inverse of parse_seed_list; ascending runs collapse to "a-b".
inline std::string format_seed_list(const std::vector<std::uint64_t>& seeds) {
    std::string out;
    for (std::size_t i = 0; i < seeds.size();) {
        std::size_t j = i;
        while (j + 1 < seeds.size() && seeds[j + 1] == seeds[j] + 1) ++j;
        if (!out.empty()) out += ',';
        out += std::to_string(seeds[i]);
        if (j > i) out += '-' + std::to_string(seeds[j]);
        i = j + 1;
    }
    return out;
}

inline std::vector<Scheme> parse_scheme_list(std::string_view s) {
    std::vector<Scheme> out;
    for (auto item : detail::split_list(s)) {
        const auto sc = parse_scheme(item);
        if (!sc) throw ConfigError("schemes: unknown scheme '" + std::string(item) + "'");
        out.push_back(*sc);
    }
    return out;
}

inline std::string format_scheme_list(const std::vector<Scheme>& schemes) {
    std::string out;
    for (Scheme s : schemes) {
        if (!out.empty()) out += ',';
        out += scheme_name(s);
    }
    return out;
}

/// One configuration key.
struct ConfigField {
    std::string_view key;
    bool sweepable;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, std::string_view)> set;
};

namespace detail {

template <typename Access>
ConfigField real_field(std::string_view key, Access access) {
    return {key, true, [access](const ExperimentConfig& c) { return format_number(access(c)); },
            [access, key](ExperimentConfig& c, std::string_view v) { access(c) = parse_real(v, key); }};
}

template <typename Access>
ConfigField int_field(std::string_view key, Access access, bool sweepable = true) {
    return {key, sweepable, [access](const ExperimentConfig& c) { return std::to_string(access(c)); },
            [access, key](ExperimentConfig& c, std::string_view v) {
                using Int = std::remove_reference_t<decltype(access(c))>;
                access(c) = parse_integer<Int>(v, key);
            }};
}

}  // namespace detail

inline const std::vector<ConfigField>& config_fields() {
    using detail::int_field;
    using detail::real_field;
    static const std::vector<ConfigField> fields = {
        int_field("horizon", [](auto& c) -> auto& { return c.horizon; }),
        int_field("ris_count", [](auto& c) -> auto& { return c.risCount; }),
        int_field("devices", [](auto& c) -> auto& { return c.devices; }),
        int_field("elements", [](auto& c) -> auto& { return c.elements; }),
        int_field("assigned_ris", [](auto& c) -> auto& { return c.assignedRis; }),
        real_field("p_max_dbm", [](auto& c) -> auto& { return c.pMaxDbm; }),
        real_field("threshold_db", [](auto& c) -> auto& { return c.thresholdDb; }),
        real_field("noise_dbm", [](auto& c) -> auto& { return c.noiseDbm; }),
        real_field("d_s", [](auto& c) -> auto& { return c.dS; }),
        real_field("d_w", [](auto& c) -> auto& { return c.dW; }),
        real_field("d_r", [](auto& c) -> auto& { return c.dR; }),
        real_field("central_angle", [](auto& c) -> auto& { return c.centralAngle; }),
        real_field("exponent_ris_bs", [](auto& c) -> auto& { return c.exponents.risToBs; }),
        real_field("exponent_weak_ris", [](auto& c) -> auto& { return c.exponents.weakToRis; }),
        real_field("exponent_strong_bs", [](auto& c) -> auto& { return c.exponents.strongToBs; }),
        real_field("exponent_weak_bs", [](auto& c) -> auto& { return c.exponents.weakToBs; }),
        real_field("rician_k", [](auto& c) -> auto& { return c.ricianK; }),
        real_field("bs_height", [](auto& c) -> auto& { return c.bsHeight; }),
        real_field("ris_height", [](auto& c) -> auto& { return c.risHeight; }),
        real_field("reference_path_loss_db", [](auto& c) -> auto& { return c.referencePathLossDb; }),
        int_field("initial_age", [](auto& c) -> auto& { return c.initialAge; }),
        real_field("sdp_tolerance", [](auto& c) -> auto& { return c.sdpTolerance; }),
        int_field("sdp_max_iterations", [](auto& c) -> auto& { return c.sdpMaxIterations; }),
        int_field("gr_candidates", [](auto& c) -> auto& { return c.grCandidates; }),
        {"schemes", false, [](const ExperimentConfig& c) { return format_scheme_list(c.schemes); },
         [](ExperimentConfig& c, std::string_view v) { c.schemes = parse_scheme_list(v); }},
        {"sweep_var", false, [](const ExperimentConfig& c) { return c.sweepVar; },
         [](ExperimentConfig& c, std::string_view v) { c.sweepVar = std::string(detail::trim(v)); }},
        {"sweep_values", false,
         [](const ExperimentConfig& c) {
             std::string out;
             for (double v : c.sweepValues) out += (out.empty() ? "" : ",") + format_number(v);
             return out;
         },
         [](ExperimentConfig& c, std::string_view v) {
             c.sweepValues.clear();
             for (auto item : detail::split_list(v)) c.sweepValues.push_back(detail::parse_real(item, "sweep_values"));
         }},
        {"seeds", false, [](const ExperimentConfig& c) { return format_seed_list(c.seeds); },
         [](ExperimentConfig& c, std::string_view v) { c.seeds = parse_seed_list(v); }},
        {"output", false, [](const ExperimentConfig& c) { return c.output; },
         [](ExperimentConfig& c, std::string_view v) { c.output = std::string(detail::trim(v)); }},
        int_field("jobs", [](auto& c) -> auto& { return c.jobs; }, false),
    };
    return fields;
}

inline const ConfigField* find_config_field(std::string_view key) {
    for (const auto& f : config_fields())
        if (f.key == key) return &f;
    return nullptr;
}

inline void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
    const ConfigField* f = find_config_field(key);
    if (!f) throw ConfigError("unknown key '" + std::string(key) + "'");
    f->set(c, value);
}

/// Physical parameters in linear units.
inline SystemConfig to_system_config(const ExperimentConfig& c) {
    if (c.devices < 2 || c.devices % 2 != 0) throw ConfigError("devices: must be a positive even number (2I)");
    SystemConfig s;
    s.topology.clusters = c.devices / 2;
    s.topology.risCount = c.risCount;
    s.topology.dS = c.dS;
    s.topology.dW = c.dW;
    s.topology.dR = c.dR;
    s.topology.centralAngle = c.centralAngle;
    s.topology.bsHeight = c.bsHeight;
    s.topology.risHeight = c.risHeight;
    s.fading.ricianK = c.ricianK;
    s.fading.exponents = c.exponents;
    s.fading.referencePathLossDb = c.referencePathLossDb;
    s.elements = c.elements;
    s.assignedRis = c.assignedRis;
    s.horizon = c.horizon;
    s.budgetWatts = dbm_to_watts(c.pMaxDbm);
    s.thresholdLinear = db_to_linear(c.thresholdDb);
    s.noiseWatts = dbm_to_watts(c.noiseDbm);
    s.initialAge = c.initialAge;
    s.phase.grCandidates = c.grCandidates;
    s.phase.sdpTolerance = c.sdpTolerance;
    s.phase.sdpMaxIterations = c.sdpMaxIterations;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(s.phase.sdpTolerance > 0.0) || s.phase.sdpMaxIterations < 1 || s.phase.grCandidates < 1)
        throw ConfigError("solver settings: tolerance, iterations and GR candidates must be positive");
    return s;
}

/// Point of a sweep: the base config with the sweep key set to `value`.
inline ExperimentConfig at_sweep_point(const ExperimentConfig& base, double value) {
    ExperimentConfig c = base;
    if (base.sweepVar == "none") return c;
    set_config_value(c, base.sweepVar, format_number(value));
    return c;
}

inline void validate_experiment(const ExperimentConfig& c) {
    if (c.schemes.empty()) throw ConfigError("schemes: at least one scheme is required");
    if (c.seeds.empty()) throw ConfigError("seeds: at least one seed is required");
    if (c.jobs < 1) throw ConfigError("jobs: must be >= 1");
    if (c.sweepVar == "none") {
        if (!c.sweepValues.empty()) throw ConfigError("sweep_values: given without a sweep_var");
        to_system_config(c);
        return;
    }
    const ConfigField* f = find_config_field(c.sweepVar);
    if (!f || !f->sweepable) throw ConfigError("sweep_var: '" + c.sweepVar + "' is not a numeric parameter");
    if (c.sweepValues.empty()) throw ConfigError("sweep_values: empty sweep");
    for (double v : c.sweepValues) to_system_config(at_sweep_point(c, v));
}

/// Flat "key = value" text. Blank lines and lines starting with '#' are
/// skipped; a '#' preceded by whitespace starts a trailing comment. Keys
/// not present keep their defaults.
inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::vector<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        for (std::size_t i = 1; i < line.size(); ++i)
            if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line = line.substr(0, i);
                break;
            }
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) throw ConfigError(where + "duplicate key '" + key + "'");
        seen.push_back(key);
        try {
            set_config_value(c, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    validate_experiment(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Every key, one per line, in table order.
inline std::string write_config(const ExperimentConfig& c) {
    std::string out;
    for (const auto& f : config_fields()) out += std::string(f.key) + " = " + f.get(c) + "\n";
    return out;
}

struct RunRow {
    Scheme scheme;
    double sweepValue = 0.0;
    std::uint64_t seed = 0;
    double averageSumAoi = 0.0;
};

struct SummaryRow {
    Scheme scheme;
    double sweepValue = 0.0;
    double mean = 0.0;
    double ci95 = std::numeric_limits<double>::quiet_NaN();  // half-width; NaN below two seeds
    int count = 0;
};

struct SweepResult {
    std::string sweepVar;
    std::vector<RunRow> rows;
    std::vector<SummaryRow> summary;

    /// Per-seed values at one point, ordered by seed.
    std::vector<double> values(Scheme scheme, double sweepValue) const {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.scheme == scheme && r.sweepValue == sweepValue) out.push_back(r.averageSumAoi);
        return out;
    }

    const SummaryRow* find(Scheme scheme, double sweepValue) const {
        for (const auto& s : summary)
            if (s.scheme == scheme && s.sweepValue == sweepValue) return &s;
        return nullptr;
    }
};

/// Mean and 95% Student-t confidence half-width.
inline SummaryRow summarize(Scheme scheme, double sweepValue, const std::vector<double>& values) {
    SummaryRow s{scheme, sweepValue};
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        const double n = static_cast<double>(values.size());
        const double sd = std::sqrt(ss / (n - 1.0));
        const boost::math::students_t dist(n - 1.0);
        s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
    }
    return s;
}

inline bool row_order(const RunRow& a, const RunRow& b) {
    const auto na = scheme_name(a.scheme), nb = scheme_name(b.scheme);
    if (na != nb) return na < nb;
    if (a.sweepValue != b.sweepValue) return a.sweepValue < b.sweepValue;
    return a.seed < b.seed;
}

/// Runs every (sweep value, scheme, seed) combination on up to `jobs`
/// threads. Each run is independent and seeded by its own seed, so the
/// result does not depend on the thread count or completion order. The
/// optional cache shares optimized phases between points that only
/// differ in parameters the phases do not depend on.
inline SweepResult run_sweep(const ExperimentConfig& config, PhaseCache* cache = nullptr) {
    validate_experiment(config);
    const bool swept = config.sweepVar != "none";
    const std::vector<double> values = swept ? config.sweepValues : std::vector<double>{0.0};

    struct Task {
        std::size_t point;
        Scheme scheme;
        std::uint64_t seed;
    };
    std::vector<SystemConfig> systems;
    for (double v : values) systems.push_back(to_system_config(at_sweep_point(config, v)));
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < values.size(); ++p)
        for (Scheme s : config.schemes)
            for (auto seed : config.seeds) tasks.push_back({p, s, seed});

    std::vector<RunRow> rows(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            try {
                const auto r = run_horizon(systems[t.point], t.scheme, t.seed, false, cache);
                rows[i] = {t.scheme, values[t.point], t.seed, r.averageSumAoi};
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("run failed (scheme " + std::string(scheme_name(tasks[i].scheme)) + ", " +
                                     config.sweepVar + " = " + format_number(values[tasks[i].point]) + ", seed " +
                                     std::to_string(tasks[i].seed) + "): " + errors[i]);

    SweepResult out;
    out.sweepVar = config.sweepVar;
    std::sort(rows.begin(), rows.end(), row_order);
    out.rows = std::move(rows);
    for (std::size_t i = 0; i < out.rows.size();) {
        std::size_t j = i;
        std::vector<double> group;
        while (j < out.rows.size() && out.rows[j].scheme == out.rows[i].scheme &&
               out.rows[j].sweepValue == out.rows[i].sweepValue)
            group.push_back(out.rows[j++].averageSumAoi);
        out.summary.push_back(summarize(out.rows[i].scheme, out.rows[i].sweepValue, group));
        i = j;
    }
    return out;
}

/// "out.csv" -> "out_summary.csv"; other names get the suffix appended.
inline std::string summary_path(const std::string& dataPath) {
    const std::string ext = ".csv";
    if (dataPath.size() >= ext.size() && dataPath.compare(dataPath.size() - ext.size(), ext.size(), ext) == 0)
        return dataPath.substr(0, dataPath.size() - ext.size()) + "_summary.csv";
    return dataPath + "_summary.csv";
}

inline std::string data_csv(const SweepResult& r) {
    std::string out = "scheme,sweep_var,sweep_value,seed,avg_sum_aoi\n";
    for (const auto& row : r.rows)
        out += std::string(scheme_name(row.scheme)) + ',' + r.sweepVar + ',' + format_number(row.sweepValue) + ',' +
               std::to_string(row.seed) + ',' + format_number(row.averageSumAoi) + '\n';
    return out;
}

inline std::string summary_csv(const SweepResult& r) {
    std::string out = "scheme,sweep_value,mean,ci95\n";
    for (const auto& s : r.summary)
        out += std::string(scheme_name(s.scheme)) + ',' + format_number(s.sweepValue) + ',' + format_number(s.mean) +
               ',' + format_number(s.ci95) + '\n';
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Writes the data file and its summary companion.
inline void write_csv(const SweepResult& r, const std::string& path) {
    write_text_file(path, data_csv(r));
    write_text_file(summary_path(path), summary_csv(r));
}

/// Paired sign test on a[i] - b[i]. pGreater is the one-sided p-value for
/// "a tends to exceed b", pLess for the reverse; ties are dropped.
struct SignTest {
    int less = 0;
    int greater = 0;
    int ties = 0;
    double pGreater = 1.0;
    double pLess = 1.0;
};

inline double binomial_upper_tail_half(int n, int k) {
    // P(X >= k), X ~ Bin(n, 1/2)
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    const boost::math::binomial dist(n, 0.5);
    return boost::math::cdf(boost::math::complement(dist, k - 1));
}

inline SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sign_test: samples must be paired");
    SignTest t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) ++t.less;
        else if (a[i] > b[i]) ++t.greater;
        else ++t.ties;
    }
    const int n = t.less + t.greater;
    t.pGreater = binomial_upper_tail_half(n, t.greater);
    t.pLess = binomial_upper_tail_half(n, t.less);
    return t;
}

}  // namespace risaoi
