#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ranklab/cache.hpp"
#include "ranklab/calpha.hpp"
#include "ranklab/config.hpp"
#include "ranklab/construction.hpp"
#include "ranklab/orbit.hpp"
#include "ranklab/sidon.hpp"
#include "ranklab/spectral.hpp"

namespace ranklab {

inline constexpr const char* kVersion = "0.1.0";

struct HeightsTask {
    std::uint64_t J = 1;
};
struct SidonTask {
    std::uint64_t J = 1;
};
struct ClassifyTask {
    std::uint64_t d_min = 1;
    std::uint64_t d_max = 25;
    std::optional<Rational> alpha;  // classify a bare exponent instead of the spec
};
struct OrbitTask {
    std::uint64_t stage = 1;
    BigInt level = 0;
    std::optional<DigitProvider> digits;  // default: seeded from the run seed
    std::uint64_t steps = 10;
    std::uint64_t stride = 1;
};
struct CorrelateTask {
    std::uint64_t j0 = 1;
    std::uint64_t M = 100;
    std::optional<std::uint64_t> max_stage;
};
enum class Precision { binary64, extended, decimal50 };
struct SpectrumTask {
    std::uint64_t j0 = 1;
    std::uint64_t M = 100;
    std::uint64_t d = 1;
    std::uint64_t N = 1024;
    Precision precision = Precision::binary64;
    bool force = false;
    std::optional<std::uint64_t> max_stage;
};

using Task = std::variant<HeightsTask, SidonTask, ClassifyTask, OrbitTask, CorrelateTask, SpectrumTask>;

inline const char* task_name(const Task& t) {
    static constexpr const char* names[] = {"heights", "sidon", "classify", "orbit", "correlate", "spectrum"};
    return names[t.index()];
}

inline const char* task_module(const Task& t) {
    static constexpr const char* modules[] = {"construction-core", "sidon-checker",  "calpha-classifier",
                                              "orbit-simulator",   "spectral-analyzer", "spectral-analyzer"};
    return modules[t.index()];
}

inline const char* task_operation(const Task& t) {
    static constexpr const char* ops[] = {"tower_heights", "check_construction", "classify_power",
                                          "iterate",       "autocorrelation",    "fejer_density"};
    return ops[t.index()];
}

inline const char* to_string(Precision p) {
    switch (p) {
    case Precision::binary64: return "double";
    case Precision::extended: return "long-double";
    case Precision::decimal50: return "float50";
    }
    return "?";
}

inline Precision parse_precision(const std::string& s) {
    if (s == "double") return Precision::binary64;
    if (s == "long-double") return Precision::extended;
    if (s == "float50") return Precision::decimal50;
    throw Error(ErrorCode::invalid_spec, "unknown precision '" + s + "' (double, long-double, float50)");
}

inline std::string describe(const DigitProvider& p) {
    if (auto e = std::get_if<ExplicitDigits>(&p)) {
        std::string s = "digits=";
        for (std::size_t i = 0; i < e->digits.size(); ++i) s += (i ? "," : "") + std::to_string(e->digits[i]);
        return s;
    }
    if (auto c = std::get_if<ConstantDigit>(&p)) return "constant=" + std::to_string(c->value);
    return "seed=" + std::to_string(std::get<SeededDigits>(p).seed);
}

inline std::string task_parameters(const Task& task) {
    return std::visit(
        [](const auto& t) -> std::string {
            using T = std::decay_t<decltype(t)>;
            auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : "default"; };
            if constexpr (std::is_same_v<T, HeightsTask> || std::is_same_v<T, SidonTask>)
                return "J=" + std::to_string(t.J);
            else if constexpr (std::is_same_v<T, ClassifyTask>)
                return "d=" + std::to_string(t.d_min) + ".." + std::to_string(t.d_max) +
                       (t.alpha ? " alpha=" + to_string(*t.alpha) : "");
            else if constexpr (std::is_same_v<T, OrbitTask>)
                return "stage=" + std::to_string(t.stage) + " level=" + t.level.str() +
                       (t.digits ? " " + describe(*t.digits) : "") + " steps=" + std::to_string(t.steps) +
                       " stride=" + std::to_string(t.stride);
            else if constexpr (std::is_same_v<T, CorrelateTask>)
                return "j0=" + std::to_string(t.j0) + " M=" + std::to_string(t.M) + " max_stage=" + opt(t.max_stage);
            else
                return "j0=" + std::to_string(t.j0) + " M=" + std::to_string(t.M) + " d=" + std::to_string(t.d) +
                       " N=" + std::to_string(t.N) + " precision=" + to_string(t.precision) +
                       " force=" + (t.force ? "true" : "false") + " max_stage=" + opt(t.max_stage);
        },
        task);
}

struct Flag {
    std::string kind;
    std::string detail;
};

struct TaskContext {
    std::string spec_hash;
    std::string family;
    std::uint64_t seed = 0;
};

namespace detail {

template <typename Real>
std::string format_real(const Real& x) {
    std::ostringstream os;
    if constexpr (std::is_floating_point_v<Real>) {
        os << std::setprecision(std::numeric_limits<Real>::max_digits10) << x;
    } else {
        os << x.str(std::numeric_limits<Real>::digits10);
    }
    return os.str();
}

inline std::string witness_text(const SidonVerdict& v) {
    if (!v.witness) return "-";
    const auto& w = *v.witness;
    return "m=" + w.m.str() + ";(" + std::to_string(w.first.from) + "," + std::to_string(w.first.to) + ");(" +
           std::to_string(w.second.from) + "," + std::to_string(w.second.to) + ")";
}

inline void emit_header(std::ostream& out, const Task& task, const TaskContext& ctx) {
    out << "# ranklab " << kVersion << "\n"
        << "# operation=" << task_operation(task) << " module=" << task_module(task) << "\n"
        << "# params=" << task_parameters(task) << "\n"
        << "# spec=" << ctx.spec_hash << " family=" << ctx.family << "\n"
        << "# seed=" << ctx.seed << "\n";
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const HeightsTask& t, const TaskContext&) {
    auto heights = tower_heights(c, t.J);
    out << "stage\theight\twidth\tmeasure\n";
    for (std::uint64_t j = 1; j <= t.J; ++j)
        out << j << '\t' << heights[j - 1] << '\t' << to_string(c.stage(j).w) << '\t'
            << to_string(stage_measure(c, j)) << '\n';
    return {};
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const SidonTask& t, const TaskContext&) {
    auto verdicts = check_construction(c, t.J);
    out << "stage\tis_sidon\tmargin\twitness\n";
    for (const auto& v : verdicts)
        out << v.j << '\t' << (v.is_sidon ? "true" : "false") << '\t' << (v.margin ? v.margin->str() : "-") << '\t'
            << witness_text(v) << '\n';
    std::vector<Flag> flags;
    if (auto f = first_failure(verdicts))
        flags.push_back({"not_sidon", "first failing stage " + std::to_string(f->j) + " " + witness_text(*f)});
    return flags;
}

inline void emit_reports(std::ostream& out, const std::vector<ClassificationReport>& reps) {
    out << "d\tconservative\tspectral\tcons_exponent\tcons_collapsed\tac_exponent\tac_collapsed\t"
           "sing_exponent\tsing_collapsed\tannotation\n";
    for (const auto& r : reps) {
        std::string ann;
        for (std::size_t i = 0; i < r.annotations.size(); ++i) ann += (i ? "; " : "") + r.annotations[i];
        out << r.d << '\t' << (r.conservative ? "conservative" : "dissipative") << '\t' << to_string(r.spectral)
            << '\t' << to_string(r.conservativity.exponent) << '\t' << to_string(r.conservativity.collapsed) << '\t'
            << to_string(r.absolute_continuity.exponent) << '\t' << to_string(r.absolute_continuity.collapsed)
            << '\t' << to_string(r.singularity.exponent) << '\t' << to_string(r.singularity.collapsed) << '\t'
            << (ann.empty() ? "-" : ann) << '\n';
    }
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const ClassifyTask& t, const TaskContext&) {
    if (t.d_min < 1 || t.d_max < t.d_min) throw Error(ErrorCode::invalid_spec, "need 1 <= d_min <= d_max");
    std::vector<ClassificationReport> reps;
    std::vector<Flag> flags;
    if (t.alpha) {
        out << "# alpha=" << to_string(*t.alpha) << " (membership in C(alpha) assumed)\n";
        for (std::uint64_t d = t.d_min; d <= t.d_max; ++d) reps.push_back(classify_power(*t.alpha, d));
        emit_reports(out, reps);
        return flags;
    }
    const auto* fam = std::get_if<CAlphaFamily>(&c.spec().source);
    if (!fam) {
        std::string msg = "not in C(alpha): family '" + c.spec().family + "' has no block structure with summable r";
        if (std::holds_alternative<ExplicitStages>(c.spec().source)) {
            try {
                if (auto a = infer_alpha(c.spec()))
                    msg += " (finite stage list matches alpha=" + to_string(*a) + ", but summability is unverifiable)";
            } catch (const Error&) {
            }
        }
        throw Error(ErrorCode::not_calpha, msg);
    }
    require_calpha(*fam);
    auto inferred = infer_alpha(c.spec());
    if (!inferred) throw Error(ErrorCode::not_calpha, "block lengths match no rational alpha");
    out << "# alpha=" << to_string(*inferred) << " inferred from block lengths\n";
    auto sidon = family_sidon_blocks(*fam, c.spec().h1, 3);
    for (const auto& v : sidon) {
        out << "# spacer rule on block " << v.j << ": " << (v.is_sidon ? "sidon" : "not sidon") << "\n";
        if (!v.is_sidon) flags.push_back({"not_sidon", "spacer rule fails on block " + std::to_string(v.j)});
    }
    CAlphaFamily effective = *fam;
    effective.alpha = *inferred;
    for (const auto& conflict : claim_conflicts(effective)) {
        std::string detail = "d=" + std::to_string(conflict.claim.d) + " claimed " +
                             to_string(conflict.claim.property) +
                             (conflict.claim.label.empty() ? "" : " (" + conflict.claim.label + ")") + "; computed " +
                             (conflict.claim.property == ClaimedProperty::conservative ||
                                      conflict.claim.property == ClaimedProperty::dissipative
                                  ? std::string(conflict.computed.conservative ? "conservative" : "dissipative")
                                  : std::string(to_string(conflict.computed.spectral))) +
                             " at alpha=" + to_string(*inferred);
        out << "# conflict: " << detail << "\n";
        flags.push_back({"claim_conflict", detail});
    }
    for (std::uint64_t d = t.d_min; d <= t.d_max; ++d) reps.push_back(classify_power(effective, d));
    emit_reports(out, reps);
    return flags;
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const OrbitTask& t, const TaskContext& ctx) {
    if (t.stride < 1) throw Error(ErrorCode::invalid_spec, "stride must be >= 1");
    DigitProvider digits = t.digits.value_or(DigitProvider{SeededDigits{ctx.seed}});
    if (t.level < 0 || t.level >= c.height(t.stage))
        throw Error(ErrorCode::invalid_spec, "start level outside tower " + std::to_string(t.stage), t.stage);
    OrbitPoint p = make_point(t.stage, t.level, digits);
    out << "step\tstage\tlevel\n";
    out << 0 << '\t' << p.stage << '\t' << p.level << '\n';
    for (std::uint64_t s = 0; s < t.steps;) {
        std::uint64_t n = std::min(t.stride, t.steps - s);
        p = iterate(c, std::move(p), BigInt(n));
        s += n;
        out << s << '\t' << p.stage << '\t' << p.level << '\n';
    }
    return {};
}

inline CorrelationOptions correlation_options(const std::optional<std::uint64_t>& max_stage) {
    CorrelationOptions o;
    o.max_stage = max_stage;
    return o;
}

inline void emit_table_comments(std::ostream& out, const CorrelationTable& table) {
    out << "# stage=" << table.stage << " stabilized_at="
        << (table.stabilized_at ? std::to_string(*table.stabilized_at) : "-")
        << " unstable_lags=" << table.unstable_lags.size() << "\n";
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const CorrelateTask& t, const TaskContext&) {
    auto table = autocorrelation(c, t.j0, t.M, correlation_options(t.max_stage));
    emit_table_comments(out, table);
    out << "m\tc_m\tstable\n";
    std::size_t u = 0;
    for (std::uint64_t m = 0; m <= t.M; ++m) {
        bool unstable = u < table.unstable_lags.size() && table.unstable_lags[u] == m;
        if (unstable) ++u;
        out << m << '\t' << to_string(table.values[m]) << '\t' << (unstable ? "false" : "true") << '\n';
    }
    std::vector<Flag> flags;
    if (!table.stable())
        flags.push_back({"unstable_lags", std::to_string(table.unstable_lags.size()) + " lags not stabilized by stage " +
                                              std::to_string(table.stage)});
    return flags;
}

template <typename Real>
void emit_grid(std::ostream& out, const CorrelationTable& table, const SpectrumTask& t) {
    auto grid = fejer_density<Real>(table, t.d, t.N, t.force);
    Real sum = 0, lo = grid.values.empty() ? Real(0) : grid.values[0];
    for (const auto& v : grid.values) {
        sum += v;
        if (v < lo) lo = v;
    }
    out << "# grid_mean=" << format_real<Real>(sum / Real(t.N)) << " grid_min=" << format_real<Real>(lo)
        << " aliasing=" << (grid.aliasing ? "true" : "false") << "\n";
    out << "t\ttheta\tf\n";
    const Real two_pi = boost::math::constants::two_pi<Real>();
    for (std::uint64_t k = 0; k < t.N; ++k)
        out << k << '\t' << format_real<Real>(two_pi * Real(k) / Real(t.N)) << '\t' << format_real<Real>(grid.values[k])
            << '\n';
}

inline std::vector<Flag> emit(std::ostream& out, const Construction& c, const SpectrumTask& t, const TaskContext&) {
    auto table = autocorrelation(c, t.j0, t.M, correlation_options(t.max_stage));
    emit_table_comments(out, table);
    auto diag = spectral_diagnostics(table, t.d, t.N, 0.01, t.force);
    out << "# power_sum_2d=" << to_string(diag.power_sum_2d) << " power_sum_d=" << to_string(diag.power_sum_d)
        << " top1pct_mass=" << format_real<double>(diag.concentration) << "\n";
    switch (t.precision) {
    case Precision::binary64: emit_grid<double>(out, table, t); break;
    case Precision::extended: emit_grid<long double>(out, table, t); break;
    case Precision::decimal50: emit_grid<Float50>(out, table, t); break;
    }
    std::vector<Flag> flags;
    if (t.N < 2 * t.M + 2) flags.push_back({"aliasing", "N < 2M + 2"});
    if (!table.stable()) flags.push_back({"forced_unstable", "grid uses stage values of unstabilized lags"});
    return flags;
}

inline std::uint64_t get_u64(const YAML::Node& params, const char* key, std::uint64_t fallback) {
    return params && params[key] ? u64(params[key], key) : fallback;
}

inline std::optional<std::uint64_t> get_opt_u64(const YAML::Node& params, const char* key) {
    if (params && params[key]) return u64(params[key], key);
    return std::nullopt;
}

inline Task task_from_yaml(const YAML::Node& entry) {
    if (!entry.IsMap() || entry.size() != 1) fail(entry, "tasks", "each task is a mapping with one key (the task name)");
    auto it = entry.begin();
    std::string name = it->first.as<std::string>();
    YAML::Node params = it->second;
    if (params && !params.IsNull() && !params.IsMap()) fail(params, name, "task parameters must be a mapping");
    if (params.IsNull()) params = YAML::Node(YAML::NodeType::Map);
    if (name == "heights") {
        only_keys(params, {"J"}, name);
        return HeightsTask{get_u64(params, "J", 1)};
    }
    if (name == "sidon") {
        only_keys(params, {"J"}, name);
        return SidonTask{get_u64(params, "J", 1)};
    }
    if (name == "classify") {
        only_keys(params, {"d_min", "d_max", "alpha"}, name);
        ClassifyTask t;
        t.d_min = get_u64(params, "d_min", 1);
        t.d_max = get_u64(params, "d_max", 25);
        if (params["alpha"]) t.alpha = rational(params["alpha"], "alpha");
        return t;
    }
    if (name == "orbit") {
        only_keys(params, {"stage", "level", "digits", "seed", "constant", "steps", "stride"}, name);
        OrbitTask t;
        t.stage = get_u64(params, "stage", 1);
        if (params["level"]) t.level = big(params["level"], "level");
        t.steps = get_u64(params, "steps", 10);
        t.stride = get_u64(params, "stride", 1);
        int sources = !!params["digits"] + !!params["seed"] + !!params["constant"];
        if (sources > 1) fail(params, name, "give at most one of digits, seed, constant");
        if (params["digits"]) {
            ExplicitDigits e;
            e.first_stage = t.stage;
            for (const auto& d : params["digits"]) e.digits.push_back(u64(d, "digits"));
            t.digits = e;
        } else if (params["seed"]) {
            t.digits = SeededDigits{u64(params["seed"], "seed")};
        } else if (params["constant"]) {
            t.digits = ConstantDigit{u64(params["constant"], "constant")};
        }
        return t;
    }
    if (name == "correlate") {
        only_keys(params, {"j0", "M", "max_stage"}, name);
        CorrelateTask t;
        t.j0 = get_u64(params, "j0", 1);
        t.M = get_u64(params, "M", 100);
        t.max_stage = get_opt_u64(params, "max_stage");
        return t;
    }
    if (name == "spectrum") {
        only_keys(params, {"j0", "M", "d", "N", "precision", "force", "max_stage"}, name);
        SpectrumTask t;
        t.j0 = get_u64(params, "j0", 1);
        t.M = get_u64(params, "M", 100);
        t.d = get_u64(params, "d", 1);
        t.N = get_u64(params, "N", 1024);
        if (params["precision"]) {
            try {
                t.precision = parse_precision(scalar(params["precision"], "precision"));
            } catch (const Error& e) {
                fail(params["precision"], "precision", e.what());
            }
        }
        if (params["force"]) t.force = boolean(params["force"], "force");
        t.max_stage = get_opt_u64(params, "max_stage");
        return t;
    }
    fail(it->first, name, "unknown task (heights, sidon, classify, orbit, correlate, spectrum)");
}

}  // namespace detail

/// Runs one task, writing its header and rows to `out`.
inline std::vector<Flag> run_task(std::ostream& out, const Construction& c, const Task& task, const TaskContext& ctx) {
    detail::emit_header(out, task, ctx);
    return std::visit([&](const auto& t) { return detail::emit(out, c, t, ctx); }, task);
}

struct ExperimentConfig {
    ConstructionSpec spec;
    std::uint64_t seed = 0;
    std::filesystem::path output = "report";
    CachePolicy cache = CachePolicy::read_write;
    std::optional<std::filesystem::path> cache_dir;  // falls back to RANKLAB_CACHE_DIR
    Limits limits;
    std::vector<Task> tasks;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Relative paths in the config resolve against `base_dir`.
inline ExperimentConfig parse_experiment(const std::string& text, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    YAML::Node root = load_yaml(text);
    if (!root.IsMap()) throw Error(ErrorCode::invalid_spec, "experiment config must be a mapping");
    only_keys(root, {"spec", "seed", "output", "cache", "cache_dir", "caps", "tasks"}, "");
    ExperimentConfig cfg;
    const auto& spec = root["spec"];
    if (!spec) fail(root, "spec", "missing");
    if (spec.IsMap()) {
        cfg.spec = spec_from_yaml(spec);
    } else {
        std::string ref = scalar(spec, "spec");
        auto path = base_dir / ref;
        std::string body;
        try {
            body = read_file(path);
        } catch (const Error& e) {
            fail(spec, "spec", e.what());
        }
        try {
            cfg.spec = parse_spec(body);
        } catch (const Error& e) {
            throw Error(ErrorCode::invalid_spec, path.string() + ": " + e.what(), e.stage());
        }
    }
    if (root["seed"]) cfg.seed = u64(root["seed"], "seed");
    cfg.output = (base_dir / (root["output"] ? scalar(root["output"], "output") : std::string("report"))).lexically_normal();
    if (root["cache"]) {
        std::string p = scalar(root["cache"], "cache");
        if (p == "off") cfg.cache = CachePolicy::off;
        else if (p == "read-only") cfg.cache = CachePolicy::read_only;
        else if (p == "read-write") cfg.cache = CachePolicy::read_write;
        else fail(root["cache"], "cache", "expected off, read-only or read-write");
    }
    if (root["cache_dir"]) cfg.cache_dir = (base_dir / scalar(root["cache_dir"], "cache_dir")).lexically_normal();
    if (const auto& caps = root["caps"]) {
        only_keys(caps, {"max_columns", "max_enumeration"}, "caps");
        cfg.limits.max_columns = get_u64(caps, "max_columns", cfg.limits.max_columns);
        cfg.limits.max_enumeration = get_u64(caps, "max_enumeration", cfg.limits.max_enumeration);
        if (cfg.limits.max_columns == 0 || cfg.limits.max_enumeration == 0)
            fail(caps, "caps", "caps must be positive");
    }
    if (const auto& tasks = root["tasks"]) {
        if (!tasks.IsSequence()) fail(tasks, "tasks", "expected a list");
        for (const auto& t : tasks) cfg.tasks.push_back(task_from_yaml(t));
    }
    return cfg;
}

struct TaskRecord {
    std::size_t index = 0;
    std::string name;
    std::string artifact;
    bool ok = true;
    std::string detail;
    std::vector<Flag> flags;
    double seconds = 0;
};

struct RunResult {
    bool ok = true;
    std::filesystem::path manifest;
    std::vector<TaskRecord> tasks;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
};

/// Artifacts NN_<task>.tsv plus manifest.tsv form the report bundle and are
/// byte-identical across runs of one config. Timings and cache statistics
/// vary from run to run and go to runinfo.tsv.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output);
    const std::string hash = spec_hash(cfg.spec);

    std::shared_ptr<DiskStageStore> store;
    auto dir = cfg.cache_dir ? cfg.cache_dir : cache_dir_from_env();
    if (dir && cfg.cache != CachePolicy::off) store = std::make_shared<DiskStageStore>(*dir, hash, cfg.cache);
    Construction c(cfg.spec, cfg.limits, store);
    TaskContext ctx{hash, cfg.spec.family, cfg.seed};

    RunResult result;
    for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
        const Task& task = cfg.tasks[i];
        TaskRecord rec;
        rec.index = i + 1;
        rec.name = task_name(task);
        std::ostringstream name;
        name << std::setw(2) << std::setfill('0') << rec.index << '_' << rec.name << ".tsv";
        rec.artifact = name.str();
        auto t0 = std::chrono::steady_clock::now();
        std::ostringstream body;
        try {
            rec.flags = run_task(body, c, task, ctx);
        } catch (const Error& e) {
            rec.ok = false;
            rec.detail = std::string(to_string(e.code())) + ": " + e.what();
            body << "# error: " << rec.detail << "\n";
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream(cfg.output / rec.artifact, std::ios::binary) << body.str();
        result.ok = result.ok && rec.ok;
        result.tasks.push_back(std::move(rec));
    }

    std::ostringstream m;
    m << "# ranklab report manifest\n"
      << "# version=" << kVersion << "\n"
      << "# spec_hash=" << hash << "\n"
      << "# spec_family=" << cfg.spec.family << "\n"
      << "# seed=" << cfg.seed << "\n"
      << "# tasks=" << cfg.tasks.size() << "\n";
    for (const auto& w : c.warnings()) m << "# warning=" << w << "\n";
    m << "record\tindex\ttask\tmodule\toperation\tparameters\tartifact\tstatus\tdetail\n";
    for (std::size_t i = 0; i < result.tasks.size(); ++i) {
        const auto& rec = result.tasks[i];
        const Task& task = cfg.tasks[i];
        m << "task\t" << rec.index << '\t' << rec.name << '\t' << task_module(task) << '\t' << task_operation(task)
          << '\t' << task_parameters(task) << '\t' << rec.artifact << '\t' << (rec.ok ? "ok" : "failed") << '\t'
          << (rec.detail.empty() ? "-" : rec.detail) << '\n';
        for (const auto& f : rec.flags)
            m << "flag\t" << rec.index << '\t' << rec.name << '\t' << task_module(task) << '\t' << f.kind << '\t'
              << task_parameters(task) << '\t' << rec.artifact << "\tflagged\t" << f.detail << '\n';
    }
    result.manifest = cfg.output / "manifest.tsv";
    std::ofstream(result.manifest, std::ios::binary) << m.str();

    std::ostringstream info;
    info << "key\tvalue\n";
    if (store) {
        result.cache_hits = store->hits();
        result.cache_misses = store->misses();
        info << "cache_dir\t" << dir->string() << "\ncache_hits\t" << store->hits() << "\ncache_misses\t"
             << store->misses() << "\ncache_writes\t" << store->writes() << "\ncache_corrupt\t" << store->corrupt()
             << "\n";
        for (const auto& p : store->problems()) info << "cache_problem\t" << p << "\n";
    } else {
        info << "cache\toff\n";
    }
    for (const auto& rec : result.tasks) info << "seconds_task_" << rec.index << '\t' << rec.seconds << '\n';
    std::ofstream(cfg.output / "runinfo.tsv", std::ios::binary) << info.str();
    return result;
}

}  // namespace ranklab
