// lab: command-line front end for ranklab experiments.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "ranklab/experiment.hpp"

namespace {

using namespace ranklab;

struct SpecArgs {
    std::string spec_path;
    std::string family;
    std::string cache = "read-write";
};

void add_spec_flags(CLI::App* cmd, SpecArgs& a) {
    auto* spec = cmd->add_option("--spec", a.spec_path, "construction spec file");
    auto* fam = cmd->add_option("--family", a.family, "named family (paper-example, paper-example-alpha19, odometer)");
    spec->excludes(fam);
    cmd->add_option("--cache", a.cache, "stage cache policy")->check(CLI::IsMember({"off", "read-only", "read-write"}));
}

ConstructionSpec load_spec(const SpecArgs& a) {
    if (!a.spec_path.empty()) {
        try {
            return parse_spec(read_file(a.spec_path));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::io) throw;
            throw Error(e.code(), a.spec_path + ": " + e.what(), e.stage());
        }
    }
    return named_family(a.family.empty() ? "paper-example" : a.family);
}

int run_single(const SpecArgs& a, const Task& task, std::uint64_t seed) {
    ConstructionSpec spec = load_spec(a);
    std::string hash = spec_hash(spec);
    std::shared_ptr<DiskStageStore> store;
    CachePolicy policy = a.cache == "off" ? CachePolicy::off
                         : a.cache == "read-only" ? CachePolicy::read_only
                                                  : CachePolicy::read_write;
    if (auto dir = cache_dir_from_env(); dir && policy != CachePolicy::off)
        store = std::make_shared<DiskStageStore>(*dir, hash, policy);
    Construction c(spec, Limits{}, store);
    auto flags = run_task(std::cout, c, task, TaskContext{hash, spec.family, seed});
    for (const auto& w : c.warnings()) std::cerr << "warning: " << w << "\n";
    for (const auto& f : flags) std::cerr << "flag " << f.kind << ": " << f.detail << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact experiments on rank-one cutting-and-stacking transformations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ranklab::kVersion));

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config and write a report bundle");
    run->add_option("config", config_path, "experiment config file")->required();

    SpecArgs sa;
    std::uint64_t seed = 0;

    HeightsTask heights;
    auto* h_cmd = app.add_subcommand("heights", "tower heights, widths and measures");
    add_spec_flags(h_cmd, sa);
    h_cmd->add_option("--J", heights.J, "last stage")->check(CLI::PositiveNumber);

    SidonTask sidon;
    auto* s_cmd = app.add_subcommand("sidon", "Sidon check per stage");
    add_spec_flags(s_cmd, sa);
    s_cmd->add_option("--J", sidon.J, "last stage")->check(CLI::PositiveNumber);

    ClassifyTask classify;
    std::string alpha;
    auto* c_cmd = app.add_subcommand("classify", "conservativity and spectral type of tensor powers");
    add_spec_flags(c_cmd, sa);
    c_cmd->add_option("--alpha", alpha, "classify a bare exponent, e.g. 19 or 1/2");
    c_cmd->add_option("--d-min", classify.d_min);
    c_cmd->add_option("--d-max", classify.d_max);

    OrbitTask orbit;
    std::string level = "0";
    std::vector<std::uint64_t> digits;
    std::uint64_t constant = 0;
    std::uint64_t orbit_seed = 0;
    auto* o_cmd = app.add_subcommand("orbit", "orbit of a point");
    add_spec_flags(o_cmd, sa);
    o_cmd->add_option("--stage", orbit.stage)->check(CLI::PositiveNumber);
    o_cmd->add_option("--level", level, "start level (decimal)");
    auto* o_digits = o_cmd->add_option("--digits", digits, "column digits for stages stage, stage+1, ...")->delimiter(',');
    auto* o_const = o_cmd->add_option("--constant", constant, "same column digit at every stage");
    auto* o_seed = o_cmd->add_option("--seed", orbit_seed, "seeded random column digits");
    o_digits->excludes(o_const)->excludes(o_seed);
    o_const->excludes(o_seed);
    o_cmd->add_option("--steps", orbit.steps);
    o_cmd->add_option("--stride", orbit.stride)->check(CLI::PositiveNumber);

    CorrelateTask corr;
    std::uint64_t corr_max = 0;
    auto* r_cmd = app.add_subcommand("correlate", "autocorrelation table c_m of the base level set");
    add_spec_flags(r_cmd, sa);
    r_cmd->add_option("--j0", corr.j0)->check(CLI::PositiveNumber);
    r_cmd->add_option("--M", corr.M);
    auto* r_max = r_cmd->add_option("--max-stage", corr_max);

    SpectrumTask spec_task;
    std::string precision = "double";
    std::uint64_t spec_max = 0;
    auto* f_cmd = app.add_subcommand("spectrum", "Fejer density of the d-fold convolution power");
    add_spec_flags(f_cmd, sa);
    f_cmd->add_option("--j0", spec_task.j0)->check(CLI::PositiveNumber);
    f_cmd->add_option("--M", spec_task.M);
    f_cmd->add_option("--d", spec_task.d)->check(CLI::PositiveNumber);
    f_cmd->add_option("--N", spec_task.N)->check(CLI::PositiveNumber);
    f_cmd->add_option("--precision", precision)->check(CLI::IsMember({"double", "long-double", "float50"}));
    f_cmd->add_flag("--force", spec_task.force, "use stage values of lags that never stabilized");
    auto* f_max = f_cmd->add_option("--max-stage", spec_max);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::filesystem::path path(config_path);
            ExperimentConfig cfg = parse_experiment(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
            RunResult res = run_experiment(cfg);
            for (const auto& t : res.tasks)
                std::cout << t.artifact << '\t' << (t.ok ? "ok" : "failed") << (t.ok ? "" : "\t" + t.detail) << '\n';
            std::cout << res.manifest.string() << '\n';
            return res.ok ? 0 : 1;
        }
        if (h_cmd->parsed()) return run_single(sa, heights, seed);
        if (s_cmd->parsed()) return run_single(sa, sidon, seed);
        if (c_cmd->parsed()) {
            if (!alpha.empty()) classify.alpha = parse_rational(alpha);
            return run_single(sa, classify, seed);
        }
        if (o_cmd->parsed()) {
            orbit.level = parse_bigint(level);
            if (!digits.empty()) orbit.digits = ExplicitDigits{orbit.stage, digits};
            else if (o_const->count()) orbit.digits = ConstantDigit{constant};
            else if (o_seed->count()) orbit.digits = SeededDigits{orbit_seed};
            return run_single(sa, orbit, seed);
        }
        if (r_cmd->parsed()) {
            if (r_max->count()) corr.max_stage = corr_max;
            return run_single(sa, corr, seed);
        }
        if (f_cmd->parsed()) {
            spec_task.precision = parse_precision(precision);
            if (f_max->count()) spec_task.max_stage = spec_max;
            return run_single(sa, spec_task, seed);
        }
    } catch (const ranklab::Error& e) {
        std::cerr << "error (" << ranklab::to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    }
    return 0;
}
