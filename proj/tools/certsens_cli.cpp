// Command-line driver: offline training, certified sensitivity runs,
// convergence sweeps, benchmark/fit/optimize, full-model comparison.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certsens/basis_io.hpp"
#include "certsens/budget.hpp"
#include "certsens/config.hpp"
#include "certsens/csv.hpp"
#include "certsens/pipeline.hpp"
#include "certsens/svg.hpp"

namespace fs = std::filesystem;
using namespace certsens;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct CommonOpts {
    std::string config_path;
    std::string basis_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::int64_t n_samples = 0;
    int n_basis = 0;
};

RunConfig resolve_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.threads > 0) cfg.threads = o.threads;
    if (o.n_samples > 0) cfg.n_samples = o.n_samples;
    if (o.n_basis > 0) cfg.n_basis = o.n_basis;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    return cfg;
}

void write_run_artifacts(const RunConfig& cfg, const std::string& metadata) {
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/config.txt", config_to_text(cfg));
    write_text_file(cfg.out_dir + "/metadata.txt", metadata);
}

std::string metadata_text(const RunConfig& cfg, const std::vector<std::pair<std::string, double>>& timings) {
    std::ostringstream os;
    os << "format_version=1\n"
       << "seed=" << cfg.seed << "\n"
       << "threads=" << cfg.threads << "\n";
    for (const auto& [k, v] : timings) os << k << "=" << v << "\n";
    return os.str();
}

ReducedBasis load_basis_checked(const std::string& path, const RunConfig& cfg) {
    if (path.empty()) throw ConfigError("--basis is required for this command");
    ReducedBasis rb = load_basis(path);
    const Discretization want = cfg.discretization();
    if (rb.disc.n_space != want.n_space || rb.disc.dt != want.dt ||
        rb.disc.t_final != want.t_final)
        throw ConfigError("basis discretization does not match the config");
    return rb;
}

std::vector<ParameterPoint> config_training_grid(const RunConfig& cfg) {
    return training_grid(cfg.nu_min, cfg.nu_max, cfg.train_nu, cfg.u0m_min, cfg.u0m_max,
                         cfg.train_u0m);
}

int cmd_offline(const CommonOpts& o) {
    RunConfig cfg = resolve_config(o);
    Timer t;
    const SnapshotSet snaps = collect_snapshots(config_training_grid(cfg), cfg.discretization());
    const ReducedBasis rb =
        build_basis(snaps, cfg.n_basis, BasisBuildOptions{1e-12, cfg.rank_fill});
    const double t_build = t.seconds();

    fs::create_directories(cfg.out_dir);
    const std::string basis_path =
        o.basis_path.empty() ? cfg.out_dir + "/basis.json" : o.basis_path;
    save_basis(rb, basis_path);
    write_run_artifacts(cfg, metadata_text(cfg, {{"offline_seconds", t_build}}));

    std::printf("snapshots: %zu (rank %d at 1e-12)\n", snaps.states.size(), rb.snapshot_rank);
    std::printf("POD spectrum:");
    for (std::size_t i = 0; i < rb.pod_spectrum.size() && i < 16; ++i)
        std::printf(" %.3e", rb.pod_spectrum[i]);
    std::printf("\nbasis (n=%d) written to %s\n", rb.online.n, basis_path.c_str());
    std::printf("offline wall time: %.3f s\n", t_build);
    return 0;
}

int cmd_sensitivity(const CommonOpts& o) {
    RunConfig cfg = resolve_config(o);
    const ReducedBasis rb = load_basis_checked(o.basis_path, cfg);
    auto online = std::make_shared<const ReducedOnline>(rb.online);

    Timer t;
    const SensitivityResult res =
        run_sensitivity(cfg.ranges(), cfg.n_samples, cfg.n_boot, cfg.alpha, cfg.seed,
                        make_reduced_evaluator(online), cfg.threads);
    const double t_online = t.seconds();

    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/sensitivity.csv", sensitivity_csv(res));
    std::ostringstream sum;
    for (const auto& r : res.rows) {
        sum << "S_" << input_name(r.input);
        if (r.bounds_unbounded)
            sum << ": sandwich unbounded (denominator interval straddles zero)\n";
        else
            sum << ": sandwich [" << fmt_double(r.bounds.s_min) << ", "
                << fmt_double(r.bounds.s_max) << "], combined CI [" << fmt_double(r.ci.lo)
                << ", " << fmt_double(r.ci.hi) << "]\n";
    }
    sum << "mean CI length: " << fmt_double(res.mean_ci_length) << "\n";
    write_text_file(cfg.out_dir + "/summary.txt", sum.str());
    write_run_artifacts(cfg, metadata_text(cfg, {{"online_seconds", t_online}}));
    std::fputs(sum.str().c_str(), stdout);
    std::printf("online wall time: %.3f s\n", t_online);
    return 0;
}

int cmd_convergence(const CommonOpts& o, const std::string& n_list_str) {
    RunConfig cfg = resolve_config(o);
    const ReducedBasis rb = load_basis_checked(o.basis_path, cfg);

    std::vector<int> n_list;
    std::stringstream ss(n_list_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) n_list.push_back(std::stoi(tok));
    if (n_list.empty()) throw ConfigError("--n-list must name at least one basis size");

    Timer t;
    const auto rows = run_convergence(rb, n_list, cfg.ranges(), cfg.n_samples, cfg.n_boot,
                                      cfg.alpha, cfg.seed, cfg.threads);
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/convergence.csv", convergence_csv(rows));

    SvgChart chart("Sandwich bounds and combined CI for the nu index", "reduced basis size n",
                   "index value");
    std::vector<double> xs, smin, smax, lo, hi;
    for (const auto& r : rows) {
        xs.push_back(r.n_basis);
        smin.push_back(r.bounds.s_min);
        smax.push_back(r.bounds.s_max);
        lo.push_back(r.ci.lo);
        hi.push_back(r.ci.hi);
    }
    chart.add_series("S^m", xs, smin);
    chart.add_series("S^M", xs, smax);
    chart.add_series("CI lower", xs, lo);
    chart.add_series("CI upper", xs, hi);
    write_text_file(cfg.out_dir + "/convergence.svg", chart.render());
    write_run_artifacts(cfg, metadata_text(cfg, {{"convergence_seconds", t.seconds()}}));
    std::printf("%s", convergence_csv(rows).c_str());
    return 0;
}

int cmd_benchmark(const CommonOpts& o, double p_target) {
    RunConfig cfg = resolve_config(o);
    const ReducedBasis rb = load_basis_checked(o.basis_path, cfg);

    std::vector<int> n_list;
    for (int n = 2; n <= rb.online.n; ++n) n_list.push_back(n);

    Timer t;
    BenchmarkData data = run_benchmark(rb, n_list, cfg.ranges(), cfg.n_samples, cfg.n_boot,
                                       cfg.alpha, cfg.seed, cfg.threads);
    // Unbounded sandwich widths (tiny n) carry no decay information.
    std::erase_if(data.sandwich, [](const SandwichWidthRecord& r) {
        return !std::isfinite(r.mean_width);
    });
    const PrecisionModel model = fit_precision_model(data.sandwich, data.sampling, cfg.alpha);
    const BudgetSolution sol = optimize_budget(model, p_target);
    const double t_total = t.seconds();

    std::ostringstream os;
    os << "sigma=" << fmt_double(model.sigma) << "\n"
       << "C=" << fmt_double(model.c_meta) << "\n"
       << "a=" << fmt_double(model.a_meta) << "\n"
       << "q_alpha=" << fmt_double(model.q_alpha) << "\n"
       << "p_target=" << fmt_double(p_target) << "\n"
       << "N_star=" << sol.n_samples << "\n"
       << "n_star=" << sol.n_basis << "\n"
       << "achieved_precision=" << fmt_double(sol.achieved_precision) << "\n"
       << "cost=" << fmt_double(sol.cost) << "\n";
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/budget.txt", os.str());
    write_run_artifacts(cfg, metadata_text(cfg, {{"benchmark_seconds", t_total}}));
    std::fputs(os.str().c_str(), stdout);
    return 0;
}

int cmd_compare_full(const CommonOpts& o) {
    RunConfig cfg = resolve_config(o);
    const ReducedBasis rb = load_basis_checked(o.basis_path, cfg);
    auto online = std::make_shared<const ReducedOnline>(rb.online);

    Timer t_red;
    const SensitivityResult red =
        run_sensitivity(cfg.ranges(), cfg.n_samples, cfg.n_boot, cfg.alpha, cfg.seed,
                        make_reduced_evaluator(online), cfg.threads);
    const double s_red = t_red.seconds();

    Timer t_full;
    const SensitivityResult full =
        run_sensitivity(cfg.ranges(), cfg.n_samples, cfg.n_boot, cfg.alpha, cfg.seed,
                        make_full_evaluator(cfg.discretization()), cfg.threads);
    const double s_full = t_full.seconds();

    std::ostringstream os;
    os << "pipeline,input,s_min,s_max,ci_lo,ci_hi\n";
    for (const auto& r : red.rows)
        os << "reduced," << input_name(r.input) << "," << fmt_double(r.bounds.s_min) << ","
           << fmt_double(r.bounds.s_max) << "," << fmt_double(r.ci.lo) << ","
           << fmt_double(r.ci.hi) << "\n";
    for (const auto& r : full.rows)
        os << "full," << input_name(r.input) << "," << fmt_double(r.bounds.s_min) << ","
           << fmt_double(r.bounds.s_max) << "," << fmt_double(r.ci.lo) << ","
           << fmt_double(r.ci.hi) << "\n";
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/compare.csv", os.str());
    write_run_artifacts(cfg, metadata_text(cfg, {{"reduced_pipeline_seconds", s_red},
                                                 {"full_pipeline_seconds", s_full},
                                                 {"speedup", s_full / s_red}}));
    std::fputs(os.str().c_str(), stdout);
    std::printf("reduced mean CI length: %s\nfull mean CI length: %s\n",
                fmt_double(red.mean_ci_length).c_str(), fmt_double(full.mean_ci_length).c_str());
    std::printf("reduced: %.3f s, full: %.3f s, speedup: %.2fx\n", s_red, s_full, s_full / s_red);
    return 0;
}

int cmd_export_pairs(const CommonOpts& o) {
    RunConfig cfg = resolve_config(o);
    const ReducedBasis rb = load_basis_checked(o.basis_path, cfg);
    auto online = std::make_shared<const ReducedOnline>(rb.online);
    const CertifiedEvaluator model = make_reduced_evaluator(online);

    fs::create_directories(cfg.out_dir);
    for (int i = 1; i <= 2; ++i) {
        const PickFreezeDesign design =
            generate_design(cfg.ranges(), static_cast<std::size_t>(cfg.n_samples), i, cfg.seed);
        const CertifiedPairs pairs = evaluate_pairs(design, model, cfg.threads);
        std::ostringstream os;
        write_pairs_csv(os, pairs);
        const std::string path = cfg.out_dir + "/pairs_" + input_name(i) + ".csv";
        write_text_file(path, os.str());
        std::printf("wrote %s (N=%zu)\n", path.c_str(), pairs.size());
    }
    write_run_artifacts(cfg, metadata_text(cfg, {}));
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_basis = true) {
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--seed", o.seed, "RNG seed override")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--threads", o.threads, "worker cap override");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--N", o.n_samples, "Monte-Carlo sample size override");
    cmd->add_option("--n", o.n_basis, "reduced basis size override");
    if (with_basis) cmd->add_option("--basis", o.basis_path, "reduced basis file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified reduced-basis Sobol sensitivity toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string n_list_str = "2,3,4,5,6,7,8,9,10";
    double p_target = 0.02;

    CLI::App* offline = app.add_subcommand("offline", "collect snapshots and build the basis");
    add_common(offline, o);
    CLI::App* sens = app.add_subcommand("sensitivity", "certified Sobol run for both inputs");
    add_common(sens, o);
    CLI::App* conv = app.add_subcommand("convergence", "sandwich/CI sweep over basis sizes");
    add_common(conv, o);
    conv->add_option("--n-list", n_list_str, "comma-separated basis sizes");
    CLI::App* bench = app.add_subcommand("benchmark", "fit precision model and optimize (N, n)");
    add_common(bench, o);
    bench->add_option("--p-target", p_target, "target mean CI length");
    CLI::App* comp = app.add_subcommand("compare-full", "reduced vs full pipeline comparison");
    add_common(comp, o);
    CLI::App* expp = app.add_subcommand("export-pairs", "export certified pairs as CSV");
    add_common(expp, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (offline->parsed()) return cmd_offline(o);
        if (sens->parsed()) return cmd_sensitivity(o);
        if (conv->parsed()) return cmd_convergence(o, n_list_str);
        if (bench->parsed()) return cmd_benchmark(o, p_target);
        if (comp->parsed()) return cmd_compare_full(o);
        if (expp->parsed()) return cmd_export_pairs(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InfeasibleRounding& e) {
        std::fprintf(stderr, "infeasible optimization: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
