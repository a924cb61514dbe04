// Command-line front end: run single trajectories, horizon/seed sweeps,
// offline verification of recorded trajectories, and closed-form bound
// tables. Exit codes: 0 success, 1 check failure, 2 configuration or input
// error, 3 numerical abort.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adanorm/analysis.hpp"
#include "adanorm/bounds.hpp"
#include "adanorm/config.hpp"
#include "adanorm/experiments.hpp"
#include "adanorm/trajectory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;

adanorm::ExperimentConfig load_config(const std::string& path,
                                      const std::vector<std::string>& overrides) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw adanorm::ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    for (const auto& kv : overrides) text += "\n" + kv;
    return adanorm::parse_config_text(text);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

template <typename WriteFn>
void write_csv_file(const std::filesystem::path& path, WriteFn&& fn) {
    std::ostringstream ss;
    fn(ss);
    write_file(path, ss.str());
}

// Deterministic single-trajectory checks shared by `run` and the in-sweep
// verification: accumulator recurrence, step-size identity, proxy-step
// consistency, step decay, gradient drift, the log-sum inequality, and the
// compensation construction when the classification covers every step.
adanorm::CheckReport trajectory_checks(const adanorm::ExperimentConfig& cfg,
                                       const std::vector<adanorm::StepRecord>& records) {
    using namespace adanorm;
    CheckReport rep;
    const bool is_norm =
        cfg.optimizer_name == "adagrad_norm" || cfg.optimizer_name == "adagrad_norm_overstep";
    if (records.empty() || !is_norm) {
        rep.add("trajectory_checks", "no accumulator records", 0, 0, "skip");
        return rep;
    }
    const double b0_sq = cfg.b0 * cfg.b0;
    const auto rel_close = [](double a, double b) {
        return leq_with_tol(a, b) && leq_with_tol(b, a);
    };
    bool ok_acc = true, ok_eta = true, ok_proxy = true;
    double worst_gap = 0;
    CheckRecord acc{"accumulator_recurrence", "worst t=0", 0, 0, 0, ""};
    double prev_after = b0_sq;
    std::vector<double> log_sum_terms{b0_sq};
    for (const auto& r : records) {
        if (!r.b_sq_before || !r.b_sq_after || !r.eta_t) continue;
        const double expect_after = *r.b_sq_before + r.sgrad_norm_sq;
        ok_acc = ok_acc && rel_close(*r.b_sq_after, expect_after) &&
                 rel_close(*r.b_sq_before, prev_after);
        const double gap = std::abs(*r.b_sq_after - expect_after) / expect_after;
        if (gap > worst_gap || acc.detail == "worst t=0") {
            worst_gap = gap;
            acc.detail = "worst t=" + std::to_string(r.t);
            acc.lhs = gap;
            acc.rhs = kRelTol;
        }
        prev_after = *r.b_sq_after;
        const double eta_expect = cfg.eta / std::sqrt(*r.b_sq_after);
        ok_eta = ok_eta && rel_close(*r.eta_t, eta_expect);
        if (r.eta_tilde_t) {
            const double proxy = proxy_step_size(cfg.eta, *r.b_sq_before, r.grad_norm_sq,
                                                 cfg.sigma0, cfg.sigma1);
            ok_proxy = ok_proxy && rel_close(*r.eta_tilde_t, proxy);
        }
        log_sum_terms.push_back(r.sgrad_norm_sq);
    }
    acc.margin = acc.rhs - acc.lhs;
    acc.status = ok_acc ? "pass" : "fail";
    rep.records.push_back(acc);
    rep.add("step_size_identity", "eta_t = eta / sqrt(b_t^2)", 0, 0, ok_eta ? "pass" : "fail");
    rep.add("proxy_step_consistency", "recomputed from grad and noise scale", 0, 0,
            ok_proxy ? "pass" : "fail");
    rep.merge(check_step_decay(records, cfg.eta, b0_sq));
    const double L = make_objective(cfg)->smoothness();
    rep.merge(check_gradient_drift(records, cfg.eta, L, b0_sq));
    rep.merge(check_log_sum_inequality(log_sum_terms));
    const auto cls = classify_times(records, cfg.sigma1, ClassifyRule::bias_threshold);
    if (cls.unknown.empty() && cfg.sigma1 > 0) {
        const auto asg = build_compensation_sets(cls);
        rep.merge(check_compensation_dichotomy(asg));
        rep.merge(
            verify_compensation_inequality(records, asg, cfg.eta, L, cfg.sigma0, cfg.sigma1));
    }
    return rep;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            std::int64_t T, std::int64_t seed, const std::string& out_dir) {
    using namespace adanorm;
    const ExperimentConfig cfg = load_config(config_path, overrides);
    if (T < 0) throw ConfigError("T must be >= 0");
    if (seed < 0) throw ConfigError("seed must be >= 0");
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const Trajectory traj = run_trajectory(cfg, T, static_cast<std::uint64_t>(seed));
    const RunSummary summary = summarize(cfg, traj);
    CheckReport rep = trajectory_checks(cfg, traj.records);
    write_csv_file(out / "trajectory.csv",
                   [&](std::ostream& os) { write_trajectory_csv(os, traj.records); });
    write_csv_file(out / "summary.csv",
                   [&](std::ostream& os) { write_summary_csv(os, {summary}); });
    write_csv_file(out / "report.csv",
                   [&](std::ostream& os) { write_report_csv(os, rep); });
    std::size_t failures = 0;
    for (const auto& r : rep.records)
        if (r.status == "fail") {
            ++failures;
            std::cout << "FAIL " << r.check << " (" << r.detail << ")\n";
        }
    std::cout << "run: T=" << T << " seed=" << seed << " min_grad_sq="
              << fmt17(summary.min_grad_sq) << " final_f=" << fmt17(summary.final_f)
              << " checks=" << rep.records.size() << " failures=" << failures << " wall_ms="
              << traj.wall_ms << "\n";
    if (traj.diverged) {
        std::cout << "numerical abort at t=" << traj.diverged_at << "\n";
        return kExitNumericalAbort;
    }
    return failures == 0 ? kExitOk : kExitCheckFailure;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_dir, int workers) {
    using namespace adanorm;
    const ExperimentConfig cfg = load_config(config_path, overrides);
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const SweepResult res = run_sweep(cfg, workers);
    write_csv_file(out / "summary.csv",
                   [&](std::ostream& os) { write_summary_csv(os, res.summaries); });
    write_csv_file(out / "goodset.csv",
                   [&](std::ostream& os) { write_goodset_csv(os, res.goodset); });
    write_csv_file(out / "rate_fit.csv",
                   [&](std::ostream& os) { write_rate_fit_csv(os, res.fits); });
    write_csv_file(out / "bound_comparison.csv",
                   [&](std::ostream& os) { write_bound_csv(os, res.bounds); });
    std::size_t check_failures = 0;
    for (const auto& r : res.checks.records)
        if (r.status == "fail") {
            ++check_failures;
            std::cout << "FAIL " << r.check << " (" << r.detail << ")\n";
        }
    for (const auto& r : res.bounds)
        if (r.status == "fail")
            std::cout << "FAIL bound " << r.check << " T=" << r.T << "\n";
    for (const auto& f : res.fits)
        std::cout << "fit " << f.statistic << ": slope=" << fmt17(f.slope)
                  << " r_squared=" << fmt17(f.r_squared) << "\n";
    std::cout << "sweep: cells=" << res.summaries.size() << " checks="
              << res.checks.records.size() << " check_failures=" << check_failures
              << " bounds_pass=" << (res.bounds_pass ? 1 : 0) << " wall_ms="
              << res.wall_ms_total << "\n";
    if (res.any_diverged) {
        std::cout << "numerical abort: at least one cell diverged\n";
        return kExitNumericalAbort;
    }
    return res.deterministic_pass && res.bounds_pass ? kExitOk : kExitCheckFailure;
}

int cmd_verify(const std::string& config_path, const std::vector<std::string>& overrides,
               const std::string& trajectory_path, const std::string& report_path) {
    using namespace adanorm;
    const ExperimentConfig cfg = load_config(config_path, overrides);
    std::ifstream in(trajectory_path);
    if (!in) throw ConfigError("cannot open trajectory file: " + trajectory_path);
    const std::vector<StepRecord> records = read_trajectory_csv(in);
    const CheckReport rep = trajectory_checks(cfg, records);
    if (!report_path.empty())
        write_csv_file(report_path, [&](std::ostream& os) { write_report_csv(os, rep); });
    std::size_t failures = 0;
    for (const auto& r : rep.records) {
        if (r.status == "fail") ++failures;
        std::cout << r.status << ' ' << r.check << " (" << r.detail << ")\n";
    }
    std::cout << "verify: " << rep.records.size() << " checks, " << failures << " failures\n";
    return failures == 0 ? kExitOk : kExitCheckFailure;
}

adanorm::ProblemParams params_from_options(double eta, double b0, double L, double sigma0,
                                           double sigma1, double grad1, double f1,
                                           double f_star) {
    adanorm::ProblemParams p;
    p.eta = eta;
    p.b0 = b0;
    p.L = L;
    p.sigma0 = sigma0;
    p.sigma1 = sigma1;
    p.grad1_norm = grad1;
    p.f1 = f1;
    p.f_star = f_star;
    adanorm::validate(p);
    return p;
}

int cmd_constants(const adanorm::ProblemParams& p) {
    using namespace adanorm;
    const TheoremConstants c = theorem_constants(p);
    std::cout << "n_comp   = " << c.n_comp << "\n"
              << "c0       = " << fmt17(c.c0) << "\n"
              << "c0_tilde = " << fmt17(c.c0_tilde) << "\n"
              << "c1_tilde = " << fmt17(c.c1_tilde) << "\n"
              << "c1       = " << fmt17(c.c1) << "\n"
              << "c2       = " << fmt17(c.c2) << "\n";
    return kExitOk;
}

int cmd_bounds(const adanorm::ProblemParams& p, const std::vector<double>& horizons,
               const std::vector<double>& deltas) {
    using namespace adanorm;
    std::cout << "T,delta,sqrt_bound,small_noise_bound,sum_grad_bound\n";
    for (double T : horizons) {
        for (double delta : deltas) {
            std::cout << fmt17(T) << ',' << fmt17(delta) << ','
                      << fmt17(theorem_bound_sqrt(p, T, delta)) << ',';
            if (p.sigma1 <= 0.125)
                std::cout << fmt17(theorem_bound_small_noise(p, T, delta));
            else
                std::cout << "n/a (sigma1 > 1/8)";
            std::cout << ',' << fmt17(sum_grad_bound(p, T)) << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AdaGrad-Norm trajectory runner and guarantee checker"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", trajectory_path, report_path;
    std::vector<std::string> overrides;
    std::int64_t T = 1024, seed = 0;
    int workers = 0;
    double eta = 1, b0 = 1, L = 1, sigma0 = 0, sigma1 = 0, grad1 = 1, f1 = 1, f_star = 0;
    std::vector<double> horizons{1024, 4096, 16384}, deltas{0.5, 0.25, 0.1};

    auto add_config_opts = [&](CLI::App* sub, bool require_config) {
        auto* opt = sub->add_option("--config", config_path, "experiment config file");
        if (require_config) opt->required();
        sub->add_option("--set", overrides, "override as key=value (repeatable)");
    };
    auto add_param_opts = [&](CLI::App* sub) {
        sub->add_option("--eta", eta, "step-size scale");
        sub->add_option("--b0", b0, "accumulator floor");
        sub->add_option("--smoothness", L, "gradient Lipschitz constant");
        sub->add_option("--sigma0", sigma0, "additive noise scale");
        sub->add_option("--sigma1", sigma1, "multiplicative noise scale");
        sub->add_option("--grad1", grad1, "gradient norm at the initial point");
        sub->add_option("--f1", f1, "objective value at the initial point");
        sub->add_option("--fstar", f_star, "objective infimum");
    };

    CLI::App* run = app.add_subcommand("run", "run one trajectory and check it");
    add_config_opts(run, false);
    run->add_option("--T", T, "number of steps");
    run->add_option("--seed", seed, "seed index");
    run->add_option("--out", out_dir, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "run the horizon x seed grid");
    add_config_opts(sweep, false);
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--workers", workers, "worker threads (0 = auto)");

    CLI::App* verify = app.add_subcommand("verify", "re-check a recorded trajectory");
    add_config_opts(verify, false);
    verify->add_option("--trajectory", trajectory_path, "trajectory csv to verify")
        ->required();
    verify->add_option("--report", report_path, "write check report csv here");

    CLI::App* constants = app.add_subcommand("constants", "print the guarantee constants");
    add_param_opts(constants);

    CLI::App* bounds = app.add_subcommand("bounds", "tabulate the closed-form bounds");
    add_param_opts(bounds);
    bounds->add_option("--T", horizons, "horizons to tabulate");
    bounds->add_option("--delta", deltas, "failure probabilities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, overrides, T, seed, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, overrides, out_dir, workers);
        if (verify->parsed())
            return cmd_verify(config_path, overrides, trajectory_path, report_path);
        if (constants->parsed())
            return cmd_constants(
                params_from_options(eta, b0, L, sigma0, sigma1, grad1, f1, f_star));
        if (bounds->parsed())
            return cmd_bounds(params_from_options(eta, b0, L, sigma0, sigma1, grad1, f1, f_star),
                              horizons, deltas);
    } catch (const adanorm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const adanorm::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kExitNumericalAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
