#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "adanorm/analysis.hpp"
#include "adanorm/bounds.hpp"
#include "adanorm/config.hpp"
#include "adanorm/csv.hpp"
#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"
#include "adanorm/rng.hpp"
#include "adanorm/trajectory.hpp"

namespace adanorm {

struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<StepRecord> records;
    std::int64_t T = 0;
    std::uint64_t seed_index = 0;
    bool diverged = false;
    std::int64_t diverged_at = 0;  // step of the first non-finite value, 0 if none
    double wall_ms = 0;
};

// Cross-run roll-up of one trajectory. wall_ms is carried in memory for
// operator feedback but serialized as an empty cell: output files must be
// byte-identical across repeats and worker counts, and wall time is not.
struct RunSummary {
    std::int64_t T = 0;
    std::uint64_t seed = 0;
    double min_grad_sq = 0;
    double sum_grad_sq = 0;
    std::optional<double> b_T_sq;
    double final_f = 0;
    std::int64_t bad_count = 0;
    double coverage = 0;
    bool diverged = false;
    double wall_ms = 0;
};

inline constexpr const char* kSummaryHeader =
    "T,seed,min_grad_sq,sum_grad_sq,b_T_sq,final_f,bad_count,coverage,diverged,wall_ms";

inline void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows) {
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << r.T << ',' << r.seed << ',' << fmt17(r.min_grad_sq) << ','
           << fmt17(r.sum_grad_sq) << ',' << fmt_opt(r.b_T_sq) << ',' << fmt17(r.final_f)
           << ',' << r.bad_count << ',' << fmt17(r.coverage) << ',' << (r.diverged ? 1 : 0)
           << ",\n";
    }
}

inline StreamId trajectory_stream(std::uint64_t base_seed, std::int64_t T,
                                  std::uint64_t seed_index) {
    return derive_stream(base_seed, static_cast<std::uint64_t>(T), seed_index,
                         std::string_view("drive"));
}

inline StreamId bias_stream(std::uint64_t base_seed, std::int64_t T, std::uint64_t seed_index,
                            std::int64_t t) {
    StreamId id = trajectory_stream(base_seed, T, seed_index);
    id = chain(id, std::string_view("bias"));
    return chain(id, static_cast<std::uint64_t>(t));
}

// Runs one trajectory of T steps from the seed-indexed stream. Instrumented
// steps resample the oracle from an isolated stream keyed by (seed, t), so
// instrumentation never perturbs the trajectory itself. A non-finite iterate,
// gradient, or objective value aborts the run with the offending step
// recorded and the diverged flag set.
inline Trajectory run_trajectory(const ExperimentConfig& cfg, std::int64_t T,
                                 std::uint64_t seed_index) {
    validate_config(cfg);
    if (T < 0) throw std::invalid_argument("T must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();
    const auto obj = make_objective(cfg);
    const NoiseModel nm = make_noise_model(cfg);
    const std::int64_t stride = resolve_bias_stride(cfg, T);

    const bool is_norm = cfg.optimizer_name == "adagrad_norm" ||
                         cfg.optimizer_name == "adagrad_norm_overstep";
    const bool overstep = cfg.optimizer_name == "adagrad_norm_overstep";
    AdaGradNormState norm_st;
    CoordinateAdaGradState coord_st;
    TunedSgdState sgd_st;
    GdState gd_st;
    const Vec* w = nullptr;
    if (is_norm) {
        norm_st = make_adagrad_norm(obj->initial_point(), cfg.eta, cfg.b0);
        w = &norm_st.w;
    } else if (cfg.optimizer_name == "coordinate_adagrad") {
        coord_st = make_coordinate_adagrad(obj->initial_point(), cfg.eta, cfg.b0);
        w = &coord_st.w;
    } else if (cfg.optimizer_name == "tuned_sgd") {
        sgd_st = make_tuned_sgd(obj->initial_point(), obj->smoothness(), cfg.sigma0, cfg.sigma1,
                                cfg.d_tilde, std::max<std::int64_t>(T, 1));
        w = &sgd_st.w;
    } else {
        gd_st = make_gd(obj->initial_point(), cfg.eta);
        w = &gd_st.w;
    }

    Trajectory traj;
    traj.T = T;
    traj.seed_index = seed_index;
    traj.records.reserve(static_cast<std::size_t>(T));
    RngStream drive(trajectory_stream(cfg.base_seed, T, seed_index));
    Vec grad_true, g;
    for (std::int64_t t = 1; t <= T; ++t) {
        StepRecord rec;
        rec.t = t;
        rec.f = obj->eval(*w);
        obj->grad(*w, grad_true);
        rec.grad_norm_sq = norm_sq(grad_true);
        if (!std::isfinite(rec.f) || !std::isfinite(rec.grad_norm_sq) || !all_finite(*w)) {
            traj.diverged = true;
            traj.diverged_at = t;
            traj.records.push_back(rec);
            break;
        }
        if (is_norm) {
            const double b_before = static_cast<double>(norm_st.b_sq);
            rec.eta_tilde_t =
                proxy_step_size(cfg.eta, b_before, rec.grad_norm_sq, nm.sigma0, nm.sigma1);
            if (stride > 0 && (t - 1) % stride == 0) {
                RngStream bias_rng(bias_stream(cfg.base_seed, T, seed_index, t));
                const BiasEstimate be =
                    estimate_bias(grad_true, nm, b_before, cfg.bias_samples, bias_rng);
                rec.bias_est = be.bias_est;
                rec.bias_se = be.se_mean_ratio;
                rec.is_good = nm.sigma1 == 0.0 || 1.0 - nm.sigma1 * be.bias_est >= 0.5;
            }
        }
        apply_noise(grad_true, nm, drive, g);
        if (!all_finite(g)) {
            traj.diverged = true;
            traj.diverged_at = t;
            traj.records.push_back(rec);
            break;
        }
        StepInfo info;
        if (is_norm) {
            info = overstep ? adagrad_norm_overstep_step(norm_st, g)
                            : adagrad_norm_step(norm_st, g);
        } else if (cfg.optimizer_name == "coordinate_adagrad") {
            info = coordinate_adagrad_step(coord_st, g);
        } else if (cfg.optimizer_name == "tuned_sgd") {
            info = tuned_sgd_step(sgd_st, g);
        } else {
            info = gd_step(gd_st, g);
        }
        rec.sgrad_norm_sq = info.sgrad_norm_sq;
        rec.step_norm_sq = info.step_norm_sq;
        if (!std::isnan(info.b_sq_before)) rec.b_sq_before = info.b_sq_before;
        if (!std::isnan(info.b_sq_after)) rec.b_sq_after = info.b_sq_after;
        if (!std::isnan(info.eta_t)) rec.eta_t = info.eta_t;
        traj.records.push_back(rec);
        if (!all_finite(*w)) {
            traj.diverged = true;
            traj.diverged_at = t;
            break;
        }
    }
    traj.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t0)
                       .count();
    return traj;
}

// Summary statistics are derived from the records alone: minima and sums of
// the true gradient norms at the visited iterates w_1..w_T, and the final
// recorded objective value and accumulator. T = 0 reports the initial point.
inline RunSummary summarize(const ExperimentConfig& cfg, const Trajectory& traj) {
    RunSummary s;
    s.T = traj.T;
    s.seed = traj.seed_index;
    s.diverged = traj.diverged;
    s.wall_ms = traj.wall_ms;
    if (traj.records.empty()) {
        const auto obj = make_objective(cfg);
        const Vec& w1 = obj->initial_point();
        s.min_grad_sq = norm_sq(obj->grad_at(w1));
        s.sum_grad_sq = 0;
        s.final_f = obj->eval(w1);
        s.b_T_sq = cfg.b0 * cfg.b0;
        s.coverage = 1.0;
        return s;
    }
    long double sum = 0.0L;
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& r : traj.records) {
        if (std::isfinite(r.grad_norm_sq)) {
            sum += r.grad_norm_sq;
            mn = std::min(mn, r.grad_norm_sq);
        }
    }
    s.min_grad_sq = mn;
    s.sum_grad_sq = static_cast<double>(sum);
    s.final_f = traj.records.back().f;
    s.b_T_sq = traj.records.back().b_sq_after;
    const auto cls = classify_times(traj.records, cfg.sigma1, ClassifyRule::bias_threshold);
    s.bad_count = static_cast<std::int64_t>(cls.bad.size());
    s.coverage = cls.coverage;
    return s;
}

struct GoodsetRow {
    std::int64_t T = 0;
    std::uint64_t seed = 0;
    std::int64_t bad_count = 0;
    double coverage = 0;
    double bad_scaled = 0;
};

inline constexpr const char* kGoodsetHeader = "T,seed,bad_count,coverage,bad_scaled";

inline void write_goodset_csv(std::ostream& os, const std::vector<GoodsetRow>& rows) {
    os << kGoodsetHeader << '\n';
    for (const auto& r : rows)
        os << r.T << ',' << r.seed << ',' << r.bad_count << ',' << fmt17(r.coverage) << ','
           << fmt17(r.bad_scaled) << '\n';
}

struct RateFit {
    std::string statistic;
    int n_horizons = 0;
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::vector<std::pair<std::int64_t, double>> medians;
};

inline constexpr const char* kRateFitHeader =
    "statistic,n_horizons,slope,intercept,r_squared";

inline void write_rate_fit_csv(std::ostream& os, const std::vector<RateFit>& fits) {
    os << kRateFitHeader << '\n';
    for (const auto& f : fits)
        os << f.statistic << ',' << f.n_horizons << ',' << fmt17(f.slope) << ','
           << fmt17(f.intercept) << ',' << fmt17(f.r_squared) << '\n';
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Order statistic q_{1-delta}: smallest value whose empirical CDF reaches
// 1 - delta.
inline double upper_quantile(std::vector<double> v, double delta) {
    if (v.empty()) throw std::invalid_argument("quantile of empty set");
    std::sort(v.begin(), v.end());
    const double target = (1.0 - delta) * static_cast<double>(v.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(target));
    if (idx > 0) --idx;
    idx = std::min(idx, v.size() - 1);
    return v[idx];
}

// Least-squares fit of ln(median statistic) against ln T. Requires at least
// four horizons and positive medians.
inline RateFit fit_rate(const std::string& statistic,
                        const std::vector<std::pair<std::int64_t, double>>& medians) {
    if (medians.size() < 4)
        throw std::invalid_argument("rate fit needs at least 4 horizon points");
    RateFit fit;
    fit.statistic = statistic;
    fit.medians = medians;
    fit.n_horizons = static_cast<int>(medians.size());
    const std::size_t n = medians.size();
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [T, m] : medians) {
        if (!(m > 0)) throw std::invalid_argument("rate fit needs positive medians");
        const long double x = std::log(static_cast<double>(T));
        const long double y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const long double denom = n * sxx - sx * sx;
    fit.slope = static_cast<double>((n * sxy - sx * sy) / denom);
    fit.intercept = static_cast<double>((sy - fit.slope * sx) / n);
    long double ss_res = 0, ss_tot = 0;
    const long double ybar = sy / static_cast<long double>(n);
    for (const auto& [T, m] : medians) {
        const long double y = std::log(m);
        const long double yh = fit.slope * std::log(static_cast<double>(T)) + fit.intercept;
        ss_res += (y - yh) * (y - yh);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0 ? static_cast<double>(1.0L - ss_res / ss_tot) : 1.0;
    return fit;
}

struct BoundRow {
    std::string check;
    std::int64_t T = 0;
    std::optional<double> delta;
    double observed = 0;
    double bound = 0;
    std::string status;  // pass | fail | vacuous
};

inline constexpr const char* kBoundHeader = "check,T,delta,observed,bound,slack_ratio,status";

inline void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
    os << kBoundHeader << '\n';
    for (const auto& r : rows) {
        const double slack =
            r.observed > 0 ? r.bound / r.observed : std::numeric_limits<double>::infinity();
        os << r.check << ',' << r.T << ',' << fmt_opt(r.delta) << ',' << fmt17(r.observed)
           << ',' << fmt17(r.bound) << ',' << fmt17(slack) << ',' << r.status << '\n';
    }
}

inline ProblemParams problem_params(const ExperimentConfig& cfg) {
    const auto obj = make_objective(cfg);
    ProblemParams p;
    p.eta = cfg.eta;
    p.b0 = cfg.b0;
    p.L = obj->smoothness();
    p.sigma0 = cfg.sigma0;
    p.sigma1 = cfg.sigma1;
    p.grad1_norm = norm(obj->grad_at(obj->initial_point()));
    p.f1 = obj->eval(obj->initial_point());
    p.f_star = obj->infimum();
    return p;
}

// Quantile and moment comparisons of observed statistics against the
// closed-form guarantees, per horizon and failure probability.
inline std::vector<BoundRow> compare_to_bound(const ExperimentConfig& cfg,
                                              const std::vector<RunSummary>& summaries,
                                              const std::vector<double>& deltas) {
    const ProblemParams p = problem_params(cfg);
    std::vector<BoundRow> rows;
    std::vector<std::int64_t> horizons;
    for (const auto& s : summaries)
        if (horizons.empty() || horizons.back() != s.T) horizons.push_back(s.T);
    for (std::int64_t T : horizons) {
        if (T < 1) continue;
        std::vector<double> mins, sums;
        for (const auto& s : summaries)
            if (s.T == T) {
                mins.push_back(s.min_grad_sq);
                sums.push_back(s.sum_grad_sq);
            }
        for (double delta : deltas) {
            BoundRow row;
            row.check = "min_grad_quantile_vs_sqrt_bound";
            row.T = T;
            row.delta = delta;
            if (delta >= 1.0) {
                row.status = "vacuous";
                rows.push_back(row);
                continue;
            }
            row.observed = upper_quantile(mins, delta);
            row.bound = theorem_bound_sqrt(p, static_cast<double>(T), delta);
            row.status = leq_with_tol(row.observed, row.bound) ? "pass" : "fail";
            rows.push_back(row);
            if (p.sigma1 <= 0.125) {
                BoundRow sn = row;
                sn.check = "min_grad_quantile_vs_small_noise_bound";
                sn.bound = theorem_bound_small_noise(p, static_cast<double>(T), delta);
                sn.status = leq_with_tol(sn.observed, sn.bound) ? "pass" : "fail";
                rows.push_back(sn);
            }
        }
        BoundRow sg;
        sg.check = "mean_sum_grad_vs_envelope";
        sg.T = T;
        long double acc = 0;
        for (double v : sums) acc += v;
        sg.observed = static_cast<double>(acc / sums.size());
        sg.bound = sum_grad_bound(p, static_cast<double>(T));
        sg.status = leq_with_tol(sg.observed, sg.bound) ? "pass" : "fail";
        rows.push_back(sg);
    }
    return rows;
}

struct SweepResult {
    std::vector<RunSummary> summaries;  // T-major, then seed, ascending
    std::vector<GoodsetRow> goodset;
    std::vector<RateFit> fits;
    std::vector<BoundRow> bounds;
    CheckReport checks;           // per-trajectory deterministic checks, canonical order
    bool deterministic_pass = true;
    bool bounds_pass = true;
    bool any_diverged = false;
    double wall_ms_total = 0;
};

inline int default_workers() {
    if (const char* env = std::getenv("ADANORM_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs the horizon x seed grid. Cells execute on `workers` threads; every
// result lands in its preassigned slot and all aggregation happens in
// canonical cell order afterwards, so outputs are identical for any worker
// count or scheduling.
inline SweepResult run_sweep(const ExperimentConfig& cfg, int workers = 0) {
    validate_config(cfg);
    if (workers <= 0) workers = default_workers();
    struct Cell {
        RunSummary summary;
        GoodsetRow goodset;
        CheckReport checks;
        bool diverged = false;
    };
    const std::size_t n_cells = cfg.horizons.size() * static_cast<std::size_t>(cfg.seeds);
    std::vector<Cell> cells(n_cells);
    std::atomic<std::size_t> next{0};
    const bool is_norm = cfg.optimizer_name == "adagrad_norm" ||
                         cfg.optimizer_name == "adagrad_norm_overstep";

    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_cells) break;
            const std::int64_t T = cfg.horizons[i / cfg.seeds];
            const std::uint64_t seed = i % cfg.seeds;
            Cell& cell = cells[i];
            const Trajectory traj = run_trajectory(cfg, T, seed);
            cell.summary = summarize(cfg, traj);
            cell.diverged = traj.diverged;
            cell.goodset = GoodsetRow{T, seed, cell.summary.bad_count, cell.summary.coverage,
                                      cell.summary.coverage > 0
                                          ? cell.summary.bad_count / cell.summary.coverage
                                          : 0.0};
            if (is_norm && !traj.diverged && !traj.records.empty()) {
                const std::string where =
                    "T=" + std::to_string(T) + " seed=" + std::to_string(seed) + " ";
                CheckReport rep = check_step_decay(traj.records, cfg.eta, cfg.b0 * cfg.b0);
                const auto obj_L = make_objective(cfg)->smoothness();
                rep.merge(
                    check_gradient_drift(traj.records, cfg.eta, obj_L, cfg.b0 * cfg.b0));
                const auto cls =
                    classify_times(traj.records, cfg.sigma1, ClassifyRule::bias_threshold);
                if (cls.unknown.empty() && cfg.sigma1 > 0) {
                    const auto asg = build_compensation_sets(cls);
                    rep.merge(check_compensation_dichotomy(asg));
                    rep.merge(verify_compensation_inequality(traj.records, asg, cfg.eta, obj_L,
                                                             cfg.sigma0, cfg.sigma1));
                }
                for (auto& r : rep.records) r.detail = where + r.detail;
                cell.checks = std::move(rep);
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(workers, n_cells ? n_cells : 1);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    SweepResult res;
    res.summaries.reserve(n_cells);
    for (const auto& cell : cells) {
        res.summaries.push_back(cell.summary);
        res.goodset.push_back(cell.goodset);
        res.checks.merge(cell.checks);
        res.any_diverged = res.any_diverged || cell.diverged;
        res.wall_ms_total += cell.summary.wall_ms;
    }
    res.deterministic_pass = res.checks.all_pass();

    if (cfg.horizons.size() >= 4 && !res.any_diverged) {
        std::vector<std::pair<std::int64_t, double>> med_min, med_sum;
        bool positive = true;
        for (std::int64_t T : cfg.horizons) {
            std::vector<double> mins, sums;
            for (const auto& s : res.summaries)
                if (s.T == T) {
                    mins.push_back(s.min_grad_sq);
                    sums.push_back(s.sum_grad_sq);
                }
            med_min.emplace_back(T, median(mins));
            med_sum.emplace_back(T, median(sums));
            positive = positive && med_min.back().second > 0 && med_sum.back().second > 0;
        }
        if (positive) {
            res.fits.push_back(fit_rate("min_grad_sq", med_min));
            res.fits.push_back(fit_rate("sum_grad_sq", med_sum));
        }
    }

    if (is_norm) {
        res.bounds = compare_to_bound(cfg, res.summaries, {0.5, 0.25, 0.1});
        const ProblemParams p = problem_params(cfg);
        for (std::int64_t T : cfg.horizons) {
            if (T < 1) continue;
            std::vector<double> scaled, b_end;
            double min_cov = 1.0, mean_sum = 0;
            int n = 0;
            for (std::size_t i = 0; i < res.summaries.size(); ++i) {
                const auto& s = res.summaries[i];
                if (s.T != T) continue;
                scaled.push_back(res.goodset[i].bad_scaled);
                min_cov = std::min(min_cov, s.coverage);
                if (s.b_T_sq) b_end.push_back(*s.b_T_sq);
                mean_sum += s.sum_grad_sq;
                ++n;
            }
            mean_sum /= n;
            const auto gs = good_set_statistics(scaled, min_cov, static_cast<double>(T), p);
            BoundRow mean_row{"mean_bad_vs_envelope", T, std::nullopt, gs.mean_bad,
                              gs.mean_bound + gs.mean_slack,
                              !gs.asserted ? "vacuous" : (gs.mean_pass ? "pass" : "fail")};
            BoundRow sq_row{"meansq_bad_vs_envelope", T, std::nullopt, gs.meansq_bad,
                            gs.meansq_bound + gs.meansq_slack,
                            !gs.asserted ? "vacuous" : (gs.meansq_pass ? "pass" : "fail")};
            res.bounds.push_back(mean_row);
            res.bounds.push_back(sq_row);
            if (!b_end.empty()) {
                for (double delta : {0.5, 0.25, 0.1}) {
                    const auto ne = check_nice_event(b_end, static_cast<double>(T), delta,
                                                     mean_sum, cfg.b0 * cfg.b0, cfg.sigma0,
                                                     cfg.sigma1);
                    BoundRow row{"nice_event_violation_freq", T, delta, ne.violation_frac,
                                 delta + ne.slack,
                                 ne.vacuous || !ne.asserted ? "vacuous"
                                                            : (ne.pass ? "pass" : "fail")};
                    res.bounds.push_back(row);
                }
            }
        }
        for (const auto& row : res.bounds)
            res.bounds_pass = res.bounds_pass && row.status != "fail";
    }
    return res;
}

}  // namespace adanorm
