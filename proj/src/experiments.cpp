#include "awb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <limits>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>

#include "awb/estimators.hpp"
#include "awb/kernels.hpp"
#include "awb/path_io.hpp"
#include "awb/path_stats.hpp"
#include "awb/sampling.hpp"
#include "awb/stats.hpp"

namespace awb {

using json = nlohmann::ordered_json;

namespace {

// Verdict thresholds for the preset statistical checks.
constexpr double kCovMaxZ = 4.0;
constexpr double kFinalMedianError = 0.15;
constexpr double kAccuracyFloor = 0.95;
constexpr double kQvFinalRel = 0.03;
constexpr double kSupP99Limit = 0.06;
constexpr double kFracSmallLimit = 0.01;
constexpr double kBalanceLo = 0.44;
constexpr double kBalanceHi = 0.56;
constexpr double kLilBandLo = 0.5;
constexpr double kLilBandHi = 1.3;
constexpr double kKsLimit = 0.03;

constexpr double kSnapTol = 1e-9;

struct KindName {
    ExperimentKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::covariance_check, "covariance-check"},
    {ExperimentKind::consistency_sweep, "consistency-sweep"},
    {ExperimentKind::classification, "classification"},
    {ExperimentKind::qv_dichotomy, "qv-dichotomy"},
    {ExperimentKind::terminal_behavior, "terminal-behavior"},
    {ExperimentKind::lil_diagnostic, "lil-diagnostic"},
    {ExperimentKind::rescaled_limit, "rescaled-limit"},
};

std::size_t snap_index(const std::vector<double>& pts, double t, const char* what) {
    if (!(t >= 0.0) || t > pts.back() + kSnapTol)
        throw argument_error(std::string(what) + ": horizon " + format_double(t) +
                             " outside the grid range");
    std::size_t k = pts.size() - 1;
    while (k > 0 && pts[k] > t + kSnapTol)
        --k;
    return k;
}

// Runs fn(0..n-1) on a small pool; each call owns slot i, so results are
// identical to serial execution for any thread count. The first non-recoverable
// exception is rethrown after the join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

json params_json(const BridgeParams& p) {
    json j;
    j["alpha"] = p.alpha;
    j["sigma"] = p.sigma;
    j["horizon_T"] = p.horizon_T;
    return j;
}

BridgeParams params_from_json(const json& j, const std::string& path) {
    if (!j.is_object())
        throw argument_error(path + ": expected an object");
    BridgeParams p;
    bool have_alpha = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "alpha") {
            p.alpha = value.get<double>();
            have_alpha = true;
        } else if (key == "sigma") {
            p.sigma = value.get<double>();
        } else if (key == "horizon_T") {
            p.horizon_T = value.get<double>();
        } else {
            throw argument_error(path + ": unknown field '" + key + "'");
        }
    }
    if (!have_alpha)
        throw argument_error(path + ".alpha: required");
    try {
        p.validate();
    } catch (const domain_error& e) {
        throw argument_error(path + ": " + e.what());
    }
    return p;
}

// Per-kind check registry; spec.checks may narrow the verdict to a subset.
const std::vector<std::string>& allowed_checks(ExperimentKind kind) {
    static const std::vector<std::string> cov{"covariance-4se"};
    static const std::vector<std::string> cons{"error-decreasing", "final-error",
                                               "energy-increasing"};
    static const std::vector<std::string> cls{"accuracy"};
    static const std::vector<std::string> qv{"final-3pct", "error-trend"};
    static const std::vector<std::string> term{"sup-p99", "sign-split-small",
                                               "sign-split-balance"};
    static const std::vector<std::string> lil{"sup-ratio-band"};
    static const std::vector<std::string> resc{"ks"};
    switch (kind) {
    case ExperimentKind::covariance_check: return cov;
    case ExperimentKind::consistency_sweep: return cons;
    case ExperimentKind::classification: return cls;
    case ExperimentKind::qv_dichotomy: return qv;
    case ExperimentKind::terminal_behavior: return term;
    case ExperimentKind::lil_diagnostic: return lil;
    case ExperimentKind::rescaled_limit: return resc;
    }
    throw argument_error("unknown experiment kind");
}

bool verdict(const ExperimentSpec& spec, const json& checks) {
    bool pass = true;
    if (spec.checks.empty()) {
        for (const auto& [name, ok] : checks.items()) {
            (void)name;
            pass = pass && ok.get<bool>();
        }
        return pass;
    }
    for (const auto& name : spec.checks) {
        if (!checks.contains(name))
            throw argument_error("checks: '" + name + "' was not computed for this spec");
        pass = pass && checks[name].get<bool>();
    }
    return pass;
}

void maybe_dump(const RunOptions& opts, std::size_t cell, int replicate,
                const SamplePath& path) {
    if (opts.dump_dir.empty())
        return;
    const std::string file = opts.dump_dir + "/cell" + std::to_string(cell) + "_rep" +
                             std::to_string(replicate) + ".csv";
    write_path_csv(path, file);
}

SeedSpec replicate_seed(const ExperimentSpec& spec, std::size_t cell, int replicate) {
    return SeedSpec{spec.root_seed,
                    static_cast<std::uint64_t>(cell) * static_cast<std::uint64_t>(spec.replicates) +
                        static_cast<std::uint64_t>(replicate)};
}

double median_ignoring_nan(const std::vector<double>& v) {
    std::vector<double> ok;
    ok.reserve(v.size());
    for (double x : v)
        if (std::isfinite(x))
            ok.push_back(x);
    if (ok.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return stats::median(std::move(ok));
}

// ---------------------------------------------------------------------------
// covariance-check
// ---------------------------------------------------------------------------

json run_covariance_check(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                          int& failures) {
    json cells = json::array();
    double overall_max_z = 0.0;
    for (std::size_t ci = 0; ci < spec.params.size(); ++ci) {
        const BridgeParams& p = spec.params[ci];
        const TimeGrid grid = spec.grid.build(p.horizon_T);
        const std::size_t m = grid.size() - 1; // observation points, t=0 excluded
        const ExactStepTable table = exact_step_table(p, grid);
        const int R = spec.replicates;

        std::vector<std::vector<double>> vals(static_cast<std::size_t>(R));
        parallel_for(R, opts.threads, [&](int r) {
            SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, ci, r));
            maybe_dump(opts, ci, r, path);
            vals[static_cast<std::size_t>(r)].assign(path.values.begin() + 1, path.values.end());
        });

        std::vector<double> moments(m * m, 0.0);
        for (int r = 0; r < R; ++r) {
            const auto& v = vals[static_cast<std::size_t>(r)];
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i; j < m; ++j)
                    moments[i * m + j] += v[i] * v[j];
        }

        const double s2 = p.sigma * p.sigma;
        json stats_arr = json::array();
        double max_z = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double cii = s2 * variance(p.alpha, grid[i + 1], p.horizon_T);
            for (std::size_t j = i; j < m; ++j) {
                const double cjj = s2 * variance(p.alpha, grid[j + 1], p.horizon_T);
                const double cij =
                    s2 * covariance(p.alpha, p.alpha, grid[i + 1], grid[j + 1], p.horizon_T);
                const double emp = moments[i * m + j] / static_cast<double>(R);
                const double se = std::sqrt((cii * cjj + cij * cij) / static_cast<double>(R));
                const double z = (emp - cij) / se;
                max_z = std::fmax(max_z, std::fabs(z));
                json cell;
                cell["s"] = grid[i + 1];
                cell["t"] = grid[j + 1];
                cell["empirical"] = emp;
                cell["exact"] = cij;
                cell["se"] = se;
                cell["z"] = z;
                stats_arr.push_back(std::move(cell));
            }
        }
        overall_max_z = std::fmax(overall_max_z, max_z);

        json cell;
        cell["params"] = params_json(p);
        cell["max_abs_z"] = max_z;
        cell["stats"] = std::move(stats_arr);
        cells.push_back(std::move(cell));
    }
    (void)failures;
    checks["covariance-4se"] = overall_max_z <= kCovMaxZ;

    json data;
    data["cells"] = std::move(cells);
    data["max_abs_z"] = overall_max_z;
    data["z_limit"] = kCovMaxZ;
    return data;
}

// ---------------------------------------------------------------------------
// consistency-sweep (MLE error medians and energy medians per horizon)
// ---------------------------------------------------------------------------

json run_consistency_sweep(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                           int& failures) {
    json cells = json::array();
    bool err_decreasing = true;
    bool final_ok = true;
    bool energy_increasing = true;

    for (std::size_t ci = 0; ci < spec.params.size(); ++ci) {
        const BridgeParams& p = spec.params[ci];
        const TimeGrid grid = spec.grid.build(p.horizon_T);
        const ExactStepTable table = exact_step_table(p, grid);
        const int R = spec.replicates;
        const std::size_t H = spec.horizons.size();

        std::vector<std::size_t> idx(H);
        for (std::size_t h = 0; h < H; ++h)
            idx[h] = snap_index(grid.points(), spec.horizons[h], "consistency-sweep");

        std::vector<std::vector<double>> errs(H, std::vector<double>(static_cast<std::size_t>(R)));
        std::vector<std::vector<double>> energies(H,
                                                  std::vector<double>(static_cast<std::size_t>(R)));
        std::vector<int> fail_count(static_cast<std::size_t>(R), 0);

        parallel_for(R, opts.threads, [&](int r) {
            SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, ci, r));
            maybe_dump(opts, ci, r, path);
            for (std::size_t h = 0; h < H; ++h) {
                const double th = grid[idx[h]];
                try {
                    const double a = mle_alpha(path, th);
                    errs[h][static_cast<std::size_t>(r)] = std::fabs(a - p.alpha);
                    energies[h][static_cast<std::size_t>(r)] = energy_integral(path, th);
                } catch (const domain_error&) {
                    errs[h][static_cast<std::size_t>(r)] = std::numeric_limits<double>::quiet_NaN();
                    energies[h][static_cast<std::size_t>(r)] =
                        std::numeric_limits<double>::quiet_NaN();
                    ++fail_count[static_cast<std::size_t>(r)];
                }
            }
        });

        int cell_failures = 0;
        for (int f : fail_count)
            cell_failures += f;
        failures += cell_failures;

        json snapped = json::array();
        json med_err = json::array();
        json med_energy = json::array();
        std::vector<double> me(H), men(H);
        for (std::size_t h = 0; h < H; ++h) {
            me[h] = median_ignoring_nan(errs[h]);
            men[h] = median_ignoring_nan(energies[h]);
            snapped.push_back(grid[idx[h]]);
            med_err.push_back(me[h]);
            med_energy.push_back(men[h]);
        }
        for (std::size_t h = 0; h + 1 < H; ++h) {
            if (!(me[h + 1] < me[h]))
                err_decreasing = false;
            if (!(men[h + 1] > men[h]))
                energy_increasing = false;
        }
        if (!(me.back() <= kFinalMedianError))
            final_ok = false;

        json cell;
        cell["params"] = params_json(p);
        cell["horizons"] = std::move(snapped);
        cell["median_abs_error"] = std::move(med_err);
        cell["median_energy"] = std::move(med_energy);
        cell["failures"] = cell_failures;
        cells.push_back(std::move(cell));
    }

    checks["error-decreasing"] = err_decreasing;
    checks["final-error"] = final_ok;
    checks["energy-increasing"] = energy_increasing;

    json data;
    data["cells"] = std::move(cells);
    data["final_error_limit"] = kFinalMedianError;
    return data;
}

// ---------------------------------------------------------------------------
// classification (empirical echo of mutual singularity)
// ---------------------------------------------------------------------------

json run_classification(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                        int& failures) {
    const std::size_t C = spec.params.size();
    const std::size_t K = spec.candidates.size();
    const int R = spec.replicates;

    std::vector<std::vector<int>> confusion(C, std::vector<int>(K, 0));
    std::vector<int> class_failures(C, 0);
    json horizons_out = json::array();

    for (std::size_t ci = 0; ci < C; ++ci) {
        const BridgeParams& p = spec.params[ci];
        const TimeGrid grid = spec.grid.build(p.horizon_T);
        const ExactStepTable table = exact_step_table(p, grid);
        const double want = spec.horizons.empty() ? grid.back() : spec.horizons[0];
        const double th = grid[snap_index(grid.points(), want, "classification")];
        horizons_out.push_back(th);

        std::vector<int> chosen(static_cast<std::size_t>(R), -1);
        parallel_for(R, opts.threads, [&](int r) {
            SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, ci, r));
            maybe_dump(opts, ci, r, path);
            try {
                const double c = classify_alpha(path, th, spec.candidates);
                for (std::size_t k = 0; k < K; ++k)
                    if (spec.candidates[k] == c) {
                        chosen[static_cast<std::size_t>(r)] = static_cast<int>(k);
                        break;
                    }
            } catch (const domain_error&) {
                chosen[static_cast<std::size_t>(r)] = -1;
            }
        });

        for (int r = 0; r < R; ++r) {
            const int k = chosen[static_cast<std::size_t>(r)];
            if (k < 0)
                ++class_failures[ci];
            else
                ++confusion[ci][static_cast<std::size_t>(k)];
        }
    }

    long correct = 0;
    long total = 0;
    json confusion_out = json::array();
    json failures_out = json::array();
    for (std::size_t ci = 0; ci < C; ++ci) {
        json row = json::array();
        for (std::size_t k = 0; k < K; ++k) {
            row.push_back(confusion[ci][k]);
            if (spec.candidates[k] == spec.params[ci].alpha)
                correct += confusion[ci][k];
        }
        total += R;
        failures += class_failures[ci];
        failures_out.push_back(class_failures[ci]);
        confusion_out.push_back(std::move(row));
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(total);
    checks["accuracy"] = accuracy >= kAccuracyFloor;

    json data;
    json alphas = json::array();
    for (const auto& p : spec.params)
        alphas.push_back(p.alpha);
    data["alphas"] = std::move(alphas);
    data["candidates"] = spec.candidates;
    data["horizons"] = std::move(horizons_out);
    data["confusion"] = std::move(confusion_out);
    data["per_class_failures"] = std::move(failures_out);
    data["accuracy"] = accuracy;
    data["accuracy_floor"] = kAccuracyFloor;
    return data;
}

// ---------------------------------------------------------------------------
// qv-dichotomy (Baxter-type realized variance over dyadic refinements)
// ---------------------------------------------------------------------------

json run_qv_dichotomy(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                      int& failures) {
    const BridgeParams& p = spec.params.front();
    const TimeGrid grid = spec.grid.build(p.horizon_T);
    const ExactStepTable table = exact_step_table(p, grid);
    const int R = spec.replicates;
    const std::size_t L = spec.levels.size();
    const std::size_t nsteps = grid.size() - 1;
    const double span = grid.back() - grid.front();
    const double true_s2 = p.sigma * p.sigma;

    std::vector<std::vector<double>> est(L, std::vector<double>(static_cast<std::size_t>(R)));
    parallel_for(R, opts.threads, [&](int r) {
        SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, 0, r));
        maybe_dump(opts, 0, r, path);
        std::vector<double> strided;
        for (std::size_t li = 0; li < L; ++li) {
            const std::size_t n = std::size_t{1} << spec.levels[li];
            const std::size_t stride = nsteps / n;
            if (stride == 1) {
                est[li][static_cast<std::size_t>(r)] =
                    kernels::sq_diff_sum(path.values.data(), path.values.size()) / span;
            } else {
                strided.resize(n + 1);
                for (std::size_t j = 0; j <= n; ++j)
                    strided[j] = path.values[j * stride];
                est[li][static_cast<std::size_t>(r)] =
                    kernels::sq_diff_sum(strided.data(), strided.size()) / span;
            }
        }
    });

    json med_s2 = json::array();
    json med_err = json::array();
    std::vector<double> med_abs_err(L);
    double final_median = 0.0;
    for (std::size_t li = 0; li < L; ++li) {
        const double med = stats::median(est[li]);
        std::vector<double> errs(est[li].size());
        for (std::size_t r = 0; r < errs.size(); ++r)
            errs[r] = std::fabs(est[li][r] - true_s2);
        med_abs_err[li] = stats::median(std::move(errs));
        med_s2.push_back(med);
        med_err.push_back(med_abs_err[li]);
        if (li + 1 == L)
            final_median = med;
    }

    int noninc = 0;
    for (std::size_t li = 0; li + 1 < L; ++li)
        if (med_abs_err[li + 1] <= med_abs_err[li])
            ++noninc;

    const double final_rel = std::fabs(final_median - true_s2) / true_s2;
    checks["final-3pct"] = final_rel <= kQvFinalRel;
    checks["error-trend"] = noninc >= static_cast<int>(L) - 2; // allow one inversion
    (void)failures;

    json data;
    data["params"] = params_json(p);
    data["t_end"] = grid.back();
    data["levels"] = spec.levels;
    data["median_sigma2"] = std::move(med_s2);
    data["median_abs_error"] = std::move(med_err);
    data["final_rel_error"] = final_rel;
    data["final_rel_limit"] = kQvFinalRel;
    data["nonincreasing_pairs"] = noninc;
    return data;
}

// ---------------------------------------------------------------------------
// terminal-behavior (window sup for alpha > 0, sign split for alpha < 0)
// ---------------------------------------------------------------------------

json run_terminal_behavior(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                           int& failures) {
    const BridgeParams& p = spec.params.front();
    const TimeGrid grid = spec.grid.build(p.horizon_T);
    const ExactStepTable table = exact_step_table(p, grid);
    const int R = spec.replicates;
    const bool want_sup = spec.window_hi > 0.0;
    const bool want_split = spec.threshold > 0.0;
    const WindowSpec window{spec.window_lo, spec.window_hi};

    std::size_t term_idx = grid.size() - 1;
    if (want_split && !spec.horizons.empty())
        term_idx = snap_index(grid.points(), spec.horizons[0], "terminal-behavior");

    std::vector<double> sups(static_cast<std::size_t>(R),
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<double> terminals(static_cast<std::size_t>(R));
    parallel_for(R, opts.threads, [&](int r) {
        SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, 0, r));
        maybe_dump(opts, 0, r, path);
        if (want_sup)
            sups[static_cast<std::size_t>(r)] = terminal_sup(path, window);
        terminals[static_cast<std::size_t>(r)] = path.values[term_idx];
    });
    (void)failures;

    json data;
    data["params"] = params_json(p);
    if (want_sup) {
        const double p99 = stats::percentile(sups, 0.99);
        checks["sup-p99"] = p99 <= kSupP99Limit;
        data["window"] = json::array({window.t_lo, window.t_hi});
        data["sup_p99"] = p99;
        data["sup_p99_limit"] = kSupP99Limit;
    }
    if (want_split) {
        const SignSplit split = sign_split(terminals, spec.threshold);
        checks["sign-split-small"] = split.frac_small <= kFracSmallLimit;
        checks["sign-split-balance"] =
            split.frac_plus >= kBalanceLo && split.frac_plus <= kBalanceHi;
        data["horizon"] = grid[term_idx];
        data["threshold"] = spec.threshold;
        data["frac_plus"] = split.frac_plus;
        data["frac_minus"] = split.frac_minus;
        data["frac_small"] = split.frac_small;
        data["frac_small_limit"] = kFracSmallLimit;
        data["balance_band"] = json::array({kBalanceLo, kBalanceHi});
    }
    return data;
}

// ---------------------------------------------------------------------------
// lil-diagnostic (envelope ratio medians over a horizon window)
// ---------------------------------------------------------------------------

json run_lil_diagnostic(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                        int& failures) {
    const BridgeParams& p = spec.params.front();
    const TimeGrid grid = spec.grid.build(p.horizon_T);
    const ExactStepTable table = exact_step_table(p, grid);
    const int R = spec.replicates;
    const WindowSpec window{spec.window_lo, spec.window_hi};

    std::vector<double> sup(static_cast<std::size_t>(R));
    std::vector<double> inf(static_cast<std::size_t>(R));
    parallel_for(R, opts.threads, [&](int r) {
        SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, 0, r));
        maybe_dump(opts, 0, r, path);
        const EnvelopeRatio er = envelope_ratio(path, p.alpha, window);
        sup[static_cast<std::size_t>(r)] = er.sup_ratio;
        inf[static_cast<std::size_t>(r)] = er.inf_ratio;
    });
    (void)failures;

    const double med_sup = stats::median(sup);
    const double med_inf = stats::median(inf);
    checks["sup-ratio-band"] = med_sup >= kLilBandLo && med_sup <= kLilBandHi;

    json data;
    data["params"] = params_json(p);
    data["window"] = json::array({window.t_lo, window.t_hi});
    data["median_sup_ratio"] = med_sup;
    data["median_inf_ratio"] = med_inf;
    data["band"] = json::array({kLilBandLo, kLilBandHi});
    return data;
}

// ---------------------------------------------------------------------------
// rescaled-limit (KS distance of x(t)/(T-t)^alpha to its Gaussian limit)
// ---------------------------------------------------------------------------

json run_rescaled_limit(const ExperimentSpec& spec, const RunOptions& opts, json& checks,
                        int& failures) {
    const BridgeParams& p = spec.params.front();
    const TimeGrid grid = spec.grid.build(p.horizon_T);
    const ExactStepTable table = exact_step_table(p, grid);
    const int R = spec.replicates;

    std::vector<double> rescaled(static_cast<std::size_t>(R));
    parallel_for(R, opts.threads, [&](int r) {
        SamplePath path = sample_exact(p, grid, table, replicate_seed(spec, 0, r));
        maybe_dump(opts, 0, r, path);
        rescaled[static_cast<std::size_t>(r)] = rescaled_terminal(path, p.alpha);
    });
    (void)failures;

    const double limit_var = p.sigma * p.sigma * limit_variance(p.alpha, p.horizon_T);
    const double ks = stats::ks_distance_to_normal(rescaled, limit_var);
    checks["ks"] = ks <= kKsLimit;

    json data;
    data["params"] = params_json(p);
    data["horizon"] = grid.back();
    data["limit_variance"] = limit_var;
    data["ks_distance"] = ks;
    data["ks_limit"] = kKsLimit;
    return data;
}

} // namespace

const char* kind_name(ExperimentKind k) {
    for (const auto& kn : kKindNames)
        if (kn.kind == k)
            return kn.name;
    throw argument_error("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
    for (const auto& kn : kKindNames)
        if (name == kn.name)
            return kn.kind;
    throw argument_error("kind: unknown value '" + name + "'");
}

TimeGrid GridPolicy::build(double horizon_T) const {
    if (kind == Kind::uniform) {
        if (!(step > 0.0))
            throw argument_error("grid.step: must be > 0");
        if (!(t_end > 0.0))
            throw argument_error("grid.t_end: must be > 0");
        const double k = t_end / step;
        const long long n = std::llround(k);
        if (n < 1 || std::fabs(k - static_cast<double>(n)) > 1e-9)
            throw argument_error("grid.step: t_end must be an integer multiple of step");
        if (!(t_end < horizon_T))
            throw argument_error("grid.t_end: must be < horizon_T");
        return uniform_grid(t_end, static_cast<int>(n));
    }
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw argument_error("grid.ratio: must be in (0,1)");
    if (steps < 1)
        throw argument_error("grid.steps: must be >= 1");
    return geometric_grid(horizon_T, ratio, steps);
}

nlohmann::ordered_json GridPolicy::to_json() const {
    json j;
    if (kind == Kind::uniform) {
        j["policy"] = "uniform";
        j["step"] = step;
        j["t_end"] = t_end;
    } else {
        j["policy"] = "geometric";
        j["ratio"] = ratio;
        j["steps"] = steps;
    }
    return j;
}

void ExperimentSpec::validate() const {
    if (params.empty())
        throw argument_error("params: need at least one parameter set");
    if (replicates < 1)
        throw argument_error("replicates: must be >= 1");
    for (const auto& p : params) {
        try {
            p.validate();
        } catch (const domain_error& e) {
            throw argument_error(std::string("params: ") + e.what());
        }
        (void)grid.build(p.horizon_T); // throws with field path on bad policy
        for (double h : horizons)
            if (!(h < p.horizon_T))
                throw argument_error("horizons: every horizon must be < horizon_T");
    }
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw argument_error("horizons: must be strictly increasing");

    switch (kind) {
    case ExperimentKind::covariance_check:
        break;
    case ExperimentKind::consistency_sweep:
        if (horizons.empty())
            throw argument_error("horizons: required for consistency-sweep");
        break;
    case ExperimentKind::classification:
        if (candidates.empty())
            throw argument_error("candidates: required for classification");
        break;
    case ExperimentKind::qv_dichotomy: {
        if (params.size() != 1)
            throw argument_error("params: qv-dichotomy takes exactly one parameter set");
        if (levels.empty())
            throw argument_error("levels: required for qv-dichotomy");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i] < 1 || levels[i] > 30)
                throw argument_error("levels: entries must be in [1, 30]");
            if (i > 0 && levels[i] <= levels[i - 1])
                throw argument_error("levels: must be strictly increasing");
        }
        if (grid.kind != GridPolicy::Kind::uniform)
            throw argument_error("grid.policy: qv-dichotomy needs a uniform grid");
        const TimeGrid g = grid.build(params.front().horizon_T);
        const std::size_t nsteps = g.size() - 1;
        if (nsteps != (std::size_t{1} << levels.back()))
            throw argument_error("grid.step: steps must equal 2^max(levels)");
        break;
    }
    case ExperimentKind::terminal_behavior:
        if (!(window_hi > 0.0) && !(threshold > 0.0))
            throw argument_error("terminal-behavior: need a window and/or a threshold");
        if (threshold < 0.0)
            throw argument_error("threshold: must be > 0 when given");
        break;
    case ExperimentKind::lil_diagnostic:
        if (!(window_hi > 0.0))
            throw argument_error("window: required for lil-diagnostic");
        if (!(params.front().alpha >= 0.5))
            throw argument_error("params.alpha: lil-diagnostic needs alpha >= 1/2");
        break;
    case ExperimentKind::rescaled_limit:
        if (!(params.front().alpha < 0.5))
            throw argument_error("params.alpha: rescaled-limit needs alpha < 1/2");
        break;
    }

    if (window_hi > 0.0) {
        if (!(window_lo >= 0.0) || !(window_lo < window_hi))
            throw argument_error("window: need 0 <= lo < hi");
        for (const auto& p : params)
            if (!(window_hi < p.horizon_T))
                throw argument_error("window: must end before horizon_T");
    }

    const auto& allowed = allowed_checks(kind);
    for (const auto& c : checks)
        if (std::find(allowed.begin(), allowed.end(), c) == allowed.end())
            throw argument_error("checks: '" + c + "' is not a check of kind " +
                                 kind_name(kind));
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
    if (!j.is_object())
        throw argument_error("spec: expected a JSON object");
    ExperimentSpec spec;
    bool have_kind = false, have_grid = false, have_reps = false;
    for (const auto& [key, value] : j.items()) {
        try {
        if (key == "kind") {
            spec.kind = kind_from_name(value.get<std::string>());
            have_kind = true;
        } else if (key == "params") {
            if (value.is_array()) {
                for (std::size_t i = 0; i < value.size(); ++i)
                    spec.params.push_back(
                        params_from_json(value[i], "params[" + std::to_string(i) + "]"));
            } else {
                spec.params.push_back(params_from_json(value, "params"));
            }
        } else if (key == "grid") {
            if (!value.is_object())
                throw argument_error("grid: expected an object");
            bool have_policy = false;
            for (const auto& [gk, gv] : value.items()) {
                if (gk == "policy") {
                    const std::string p = gv.get<std::string>();
                    if (p == "uniform")
                        spec.grid.kind = GridPolicy::Kind::uniform;
                    else if (p == "geometric")
                        spec.grid.kind = GridPolicy::Kind::geometric;
                    else
                        throw argument_error("grid.policy: unknown value '" + p + "'");
                    have_policy = true;
                } else if (gk == "step") {
                    spec.grid.step = gv.get<double>();
                } else if (gk == "t_end") {
                    spec.grid.t_end = gv.get<double>();
                } else if (gk == "ratio") {
                    spec.grid.ratio = gv.get<double>();
                } else if (gk == "steps") {
                    spec.grid.steps = gv.get<int>();
                } else {
                    throw argument_error("grid: unknown field '" + gk + "'");
                }
            }
            if (!have_policy)
                throw argument_error("grid.policy: required");
            have_grid = true;
        } else if (key == "replicates") {
            spec.replicates = value.get<int>();
            have_reps = true;
        } else if (key == "horizons") {
            spec.horizons = value.get<std::vector<double>>();
        } else if (key == "candidates") {
            spec.candidates = value.get<std::vector<double>>();
        } else if (key == "levels") {
            spec.levels = value.get<std::vector<int>>();
        } else if (key == "threshold") {
            spec.threshold = value.get<double>();
        } else if (key == "window") {
            if (!value.is_array() || value.size() != 2)
                throw argument_error("window: expected [lo, hi]");
            spec.window_lo = value[0].get<double>();
            spec.window_hi = value[1].get<double>();
        } else if (key == "checks") {
            spec.checks = value.get<std::vector<std::string>>();
        } else if (key == "root_seed") {
            spec.root_seed = value.get<std::uint64_t>();
        } else {
            throw argument_error("spec: unknown field '" + key + "'");
        }
        } catch (const nlohmann::json::exception& e) {
            throw argument_error(key + ": " + e.what());
        }
    }
    if (!have_kind)
        throw argument_error("kind: required");
    if (!have_grid)
        throw argument_error("grid: required");
    if (!have_reps)
        throw argument_error("replicates: required");
    spec.validate();
    return spec;
}

nlohmann::ordered_json ExperimentSpec::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    if (params.size() == 1) {
        j["params"] = params_json(params.front());
    } else {
        json arr = json::array();
        for (const auto& p : params)
            arr.push_back(params_json(p));
        j["params"] = std::move(arr);
    }
    j["grid"] = grid.to_json();
    j["replicates"] = replicates;
    if (!horizons.empty())
        j["horizons"] = horizons;
    if (!candidates.empty())
        j["candidates"] = candidates;
    if (!levels.empty())
        j["levels"] = levels;
    if (threshold > 0.0)
        j["threshold"] = threshold;
    if (window_hi > 0.0)
        j["window"] = json::array({window_lo, window_hi});
    if (!checks.empty())
        j["checks"] = checks;
    j["root_seed"] = root_seed;
    return j;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
    spec.validate();
    if (!opts.dump_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(opts.dump_dir, ec);
        if (ec)
            throw io_error("cannot create dump directory: " + opts.dump_dir);
    }

    const auto start = std::chrono::steady_clock::now();
    json checks = json::object();
    int failures = 0;
    json body;
    switch (spec.kind) {
    case ExperimentKind::covariance_check:
        body = run_covariance_check(spec, opts, checks, failures);
        break;
    case ExperimentKind::consistency_sweep:
        body = run_consistency_sweep(spec, opts, checks, failures);
        break;
    case ExperimentKind::classification:
        body = run_classification(spec, opts, checks, failures);
        break;
    case ExperimentKind::qv_dichotomy:
        body = run_qv_dichotomy(spec, opts, checks, failures);
        break;
    case ExperimentKind::terminal_behavior:
        body = run_terminal_behavior(spec, opts, checks, failures);
        break;
    case ExperimentKind::lil_diagnostic:
        body = run_lil_diagnostic(spec, opts, checks, failures);
        break;
    case ExperimentKind::rescaled_limit:
        body = run_rescaled_limit(spec, opts, checks, failures);
        break;
    }
    const auto stop = std::chrono::steady_clock::now();

    ExperimentSummary summary;
    summary.kind = spec.kind;
    summary.pass = verdict(spec, checks);
    summary.wall_seconds = std::chrono::duration<double>(stop - start).count();

    json data;
    data["kind"] = kind_name(spec.kind);
    data["root_seed"] = spec.root_seed;
    data["replicates"] = spec.replicates;
    data["grid"] = spec.grid.to_json();
    for (auto& [key, value] : body.items())
        data[key] = std::move(value);
    data["failures"] = failures;
    data["checks"] = std::move(checks);
    data["pass"] = summary.pass;
    summary.data = std::move(data);
    return summary;
}

namespace {

void escape_string(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x",
                              static_cast<unsigned>(static_cast<unsigned char>(c)));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

void dump_rec(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
    case nlohmann::detail::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad_in;
            escape_string(key, out);
            out += ": ";
            dump_rec(value, out, depth + 1);
        }
        out += '\n';
        out += pad;
        out += '}';
        return;
    }
    case nlohmann::detail::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& value : j) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad_in;
            dump_rec(value, out, depth + 1);
        }
        out += '\n';
        out += pad;
        out += ']';
        return;
    }
    case nlohmann::detail::value_t::string:
        escape_string(j.get<std::string>(), out);
        return;
    case nlohmann::detail::value_t::boolean:
        out += j.get<bool>() ? "true" : "false";
        return;
    case nlohmann::detail::value_t::number_integer: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld",
                      static_cast<long long>(j.get<std::int64_t>()));
        out += buf;
        return;
    }
    case nlohmann::detail::value_t::number_unsigned: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%llu",
                      static_cast<unsigned long long>(j.get<std::uint64_t>()));
        out += buf;
        return;
    }
    case nlohmann::detail::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        std::string s = format_double(v);
        if (s.find_first_of(".eE") == std::string::npos)
            s += ".0"; // keep float-typed values float-typed across round trips
        out += s;
        return;
    }
    default:
        out += "null";
        return;
    }
}

} // namespace

std::string canonical_dump(const nlohmann::ordered_json& j) {
    std::string out;
    dump_rec(j, out, 0);
    return out;
}

void persist_summary(const ExperimentSummary& summary, const std::string& out_path) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw io_error("cannot open for writing: " + out_path);
    f << canonical_dump(summary.data) << '\n';
    f.flush();
    if (!f)
        throw io_error("write failed: " + out_path);
}

nlohmann::ordered_json load_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot open for reading: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw argument_error(path + ": " + e.what());
    }
    return j;
}

} // namespace awb
