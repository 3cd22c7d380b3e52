// Statistical acceptance suite: one pass/fail line per criterion.
//
// Criteria 6, 7 and 9b encode statistical targets that exact analysis puts
// beyond reach at the configured horizons and replicate counts (the drift
// MLE's information grows only logarithmically near the horizon for
// exponents above 1/2, and the sign-split small-ball mass of a centered
// Gaussian with sd ~ 70 at threshold 10 is ~ 11%). They are evaluated
// faithfully at their stated thresholds and reported honestly.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "awb/estimators.hpp"
#include "awb/experiments.hpp"
#include "awb/model.hpp"
#include "awb/sampling.hpp"
#include "awb/stats.hpp"
#include "oracles.hpp"

using namespace awb;
using json = nlohmann::ordered_json;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %s %s  %s\n", criterion, pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string presets_dir = "presets";

ExperimentSummary run_preset(const std::string& name, int threads = 0) {
    const ExperimentSpec spec = ExperimentSpec::from_json(load_json(presets_dir + "/" + name));
    RunOptions opts;
    opts.threads = threads;
    return run_experiment(spec, opts);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// 1. covariance verification by exact sampling, 4 SE, <= 60 s per alpha
void criterion_covariance() {
    Timer timer;
    const ExperimentSummary s = run_preset("covariance-check.json");
    const double per_alpha = timer.seconds() / 5.0;
    const double max_z = s.data["max_abs_z"].get<double>();
    const bool pass = s.data["checks"]["covariance-4se"].get<bool>() && per_alpha <= 60.0;
    report(1, "covariance-verification", pass,
           fmt("max|z|=%.2f (limit 4), %.2fs/alpha (limit 60)", max_z, per_alpha));
}

// 2. covariance(1,1,s,t,1) = s(T-t)/T on a 50-point grid, 1e-12 relative
void criterion_bridge_reduction() {
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i)
        for (int j = i; j <= 50; ++j) {
            const double s = static_cast<double>(i) / 51.0;
            const double t = static_cast<double>(j) / 51.0;
            const double got = covariance(1.0, 1.0, s, t, 1.0);
            const double want = s * (1.0 - t);
            worst = std::fmax(worst, std::fabs(got - want) / want);
        }
    report(2, "brownian-bridge-reduction", worst <= 1e-12, fmt("max rel err=%.3g", worst));
}

// 3. branch continuity at alpha+beta = 1 and alpha = 1/2
void criterion_branch_continuity() {
    double worst = 0.0;
    for (double s : {0.15, 0.4, 0.85})
        for (double t : {0.2, 0.6, 0.9}) {
            const double at = covariance(0.7, 0.3, s, t, 1.0);
            worst = std::fmax(worst, std::fabs(covariance(0.7, 0.3 + 1e-9, s, t, 1.0) - at) /
                                         std::fabs(at));
            worst = std::fmax(worst, std::fabs(covariance(0.7, 0.3 - 1e-9, s, t, 1.0) - at) /
                                         std::fabs(at));
        }
    for (double t : {0.2, 0.5, 0.95}) {
        const double at = variance(0.5, t, 1.0);
        worst = std::fmax(worst, std::fabs(variance(0.5 + 1e-9, t, 1.0) - at) / at);
        worst = std::fmax(worst, std::fabs(variance(0.5 - 1e-9, t, 1.0) - at) / at);
    }
    report(3, "branch-continuity", worst <= 1e-6, fmt("max rel gap=%.3g (limit 1e-6)", worst));
}

// 4. adaptive-quadrature oracle agreement, 200 random tuples, 1e-9 relative
void criterion_oracle_agreement() {
    Timer timer;
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> ab(-3.0, 3.0);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double alpha = ab(rng), beta = ab(rng);
        const double T = 0.5 + 1.5 * uu(rng);
        double s = uu(rng) * 0.95 * T;
        double t = uu(rng) * 0.95 * T;
        const auto rel = [](double got, double want) {
            return std::fabs(got - want) / std::fmax(std::fabs(want), 1e-12);
        };
        worst = std::fmax(worst, rel(covariance(alpha, beta, s, t, T),
                                     oracles::covariance(alpha, beta, s, t, T)));
        worst = std::fmax(worst, rel(variance(alpha, t, T), oracles::variance(alpha, t, T)));
        worst = std::fmax(worst,
                          rel(rescaled_qv(alpha, t, T), oracles::rescaled_qv(alpha, t, T)));
        if (s > t)
            std::swap(s, t);
        worst = std::fmax(
            worst, rel(transition_moments(BridgeParams{alpha, 1.0, T}, s, t, 0.0).variance,
                       oracles::transition_variance(alpha, 1.0, T, s, t)));
    }
    const double secs = timer.seconds();
    report(4, "oracle-agreement", worst <= 1e-9 && secs <= 10.0,
           fmt("max rel err=%.3g (limit 1e-9), %.2fs (limit 10)", worst, secs));
}

// 5. euler weak error: 0.5% at step 1e-4 and first-order halving
void criterion_euler_bias() {
    Timer timer;
    const BridgeParams p{1.0, 1.0, 1.0};
    const double target = variance(1.0, 0.5, 1.0);
    const double e1 = std::fabs(euler_variance(p, uniform_grid(0.5, 5000)) - target) / target;
    const double e2 = std::fabs(euler_variance(p, uniform_grid(0.5, 10000)) - target) / target;
    const double ratio = e1 / e2;
    const double secs = timer.seconds();
    const bool pass = e1 <= 0.005 && ratio >= 1.7 && ratio <= 2.3 && secs <= 1.0;
    report(5, "euler-bias", pass,
           fmt("rel err=%.3g (limit 5e-3), halving ratio=%.2f (band [1.7,2.3])", e1, ratio));
}

// 6. MLE consistency: medians strictly decreasing, final <= 0.15
void criterion_mle_consistency() {
    Timer timer;
    const ExperimentSummary s = run_preset("consistency-sweep.json");
    const auto& med = s.data["cells"][0]["median_abs_error"];
    const bool decreasing = s.data["checks"]["error-decreasing"].get<bool>();
    const bool final_ok = s.data["checks"]["final-error"].get<bool>();
    const double secs = timer.seconds();
    report(6, "mle-consistency", decreasing && final_ok && secs <= 120.0,
           fmt("medians=%.3f,%.3f,%.3f", med[0].get<double>(), med[1].get<double>(),
               med[2].get<double>()) +
               (decreasing ? " decreasing" : " NOT-decreasing") +
               fmt(", final limit 0.15, %.1fs (limit 120)", secs));
}

// 7. singularity by classification: accuracy >= 95%
void criterion_classification() {
    Timer timer;
    const ExperimentSummary s = run_preset("classification.json");
    const double acc = s.data["accuracy"].get<double>();
    const double secs = timer.seconds();
    report(7, "singularity-classification", acc >= 0.95 && secs <= 180.0,
           fmt("accuracy=%.4f (floor 0.95), %.1fs (limit 180)", acc, secs));
}

// 8. QV dichotomy: final median within 3%, errors nonincreasing in >= 7 of 8
void criterion_qv_dichotomy() {
    Timer timer;
    const ExperimentSummary s = run_preset("qv-dichotomy.json");
    const double final_rel = s.data["final_rel_error"].get<double>();
    const int noninc = s.data["nonincreasing_pairs"].get<int>();
    const double secs = timer.seconds();
    const bool pass = s.data["checks"]["final-3pct"].get<bool>() &&
                      s.data["checks"]["error-trend"].get<bool>() && secs <= 120.0;
    report(8, "qv-dichotomy", pass,
           fmt("final rel err=%.4f (limit 0.03), nonincreasing=%.0f/8, %.1fs", final_rel,
               static_cast<double>(noninc), secs));
}

// 9. terminal behavior: bridge sup p99 and divergent sign split
void criterion_terminal_behavior() {
    Timer timer;
    const ExperimentSummary bridge = run_preset("terminal-bridge.json");
    const double p99 = bridge.data["sup_p99"].get<double>();
    const bool pass_a = bridge.data["checks"]["sup-p99"].get<bool>();

    const ExperimentSummary div = run_preset("terminal-divergent.json");
    const double frac_small = div.data["frac_small"].get<double>();
    const double frac_plus = div.data["frac_plus"].get<double>();
    const bool pass_b = div.data["checks"]["sign-split-small"].get<bool>() &&
                        div.data["checks"]["sign-split-balance"].get<bool>();
    const double secs = timer.seconds();
    report(9, "terminal-behavior", pass_a && pass_b && secs <= 60.0,
           fmt("p99=%.4f (limit 0.06); frac_small=%.3f (limit 0.01), frac_plus=%.3f "
               "(band [0.44,0.56])",
               p99, frac_small, frac_plus));
}

// 10. rescaled limit: KS distance to N(0, 2) at alpha = 1/4
void criterion_rescaled_limit() {
    Timer timer;
    const ExperimentSummary s = run_preset("rescaled-limit.json");
    const double ks = s.data["ks_distance"].get<double>();
    const double secs = timer.seconds();
    report(10, "rescaled-limit", s.data["checks"]["ks"].get<bool>() && secs <= 60.0,
           fmt("KS=%.4f (limit 0.03), limit var=%.3f, %.1fs", ks,
               s.data["limit_variance"].get<double>(), secs));
}

// 11. energy divergence: medians strictly increasing in the horizon
void criterion_energy_divergence() {
    Timer timer;
    const ExperimentSummary s = run_preset("energy-divergence.json");
    const bool increasing = s.data["checks"]["energy-increasing"].get<bool>();
    const double secs = timer.seconds();
    std::string detail = "median energies per alpha:";
    for (const auto& cell : s.data["cells"]) {
        detail += fmt(" [%.2g:", cell["params"]["alpha"].get<double>());
        for (const auto& e : cell["median_energy"])
            detail += fmt(" %.3g", e.get<double>());
        detail += "]";
    }
    report(11, "energy-divergence", increasing && secs <= 60.0, detail);
}

// 12. LIL soft diagnostic: median sup ratio in [0.5, 1.3] (asymptotic target 1)
void criterion_lil_diagnostic() {
    Timer timer;
    const ExperimentSummary s = run_preset("lil-diagnostic.json");
    const double med = s.data["median_sup_ratio"].get<double>();
    const double secs = timer.seconds();
    report(12, "lil-soft-diagnostic", s.data["checks"]["sup-ratio-band"].get<bool>(),
           fmt("median sup ratio=%.3f (soft band [0.5,1.3], target 1), %.1fs", med, secs));
}

// 13. determinism: same preset, same seed, different thread counts -> same bytes
void criterion_determinism() {
    bool pass = true;
    std::string detail;
    for (const char* preset : {"terminal-divergent.json", "consistency-sweep.json"}) {
        const ExperimentSummary a = run_preset(preset, 1);
        const ExperimentSummary b = run_preset(preset, 2);
        const ExperimentSummary c = run_preset(preset, 4);
        const std::string da = canonical_dump(a.data);
        const bool same = da == canonical_dump(b.data) && da == canonical_dump(c.data);
        pass = pass && same;
        detail += std::string(preset) + (same ? " stable " : " UNSTABLE ");
    }
    report(13, "determinism", pass, detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1)
        presets_dir = argv[1];
    std::printf("acceptance suite (presets: %s)\n", presets_dir.c_str());

    criterion_covariance();
    criterion_bridge_reduction();
    criterion_branch_continuity();
    criterion_oracle_agreement();
    criterion_euler_bias();
    criterion_mle_consistency();
    criterion_classification();
    criterion_qv_dichotomy();
    criterion_terminal_behavior();
    criterion_rescaled_limit();
    criterion_energy_divergence();
    criterion_lil_diagnostic();
    criterion_determinism();

    std::printf("%d of 13 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
