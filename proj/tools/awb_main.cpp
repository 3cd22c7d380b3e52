// awb: command-line front end for the alpha-Wiener bridge toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 numerical/domain error, 3 I/O error.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "awb/estimators.hpp"
#include "awb/experiments.hpp"
#include "awb/model.hpp"
#include "awb/path_io.hpp"
#include "awb/sampling.hpp"

namespace {

using awb::format_double;

int cmd_sample(double alpha, double sigma, double horizon, int steps,
               std::optional<double> t_end, std::optional<double> geometric,
               std::uint64_t seed, std::uint64_t replicate, const std::string& out) {
    if (t_end.has_value() == geometric.has_value())
        throw awb::argument_error("sample: exactly one of --t-end or --geometric is required");
    const awb::BridgeParams params{alpha, sigma, horizon};
    params.validate();
    awb::TimeGrid grid = t_end ? awb::uniform_grid(*t_end, steps)
                               : awb::geometric_grid(horizon, *geometric, steps);
    awb::SamplePath path = awb::sample_exact(params, grid, awb::SeedSpec{seed, replicate});
    awb::write_path_csv(path, out);
    return 0;
}

int cmd_estimate(const std::string& in, double horizon_T, std::optional<double> t) {
    awb::SamplePath path = awb::read_path_csv(in, horizon_T);
    const double at = t.value_or(path.grid.back());
    const awb::EstimateReport rep = awb::estimate_report(path, at);
    std::cout << awb::canonical_dump(awb::to_json(rep)) << "\n";
    return 0;
}

int cmd_table(const std::string& what, double alpha, double beta, double s, double t,
              double horizon) {
    double value = 0.0;
    if (what == "cov")
        value = awb::covariance(alpha, beta, s, t, horizon);
    else if (what == "var")
        value = awb::variance(alpha, t, horizon);
    else if (what == "qv")
        value = awb::rescaled_qv(alpha, t, horizon);
    else if (what == "envelope")
        value = awb::lil_envelope(alpha, t, horizon);
    else if (what == "limit-var")
        value = awb::limit_variance(alpha, horizon);
    else
        throw awb::argument_error("table: unknown --what value '" + what + "'");
    std::cout << format_double(value) << "\n";
    return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& out,
                   int threads, const std::string& dump_dir) {
    const awb::ExperimentSpec spec = awb::ExperimentSpec::from_json(awb::load_json(spec_path));
    awb::RunOptions opts;
    opts.threads = threads;
    opts.dump_dir = dump_dir;
    const awb::ExperimentSummary summary = awb::run_experiment(spec, opts);
    awb::persist_summary(summary, out);
    std::cout << "kind=" << awb::kind_name(summary.kind)
              << " pass=" << (summary.pass ? "true" : "false")
              << " seconds=" << format_double(summary.wall_seconds) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha-Wiener bridge toolkit: sampling, inference, closed forms, experiments"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "draw one path and write it as CSV");
    double alpha = 1.0, sigma = 1.0, horizon = 1.0;
    int steps = 1000;
    std::optional<double> t_end, geometric;
    std::uint64_t seed = 0, replicate = 0;
    std::string out_file;
    sample->add_option("--alpha", alpha, "drift exponent")->required();
    sample->add_option("--sigma", sigma, "diffusion scale")->capture_default_str();
    sample->add_option("--horizon", horizon, "terminal time T")->required();
    sample->add_option("--steps", steps, "number of grid steps")->required();
    sample->add_option("--t-end", t_end, "last observation time (uniform spacing)");
    sample->add_option("--geometric", geometric,
                       "geometric spacing ratio in (0,1); points T(1-r^k) accumulate at T");
    sample->add_option("--seed", seed, "root seed")->capture_default_str();
    sample->add_option("--replicate", replicate, "replicate index")->capture_default_str();
    sample->add_option("--out", out_file, "output CSV path")->required();

    // estimate
    auto* estimate = app.add_subcommand("estimate", "estimate alpha and sigma^2 from a path CSV");
    std::string in_file;
    double est_T = 1.0;
    std::optional<double> est_t;
    estimate->add_option("--in", in_file, "input CSV path")->required();
    estimate->add_option("--horizon-T", est_T, "terminal time T of the model")->required();
    estimate->add_option("--t", est_t, "observation horizon (defaults to the last grid point)");

    // table
    auto* table = app.add_subcommand("table", "print closed-form values");
    std::string what;
    double tb_alpha = 0.0, tb_beta = 0.0, tb_s = 0.0, tb_t = 0.0, tb_T = 1.0;
    table->add_option("--what", what, "one of cov|var|qv|envelope|limit-var")->required();
    table->add_option("--alpha", tb_alpha, "drift exponent")->required();
    table->add_option("--beta", tb_beta, "second exponent (cov)");
    table->add_option("--s", tb_s, "first time (cov)");
    table->add_option("--t", tb_t, "observation time");
    table->add_option("--horizon", tb_T, "terminal time T")->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a declarative Monte Carlo preset");
    std::string spec_file, summary_file, dump_dir;
    int threads = 0;
    experiment->add_option("--spec", spec_file, "experiment spec JSON")->required();
    experiment->add_option("--out", summary_file, "summary JSON output path")->required();
    experiment->add_option("--threads", threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    experiment->add_option("--dump-paths", dump_dir, "directory for per-replicate path CSVs");

    try {
        app.parse(argc, argv);
        if (sample->parsed())
            return cmd_sample(alpha, sigma, horizon, steps, t_end, geometric, seed, replicate,
                              out_file);
        if (estimate->parsed())
            return cmd_estimate(in_file, est_T, est_t);
        if (table->parsed())
            return cmd_table(what, tb_alpha, tb_beta, tb_s, tb_t, tb_T);
        if (experiment->parsed())
            return cmd_experiment(spec_file, summary_file, threads, dump_dir);
        std::cerr << "awb: no subcommand\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            (void)app.exit(e);
            return 0;
        }
        std::cerr << "awb: " << e.what() << "\n";
        return 1;
    } catch (const awb::argument_error& e) {
        std::cerr << "awb: " << e.what() << "\n";
        return 1;
    } catch (const awb::io_error& e) {
        std::cerr << "awb: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) { // domain/degenerate/numerical
        std::cerr << "awb: " << e.what() << "\n";
        return 2;
    }
}
