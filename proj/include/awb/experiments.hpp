#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "awb/model.hpp"

namespace awb {

enum class ExperimentKind {
    covariance_check,
    consistency_sweep,
    classification,
    qv_dichotomy,
    terminal_behavior,
    lil_diagnostic,
    rescaled_limit,
};

const char* kind_name(ExperimentKind k); // kebab-case
ExperimentKind kind_from_name(const std::string& name);

struct GridPolicy {
    enum class Kind { uniform, geometric };
    Kind kind = Kind::uniform;
    double step = 0.0;   // uniform: spacing; t_end/step must be integral
    double t_end = 0.0;  // uniform only
    double ratio = 0.0;  // geometric: points T(1 - ratio^k)
    int steps = 0;       // geometric: k = 0..steps

    TimeGrid build(double horizon_T) const;
    nlohmann::ordered_json to_json() const;
};

// Declarative Monte Carlo experiment. "checks" selects which pass/fail
// aspects feed the summary verdict (empty = every aspect the kind computes).
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::covariance_check;
    std::vector<BridgeParams> params; // one cell per entry
    GridPolicy grid;
    int replicates = 1;
    std::vector<double> horizons;
    std::vector<double> candidates;   // classification
    std::vector<int> levels;          // qv-dichotomy dyadic levels
    double threshold = 0.0;           // terminal-behavior sign split
    double window_lo = 0.0;           // terminal-behavior / lil-diagnostic
    double window_hi = 0.0;
    std::vector<std::string> checks;
    std::uint64_t root_seed = 0;

    // Throws argument_error naming the offending field path.
    static ExperimentSpec from_json(const nlohmann::ordered_json& j);
    nlohmann::ordered_json to_json() const;
    void validate() const;
};

struct ExperimentSummary {
    ExperimentKind kind = ExperimentKind::covariance_check;
    bool pass = false;
    double wall_seconds = 0.0; // reported on the CLI status line, not persisted
    nlohmann::ordered_json data;
};

struct RunOptions {
    int threads = 0;          // 0 = hardware concurrency
    std::string dump_dir;     // when set, per-replicate path CSVs land here
};

// Deterministic given the spec: identical summaries for any thread count.
// Per-replicate numerical failures are counted, not fatal.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

// Canonical JSON rendering: insertion-ordered keys, floats at 17 significant
// digits, 2-space indent. Parsing and re-serializing is byte-identical.
std::string canonical_dump(const nlohmann::ordered_json& j);

void persist_summary(const ExperimentSummary& summary, const std::string& out_path);
nlohmann::ordered_json load_json(const std::string& path);

} // namespace awb
