#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binco/freq_model.hpp"
#include "binco/resample.hpp"
#include "binco/simgen.hpp"
#include "binco/stability.hpp"
#include "binco/ushape.hpp"

namespace binco {

struct RunConfig {
    std::string input;
    std::string output_dir = "binco_out";

    // Explicit grid (strictly increasing). When empty, lambda_points values
    // are spread evenly over [lambda_low, lambda_high] * lambda_max.
    std::vector<double> lambdas;
    int lambda_points = 17;
    double lambda_low = 0.2;
    double lambda_high = 1.0;

    double alpha = 0.05;
    ResampleScheme scheme = ResampleScheme::Bootstrap;
    int B = 100;
    std::uint64_t seed = 1;
    Procedure procedure = Procedure::Space;
    CombineRule combine = CombineRule::Or;

    double l = 1.0;
    bool two_step = false;
    std::vector<double> l_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    bool redraw_weights = true;

    int workers = 0;

    // Throws ConfigError.
    void validate() const;
};

ResampleOptions resample_options(const RunConfig& config);

// Largest useful lambda for the configured procedure on the full data.
double lambda_max(const DataMatrix& data, Procedure procedure);

std::vector<double> lambda_grid(const DataMatrix& data, const RunConfig& config);

// Everything about one (lambda, l) table that does not depend on alpha.
struct LambdaScan {
    double lambda = 0.0;
    double l = 1.0;
    EmpiricalDensity density;
    UShapeReport ushape;
    std::optional<NullMixtureFit> fit;
    std::string note;    // why this lambda cannot qualify, if it cannot
};

LambdaScan scan_table(const FrequencyTable& table, int p, double lambda, double l);

// Per-lambda outcome at one alpha.
struct LambdaChoice {
    LambdaCandidate candidate;
    double fdr_hat = 1.0;
    std::size_t set_size = 0;
};

struct NetworkEstimate {
    EdgeSet edges;
    std::size_t index = 0;    // position in the scanned grid
    int cutoff_k = 0;
    int B = 0;
    double c_star = 0.0;
    double lambda_star = 0.0;
    double l_star = 1.0;
    double fdr_hat = 0.0;
    double n_true_hat = 0.0;
    NullMixtureFit fit;
};

struct Selection {
    std::vector<LambdaChoice> choices;
    std::optional<NetworkEstimate> estimate;
};

// Cutoff per lambda, then the lambda with the largest estimated number of
// true edges.
Selection choose_network(const std::vector<LambdaScan>& scans, const std::vector<FrequencyTable>& tables,
                         double alpha);

struct BincoResult {
    std::vector<FrequencyTable> tables;
    std::vector<LambdaScan> scans;
    Selection selection;
    // Two-step runs: the l = 1 stage, kept for the report.
    std::vector<LambdaScan> first_stage;
    bool two_step_fallback = false;

    bool no_signal() const noexcept { return !selection.estimate; }
    const std::optional<NetworkEstimate>& estimate() const noexcept { return selection.estimate; }
};

BincoResult run_binco(const DataMatrix& data, const RunConfig& config);

// Penalty of the perturbed run that keeps the mean penalty lambda / w
// equal to lambda_bar when 1/w ~ U[1, 1/l].
double matched_lambda(double lambda_bar, double l);

// First scans the grid with l = 1; then, for l in config.l_grid ascending,
// rescans the U-shaped lambdas at their matched penalties and stops at the
// first l with a qualifying lambda. Falls back to the l = 1 result.
BincoResult two_step_l(const DataMatrix& data, const RunConfig& config);

struct StudyConfig {
    Topology topology = Topology::PowerLaw;
    TopologyParams topology_params;
    int p = 100;
    int components = 1;
    int n = 200;
    SignalLevel signal = SignalLevel::Strong;
    // Use the strongest admissible signal when the target is out of reach.
    bool cap_signal = false;
    int replicates = 10;
    std::uint64_t seed = 1;
    std::vector<double> alphas{0.05, 0.1};
    bool stability = false;
    RunConfig run;
};

struct ReplicateResult {
    int replicate = 0;
    std::string method;    // "binco" or "stability"
    double alpha = 0.0;
    bool no_signal = false;
    EvalResult eval;
    double ideal_power = 0.0;
    double mpe = 0.0;      // power / ideal power
    double lambda_star = 0.0;
    double l_star = 1.0;
    double cutoff = 0.0;
    double fdr_hat = 0.0;
    std::size_t selected = 0;
    std::string error;
};

struct StudySummary {
    std::string method;
    double alpha = 0.0;
    int runs = 0;
    int failures = 0;
    int no_signal = 0;
    double fdr_mean = 0.0;
    double fdr_sd = 0.0;
    double power_mean = 0.0;
    double power_sd = 0.0;
    double ideal_mean = 0.0;
    double mpe_mean = 0.0;
};

struct StudyResult {
    std::vector<ReplicateResult> replicates;
    std::vector<StudySummary> summaries;
};

// Seeds of replicate r: topology, precision, sample and resampling streams
// all derive from (study seed, r).
StudyResult run_simulation_study(const StudyConfig& config);

std::vector<StudySummary> summarize(const std::vector<ReplicateResult>& rows);

}  // namespace binco
