#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "binco/edges.hpp"
#include "binco/ggm.hpp"
#include "binco/resample.hpp"
#include "binco/rng.hpp"

namespace binco {

enum class Topology { PowerLaw, Hub, Empirical, Empty };
enum class SignalLevel { Strong, Weak, VeryWeak };

std::string to_string(Topology topology);
std::string to_string(SignalLevel level);
Topology parse_topology(const std::string& text);
SignalLevel parse_signal(const std::string& text);

// Target mean of the nonzero |rho_ij|: 0.34, 0.25 and 0.21.
double signal_target_mean(SignalLevel level);

struct TopologyParams {
    double power_exponent = 2.3;
    // Largest power-law degree; 0 means component size - 1.
    int power_max_degree = 20;
    int hubs_per_component = 3;
    int hub_degree_min = 16;
    int hub_degree_max = 25;
    int other_degree_min = 1;
    int other_degree_max = 4;
    // (degree, count) pairs for Topology::Empirical.
    std::vector<std::pair<int, std::size_t>> degree_histogram;
    int max_sequence_draws = 100;
    int max_pairing_attempts = 50;
};

// Disconnected components of equal size; within each component a degree
// sequence is drawn and realized exactly by randomized stub pairing that
// rejects self-loops and repeated pairs.
EdgeSet gen_topology(Topology kind, int p, int n_components, const TopologyParams& params, std::uint64_t seed);

// Realizes a degree sequence exactly as a simple graph on nodes
// [offset, offset + degrees.size()). Returns false if every attempt hit a
// dead end.
bool pair_degree_sequence(const std::vector<int>& degrees, int offset, std::mt19937_64& gen, int attempts,
                          std::vector<Edge>& out);

struct GroundTruthModel {
    EdgeSet adjacency;
    Eigen::MatrixXd concentration;
    Eigen::MatrixXd partial_corr;
    Topology topology = Topology::Empty;
    double signal_mean = 0.0;
    double signal_sd = 0.0;
    // False when the target was out of reach and the signal was capped.
    bool calibrated = true;

    int p() const noexcept { return static_cast<int>(concentration.rows()); }
};

// rho_ij = -omega_ij / sqrt(omega_ii omega_jj), unit diagonal.
Eigen::MatrixXd partial_correlations(const Eigen::MatrixXd& concentration);

// Concentration matrix with unit diagonal and partial correlations
// supported exactly on `adjacency`. Edge weights are drawn from +-U[0.5, 1],
// normalized symmetrically by node weight sums (so the normalized matrix has
// spectral radius <= 1), and scaled by a single multiplier that puts the mean
// nonzero |rho| at the target while keeping the smallest eigenvalue >= 0.01.
// Dense hubs can make the target unreachable: then CalibrationFailure is
// thrown, or with cap_signal the largest admissible multiplier is used and
// `calibrated` is false.
GroundTruthModel gen_precision(const EdgeSet& adjacency, double target_mean, std::uint64_t seed,
                               Topology topology = Topology::Empty, bool cap_signal = false);
GroundTruthModel gen_precision(const EdgeSet& adjacency, SignalLevel level, std::uint64_t seed,
                               Topology topology = Topology::Empty, bool cap_signal = false);

// n draws from N(0, concentration^-1), then standardized.
DataMatrix sample_mvn(const GroundTruthModel& model, int n, std::uint64_t seed);

struct EvalResult {
    double fdr = 0.0;
    double power = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

EvalResult evaluate(const EdgeSet& selected, const EdgeSet& truth);
inline EvalResult evaluate(const EdgeSet& selected, const GroundTruthModel& truth) {
    return evaluate(selected, truth.adjacency);
}

// Best realized power of any cutoff set {count >= k} whose realized FDR is at
// most alpha, maximized over all tables.
double ideal_power(const std::vector<FrequencyTable>& tables, const EdgeSet& truth, double alpha);
inline double ideal_power(const FrequencyTable& table, const EdgeSet& truth, double alpha) {
    return ideal_power(std::vector<FrequencyTable>{table}, truth, alpha);
}

}  // namespace binco
