#pragma once

#include <optional>
#include <vector>

#include "binco/resample.hpp"

namespace binco {

// Pointwise maximum of selection counts over a set of lambda tables that
// share dimension, B and resample plan.
FrequencyTable max_frequencies(const std::vector<FrequencyTable>& tables);

// Mean over resamples of the size of the union, across lambdas, of the
// per-resample selected sets. union_sizes[b] is that size on resample b.
double estimate_q(const std::vector<std::size_t>& union_sizes);

// Union sizes for the lambda indices [first, last] of a grid run with
// keep_selections enabled.
std::vector<std::size_t> union_sizes(const FrequencyGrid& grid, std::size_t first, std::size_t last);

// q^2 / ((2t - 1) N_omega): bound on the expected number of false selections.
double expected_false_bound(double q_hat, double t, std::size_t n_omega);

// expected_false_bound / |S(t)|, the FDR proxy used for threshold choice.
double fdr_proxy_bound(double q_hat, double t, std::size_t n_omega, std::size_t set_size);

struct StabilityResult {
    int t_count = 0;     // threshold in lattice units
    int B = 0;
    double t_star = 0.0;
    EdgeSet edges;
    double q_hat = 0.0;
    double bound_at_t = 0.0;
};

// Smallest lattice t in (0.5, 1] whose proxy bound is <= alpha, with |S(t)|
// recomputed at every candidate t.
std::optional<StabilityResult> stability_select(const FrequencyTable& max_table, double q_hat, double alpha);

std::optional<StabilityResult> stability_select(const FrequencyGrid& grid, std::size_t first, std::size_t last,
                                                double alpha);

}  // namespace binco
