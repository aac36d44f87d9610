#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "binco/resample.hpp"

namespace binco {

// Distribution of selection frequencies over the k/B lattice.
// mass[k] = n_k / N_omega, where n_k counts candidate edges selected in
// exactly k of the B resamples.
struct EmpiricalDensity {
    std::vector<std::size_t> counts;
    std::vector<double> mass;
    int B = 0;
    std::size_t n_omega = 0;

    double abscissa(int k) const { return static_cast<double>(k) / B; }
    // sum of mass[k] for k >= k_min
    double tail_mass(int k_min) const;
    std::size_t tail_count(int k_min) const;
};

EmpiricalDensity empirical_density(const FrequencyTable& table, int p);
EmpiricalDensity density_from_counts(std::vector<std::size_t> counts);

// Law of Q^gamma with Q ~ Beta(a, b).
struct PoweredBetaParams {
    double a = 1.0;
    double b = 1.0;
    double gamma = 1.0;
};

// h(k/B) = int_0^1 C(B,k) t^k (1-t)^(B-k) f_T(t) dt for every k in [0, B],
// computed by tanh-sinh quadrature in the Beta variable to absolute tolerance
// `abs_tol`. Throws QuadratureFailure if the tolerance is not met.
std::vector<double> powered_beta_binomial_pmf(int B, const PoweredBetaParams& params, double abs_tol = 1e-10);
double powered_beta_binomial_pmf(int k, int B, const PoweredBetaParams& params, double abs_tol = 1e-10);

// Same integral restricted to the listed k values.
std::vector<double> powered_beta_binomial_pmf_at(const std::vector<int>& ks, int B, const PoweredBetaParams& params,
                                                 double abs_tol = 1e-10);

// Closed-form beta-binomial pmf, the gamma = 1 special case.
double beta_binomial_pmf(int k, int B, double a, double b);

// Lattice interval (V1, V2] expressed in counts: k_low < k <= k_high.
struct FitRange {
    int k_low = 0;
    int k_high = 0;
};

struct NullMixtureFit {
    double pi_hat = 0.0;
    PoweredBetaParams params;
    FitRange range;
    int B = 0;
    double objective = 0.0;
    std::vector<double> null_mass;    // h at every lattice point
    // Best objective reached from each multistart point, and the objective
    // at the start point itself.
    std::vector<double> start_objectives;
    std::vector<double> start_results;

    double v1() const { return static_cast<double>(range.k_low) / B; }
    double v2() const { return static_cast<double>(range.k_high) / B; }
};

struct NullFitOptions {
    double objective_tol = 1e-13;
    int max_evaluations = 1500;    // per multistart
    double quadrature_tol = 1e-10;
};

// Cross-entropy of the range-renormalized null against the empirical mass.
double null_fit_objective(const EmpiricalDensity& density, FitRange range, const PoweredBetaParams& params,
                          double quadrature_tol = 1e-10);

// Fits the null by minimizing the range-renormalized cross-entropy over
// (log a, log b, log gamma) with eight Nelder-Mead starts, then sets pi by
// matching the mass on the fitting range.
NullMixtureFit fit_null(const EmpiricalDensity& density, FitRange range, const NullFitOptions& options = {});

// pi such that (1 - pi) sum_range null = sum_range empirical, clamped to
// [0, 1 - 1e-6].
double mass_matched_pi(const EmpiricalDensity& density, FitRange range, const std::vector<double>& null_mass);

// min(1, (1 - pi) sum_{k >= k_c} h_k / sum_{k >= k_c} f_k). Throws EmptyTail.
double estimate_fdr(const EmpiricalDensity& density, const NullMixtureFit& fit, int cutoff_k);

// Smallest k_c in [1, B] with a nonempty tail and estimated FDR <= alpha.
std::optional<int> optimal_cutoff(const EmpiricalDensity& density, const NullMixtureFit& fit, double alpha);

double estimate_true_edges(std::size_t set_size, double fdr);

struct LambdaCandidate {
    double lambda = 0.0;
    double l = 1.0;
    std::optional<int> cutoff_k;
    double n_true_hat = 0.0;
    bool u_flag = false;
};

// Index of the qualifying candidate with the largest estimated true-edge
// count (ties toward larger lambda), or nullopt when no candidate is both
// U-shaped and FDR-controllable.
std::optional<std::size_t> select_lambda(const std::vector<LambdaCandidate>& candidates);

}  // namespace binco
