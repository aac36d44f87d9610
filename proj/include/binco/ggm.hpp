#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "binco/edges.hpp"

namespace binco {

// n x p observation matrix with one named column per variable.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;

    int n() const noexcept { return static_cast<int>(values.rows()); }
    int p() const noexcept { return static_cast<int>(values.cols()); }
};

// Centers every column and scales it to unit sample SD (denominator n - 1).
// Missing names are filled with V1..Vp.
DataMatrix standardize(const Eigen::MatrixXd& raw, std::vector<std::string> column_names = {});

// Symmetric penalty weights for the randomized lasso. Entries satisfy
// floor < w_ij <= 1 off the diagonal; the diagonal is unused and set to 1.
struct WeightMatrix {
    Eigen::MatrixXd w;
    double floor = 1.0;
    std::uint64_t seed = 0;
};

// Draws 1/w_ij ~ Uniform[1, 1/l) independently for i < j.
WeightMatrix sample_weights(int p, double l, std::uint64_t seed);

struct SpaceOptions {
    int outer_rounds = 2;    // alternations of {rho | sigma} and {sigma | rho}
    double tol = 1e-6;       // max |delta rho| per sweep
    int max_sweeps = 500;    // per rho solve
    // When set, receives the objective after every sweep of every rho solve.
    std::vector<double>* objective_trace = nullptr;
};

struct SpaceEstimate {
    Eigen::MatrixXd rho;           // symmetric, unit diagonal
    Eigen::VectorXd sigma_diag;    // sigma_ii used by the final rho solve
    double lambda = 0.0;
    std::optional<Eigen::MatrixXd> weights;
    bool converged = false;
    int iterations = 0;            // sweeps over all rho solves
};

// Sufficient statistics for the regression losses: S = Y^T Y and n.
struct Gram {
    Eigen::MatrixXd s;
    int n = 0;

    static Gram from_data(const Eigen::MatrixXd& y);
    int p() const noexcept { return static_cast<int>(s.cols()); }
};

// Joint sparse partial-correlation regression. Minimizes
//   1/2 sum_i ||Y_i - sum_{j != i} sqrt(s_jj / s_ii) rho_ij Y_j||^2
//     + lambda sum_{i<j} |rho_ij| / w_ij
// over rho by active-set coordinate descent, alternating with
// s_ii = n / ||r_i||^2. The last step of the alternation is always a rho
// solve, so the returned estimate satisfies the KKT conditions for the
// returned sigma_diag.
SpaceEstimate fit_space(const DataMatrix& data, double lambda, const WeightMatrix* weights = nullptr,
                        const SpaceOptions& options = {});
SpaceEstimate fit_space(const Gram& gram, double lambda, const WeightMatrix* weights = nullptr,
                        const SpaceOptions& options = {});

// Objective of the joint loss at (rho, sigma_diag).
double space_objective(const Gram& gram, const Eigen::MatrixXd& rho, const Eigen::VectorXd& sigma_diag,
                       double lambda, const WeightMatrix* weights = nullptr);

// Gradient of the smooth part of the joint loss with respect to rho_ij, i<j,
// returned as a symmetric matrix with zero diagonal.
Eigen::MatrixXd space_gradient(const Gram& gram, const Eigen::MatrixXd& rho, const Eigen::VectorXd& sigma_diag);

// Largest subgradient-condition violation over all pairs.
double space_kkt_residual(const Gram& gram, const SpaceEstimate& est, const WeightMatrix* weights = nullptr);

// Smallest lambda at which rho = 0 solves the first rho solve (sigma = 1).
double space_lambda_max(const Gram& gram, const WeightMatrix* weights = nullptr);

enum class CombineRule { And, Or };

struct NeighborhoodOptions {
    double tol = 1e-6;
    int max_sweeps = 500;
};

struct NeighborhoodFit {
    Eigen::MatrixXd beta;    // row i holds the coefficients of regression i
    bool converged = true;
    int iterations = 0;
};

// p independent lasso regressions of each variable on the rest.
NeighborhoodFit fit_neighborhood_coefficients(const Gram& gram, double lambda, const WeightMatrix* weights = nullptr,
                                              const NeighborhoodOptions& options = {});

EdgeSet fit_neighborhood(const DataMatrix& data, double lambda, const WeightMatrix* weights = nullptr,
                         CombineRule combine = CombineRule::Or, const NeighborhoodOptions& options = {});
EdgeSet fit_neighborhood(const Gram& gram, double lambda, const WeightMatrix* weights = nullptr,
                         CombineRule combine = CombineRule::Or, const NeighborhoodOptions& options = {});

EdgeSet combine_neighborhoods(const Eigen::MatrixXd& beta, CombineRule combine, double zero_tol = 0.0);

double neighborhood_lambda_max(const Gram& gram, const WeightMatrix* weights = nullptr);

inline constexpr double kDefaultZeroTol = 1e-6;

// {(i,j) : |rho_ij| > zero_tol}.
EdgeSet selected_edges(const SpaceEstimate& est, double zero_tol = kDefaultZeroTol);

}  // namespace binco
