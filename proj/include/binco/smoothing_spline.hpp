#pragma once

#include <vector>

#include <Eigen/Dense>

namespace binco {

// Natural cubic smoothing spline on equally spaced abscissas, i.e. the
// minimizer of sum_i (y_i - g(x_i))^2 + lambda int g''(x)^2 dx.
// The penalty matrix K = Q R^-1 Q^T is eigendecomposed once, so fits for many
// smoothing levels cost one matrix-vector product each.
class SmoothingSpline {
public:
    SmoothingSpline(double x0, double spacing, int points);

    int points() const noexcept { return n_; }
    double x(int i) const noexcept { return x0_ + spacing_ * i; }

    // Equivalent degrees of freedom tr(S_lambda), in (2, n].
    double degrees_of_freedom(double lambda) const;
    // lambda whose degrees of freedom equal df, for 2 < df < n.
    double lambda_for_df(double df) const;

    Eigen::VectorXd fit(const Eigen::VectorXd& y, double lambda) const;
    // Second derivatives at the knots for fitted values g (zero at both ends).
    Eigen::VectorXd second_derivatives(const Eigen::VectorXd& g) const;
    // First derivative of the interpolating natural spline at x.
    double derivative(const Eigen::VectorXd& g, const Eigen::VectorXd& gamma, double at) const;

private:
    double x0_;
    double spacing_;
    int n_;
    Eigen::MatrixXd q_;          // n x (n-2)
    Eigen::MatrixXd r_;          // (n-2) x (n-2)
    Eigen::MatrixXd basis_;      // eigenvectors of K
    Eigen::VectorXd eigen_;      // eigenvalues of K, clamped at zero
};

// Number of sign changes of g' over [x_0, x_{n-1}], sampled at `per_interval`
// points inside each knot interval plus the knots. Values with
// |g'| <= rel_tol * max|g'| are treated as zero and skipped.
int derivative_sign_changes(const SmoothingSpline& spline, const Eigen::VectorXd& g, int per_interval = 16,
                            double rel_tol = 1e-9);

}  // namespace binco
