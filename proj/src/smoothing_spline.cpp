#include "binco/smoothing_spline.hpp"

#include <algorithm>
#include <cmath>

#include "binco/error.hpp"

namespace binco {

SmoothingSpline::SmoothingSpline(double x0, double spacing, int points) : x0_(x0), spacing_(spacing), n_(points) {
    if (points < 4) throw DimensionMismatch("smoothing spline needs at least four points");
    if (!(spacing > 0.0)) throw ConfigError("spline spacing must be positive");
    const int m = n_ - 2;
    const double h = spacing_;
    q_ = Eigen::MatrixXd::Zero(n_, m);
    r_ = Eigen::MatrixXd::Zero(m, m);
    for (int c = 0; c < m; ++c) {
        q_(c, c) = 1.0 / h;
        q_(c + 1, c) = -2.0 / h;
        q_(c + 2, c) = 1.0 / h;
        r_(c, c) = 2.0 * h / 3.0;
        if (c + 1 < m) r_(c, c + 1) = r_(c + 1, c) = h / 6.0;
    }
    const Eigen::MatrixXd k = q_ * r_.ldlt().solve(q_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (k + k.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of the spline penalty failed");
    basis_ = es.eigenvectors();
    eigen_ = es.eigenvalues().cwiseMax(0.0);
    // K has rank n - 2; its null space (straight lines) must be left unshrunk
    // however large lambda is, so round-off there is discarded.
    eigen_.head(2).setZero();
}

double SmoothingSpline::degrees_of_freedom(double lambda) const {
    return (1.0 / (1.0 + lambda * eigen_.array())).sum();
}

double SmoothingSpline::lambda_for_df(double df) const {
    if (!(df > 2.0 && df < n_)) throw ConfigError("degrees of freedom must lie in (2, n)");
    double lo = -40.0;
    double hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (degrees_of_freedom(std::exp(mid)) > df)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

Eigen::VectorXd SmoothingSpline::fit(const Eigen::VectorXd& y, double lambda) const {
    if (y.size() != n_) throw DimensionMismatch("response length does not match the spline");
    const Eigen::VectorXd coef = basis_.transpose() * y;
    const Eigen::VectorXd shrunk = coef.array() / (1.0 + lambda * eigen_.array());
    return basis_ * shrunk;
}

Eigen::VectorXd SmoothingSpline::second_derivatives(const Eigen::VectorXd& g) const {
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n_);
    gamma.segment(1, n_ - 2) = r_.ldlt().solve(q_.transpose() * g);
    return gamma;
}

double SmoothingSpline::derivative(const Eigen::VectorXd& g, const Eigen::VectorXd& gamma, double at) const {
    const double h = spacing_;
    int i = static_cast<int>(std::floor((at - x0_) / h));
    i = std::clamp(i, 0, n_ - 2);
    const double s = at - x(i);
    const double b = (g(i + 1) - g(i)) / h - h * (2.0 * gamma(i) + gamma(i + 1)) / 6.0;
    const double c = 0.5 * gamma(i);
    const double d = (gamma(i + 1) - gamma(i)) / (6.0 * h);
    return b + 2.0 * c * s + 3.0 * d * s * s;
}

int derivative_sign_changes(const SmoothingSpline& spline, const Eigen::VectorXd& g, int per_interval,
                            double rel_tol) {
    const Eigen::VectorXd gamma = spline.second_derivatives(g);
    std::vector<double> values;
    const int n = spline.points();
    const double h = spline.x(1) - spline.x(0);
    for (int i = 0; i + 1 < n; ++i)
        for (int s = 0; s < per_interval; ++s)
            values.push_back(spline.derivative(g, gamma, spline.x(i) + h * s / per_interval));
    values.push_back(spline.derivative(g, gamma, spline.x(n - 1)));

    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double eps = rel_tol * scale;
    int changes = 0;
    int last = 0;
    for (double v : values) {
        if (std::abs(v) <= eps) continue;
        const int sign = v > 0 ? 1 : -1;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

}  // namespace binco
