#pragma once

#include <functional>
#include <span>
#include <vector>

namespace binco {

// Callback for integrate_unit_interval: given log(x) and log(1 - x) of an
// abscissa in (0, 1), write the log of each integrand component into
// `log_values`. Returning -inf for a component means a zero contribution.
using LogIntegrand = std::function<void(double log_x, double log_1mx, std::span<double> log_values)>;

struct QuadratureResult {
    std::vector<double> values;
    double error_estimate = 0.0;
    int levels = 0;
    bool converged = false;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double t_max = 7.0;      // tanh-sinh truncation; x ranges down to ~exp(-1700)
    int min_levels = 3;
    int max_levels = 11;
};

// Vector-valued tanh-sinh (double exponential) quadrature over (0, 1). Every
// component shares the same nodes. The step is halved until the largest
// componentwise change between successive levels is below abs_tol. The
// integrand is supplied in log form so endpoint singularities of the
// x^(a-1) (1-x)^(b-1) kind neither overflow nor underflow.
QuadratureResult integrate_unit_interval(std::size_t components, const LogIntegrand& integrand,
                                         const QuadratureOptions& options = {});

}  // namespace binco
