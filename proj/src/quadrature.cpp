#include "binco/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace binco {

namespace {

// log(1 / (1 + exp(-u)))
double log_sigmoid(double u) {
    return u < 0.0 ? u - std::log1p(std::exp(u)) : -std::log1p(std::exp(-u));
}

}  // namespace

QuadratureResult integrate_unit_interval(std::size_t components, const LogIntegrand& integrand,
                                         const QuadratureOptions& options) {
    QuadratureResult result;
    std::vector<double> sum(components, 0.0);    // sum of weight * f over all nodes so far
    std::vector<double> logs(components);
    std::vector<double> previous(components, 0.0);
    std::vector<double> current(components, 0.0);

    auto add_node = [&](double t) {
        const double u = std::numbers::pi * std::sinh(t);
        const double log_x = log_sigmoid(u);
        const double log_1mx = log_sigmoid(-u);
        // dx/dt = pi cosh(t) x (1 - x)
        const double log_w = std::log(std::numbers::pi * std::cosh(t)) + log_x + log_1mx;
        integrand(log_x, log_1mx, logs);
        for (std::size_t k = 0; k < components; ++k) {
            const double v = logs[k] + log_w;
            if (v > -745.0) sum[k] += std::exp(v);
        }
    };

    double h = 0.5;
    const int half = static_cast<int>(std::floor(options.t_max / h));
    for (int i = -half; i <= half; ++i) add_node(i * h);
    for (std::size_t k = 0; k < components; ++k) previous[k] = sum[k] * h;

    for (int level = 1; level <= options.max_levels; ++level) {
        h *= 0.5;
        const int count = static_cast<int>(std::floor(options.t_max / h));
        for (int i = -count; i <= count; i += 1) {
            if (i % 2 == 0) continue;
            add_node(i * h);
        }
        double err = 0.0;
        for (std::size_t k = 0; k < components; ++k) {
            current[k] = sum[k] * h;
            err = std::max(err, std::abs(current[k] - previous[k]));
        }
        result.levels = level;
        result.error_estimate = err;
        std::swap(previous, current);
        if (level >= options.min_levels && err < options.abs_tol) {
            result.converged = true;
            break;
        }
    }
    result.values = std::move(previous);
    return result;
}

}  // namespace binco
