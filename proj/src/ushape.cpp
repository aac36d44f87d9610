#include "binco/ushape.hpp"

#include <algorithm>
#include <cmath>

#include "binco/error.hpp"
#include "binco/smoothing_spline.hpp"

namespace binco {

std::vector<double> flexibility_grid(int points) {
    const double hi = std::clamp(static_cast<double>(points) - 1.0, 3.0, 20.0);
    const double lo = 2.5;
    std::vector<double> grid(kFlexibilityGridSize);
    for (int i = 0; i < kFlexibilityGridSize; ++i) {
        const double t = static_cast<double>(i) / (kFlexibilityGridSize - 1);
        grid[static_cast<std::size_t>(i)] = std::exp(std::log(hi) + t * (std::log(lo) - std::log(hi)));
    }
    return grid;
}

SmoothDensity smooth_density(const EmpiricalDensity& density) {
    const int B = density.B;
    if (B < 10) throw ConfigError("smoothing needs B >= 10");
    int occupied = 0;
    for (double m : density.mass)
        if (m > 0.0) ++occupied;
    if (occupied <= 1) throw DegenerateDensity("all selection-frequency mass sits on one lattice point");

    const SmoothingSpline spline(1.0 / B, 1.0 / B, B);
    Eigen::VectorXd y(B);
    for (int k = 1; k <= B; ++k) y(k - 1) = density.mass[static_cast<std::size_t>(k)];

    SmoothDensity out;
    out.B = B;
    Eigen::VectorXd fitted;
    for (double df : flexibility_grid(B)) {
        const double lambda = spline.lambda_for_df(df);
        fitted = spline.fit(y, lambda);
        out.sign_changes = derivative_sign_changes(spline, fitted);
        out.df = df;
        out.lambda = lambda;
        if (out.sign_changes == 1) break;
    }
    out.fitted.assign(fitted.data(), fitted.data() + fitted.size());
    return out;
}

UShapeReport detect_ushape(const EmpiricalDensity& density) {
    UShapeReport rep;
    const int B = density.B;
    rep.B = B;
    const SmoothDensity smooth = smooth_density(density);
    rep.smoother_df = smooth.df;
    rep.sign_changes = smooth.sign_changes;

    // Valley of the smooth curve over the lattice inside (0, 1); ties go left.
    int k2 = 1;
    for (int k = 2; k < B; ++k)
        if (smooth.at(k) < smooth.at(k2)) k2 = k;
    rep.k2 = k2;
    rep.v2 = static_cast<double>(k2) / B;
    auto reject = [&](std::string why) {
        rep.u_flag = false;
        rep.reason = std::move(why);
        return rep;
    };
    if (5 * k2 > 4 * B) return reject("valley above 0.8");
    if (k2 <= 1) return reject("no lattice point before the valley");

    // Peak of the raw density before the valley, ignoring x = 0.
    const auto& f = density.mass;
    int k1 = 1;
    for (int k = 2; k < k2; ++k)
        if (f[static_cast<std::size_t>(k)] > f[static_cast<std::size_t>(k1)]) k1 = k;
    rep.k1 = k1;
    rep.v1 = static_cast<double>(k1) / B;

    auto sum = [&](int from, int to) {
        double s = 0.0;
        for (int k = from; k <= to; ++k) s += f[static_cast<std::size_t>(k)];
        return s;
    };
    // Midpoints snap to the nearest lattice point, halves rounding up.
    const int mu1 = (k1 + k2 + 1) / 2;
    rep.s1 = sum(k1, mu1);
    rep.s2 = sum(mu1 + 1, k2);
    const int mu2 = (k2 + B + 1) / 2;
    rep.s3 = sum(k2, mu2);
    rep.s4 = sum(mu2 + 1, B);
    if (rep.s1 < rep.s2) return reject("not decreasing between peak and valley");
    if (rep.s3 > rep.s4) return reject("not increasing after the valley");
    rep.u_flag = true;
    return rep;
}

}  // namespace binco
