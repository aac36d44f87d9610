#pragma once

#include <vector>

#include "binco/freq_model.hpp"

namespace binco {

// Smoothed selection-frequency density on the lattice points k = 1..B.
// Lattice point 0 (edges never selected) is left out of the smoother.
struct SmoothDensity {
    std::vector<double> fitted;    // fitted[k - 1] is the smooth value at k / B
    int B = 0;
    int sign_changes = 0;
    double df = 0.0;
    double lambda = 0.0;

    double at(int k) const { return fitted[static_cast<std::size_t>(k - 1)]; }
};

inline constexpr int kFlexibilityGridSize = 30;

// Degrees-of-freedom grid scanned by smooth_density, most flexible first.
std::vector<double> flexibility_grid(int points);

// Cubic smoothing spline of mass against k/B. The first (most flexible) fit
// on the grid whose derivative changes sign exactly once is returned; if none
// does, the least flexible fit is returned with its sign-change count.
SmoothDensity smooth_density(const EmpiricalDensity& density);

struct UShapeReport {
    int k1 = 0;    // peak, lattice units
    int k2 = 0;    // valley, lattice units
    int B = 0;
    double v1 = 0.0;
    double v2 = 0.0;
    bool u_flag = false;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
    double smoother_df = 0.0;
    int sign_changes = 0;
    std::string reason;    // why u_flag is false; empty when true
};

UShapeReport detect_ushape(const EmpiricalDensity& density);

}  // namespace binco
