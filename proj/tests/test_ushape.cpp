#include <doctest.h>

#include <cmath>
#include <numeric>

#include "binco/error.hpp"
#include "binco/smoothing_spline.hpp"
#include "binco/ushape.hpp"

using namespace binco;

namespace {

EmpiricalDensity normalized(std::vector<double> w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    EmpiricalDensity d;
    d.B = static_cast<int>(w.size()) - 1;
    d.n_omega = 100000;
    for (double v : w) {
        d.mass.push_back(v / total);
        d.counts.push_back(static_cast<std::size_t>(std::llround(v / total * 1e5)));
    }
    return d;
}

template <typename F>
EmpiricalDensity from_function(int B, F&& f) {
    std::vector<double> w;
    for (int k = 0; k <= B; ++k) w.push_back(f(static_cast<double>(k) / B));
    return normalized(std::move(w));
}

}  // namespace

TEST_CASE("smoothing spline degrees of freedom") {
    const SmoothingSpline s(0.0, 0.1, 25);
    CHECK(s.degrees_of_freedom(1e-12) == doctest::Approx(25.0).epsilon(1e-4));
    CHECK(s.degrees_of_freedom(1e12) == doctest::Approx(2.0).epsilon(1e-4));
    for (double df : {2.5, 5.0, 12.0, 20.0})
        CHECK(s.degrees_of_freedom(s.lambda_for_df(df)) == doctest::Approx(df).epsilon(1e-6));
}

TEST_CASE("smoothing spline reproduces straight lines") {
    const SmoothingSpline s(1.0, 0.5, 12);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = 3.0 - 2.0 * s.x(i);
    for (double lambda : {1e-6, 1.0, 1e6}) {
        const Eigen::VectorXd g = s.fit(y, lambda);
        CHECK((g - y).cwiseAbs().maxCoeff() < 1e-9);
        const Eigen::VectorXd gamma = s.second_derivatives(g);
        CHECK(gamma.cwiseAbs().maxCoeff() < 1e-8);
        CHECK(s.derivative(g, gamma, 2.3) == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(derivative_sign_changes(s, g) == 0);
    }
}

TEST_CASE("flexibility grid runs from flexible to stiff") {
    const auto grid = flexibility_grid(50);
    REQUIRE(grid.size() == static_cast<std::size_t>(kFlexibilityGridSize));
    CHECK(grid.front() == doctest::Approx(20.0));
    CHECK(grid.back() == doctest::Approx(2.5));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
}

TEST_CASE("parabola has one sign change at its vertex") {
    const int B = 50;
    const EmpiricalDensity d = from_function(B, [](double x) { return (x - 0.5) * (x - 0.5) + 0.01; });
    const SmoothDensity s = smooth_density(d);
    CHECK(s.sign_changes == 1);
    int valley = 1;
    for (int k = 2; k < B; ++k)
        if (s.at(k) < s.at(valley)) valley = k;
    CHECK(std::abs(static_cast<double>(valley) / B - 0.5) <= 1.0 / B + 1e-12);
}

TEST_CASE("monotone density never changes sign and is not U-shaped") {
    const int B = 50;
    for (double rate : {0.5, 2.0, 4.0}) {
        const EmpiricalDensity d = from_function(B, [&](double x) { return std::exp(-rate * x); });
        const SmoothDensity s = smooth_density(d);
        CHECK(s.sign_changes == 0);
        CHECK(s.df == doctest::Approx(flexibility_grid(B).back()));
        const UShapeReport rep = detect_ushape(d);
        CHECK(!rep.u_flag);
        CHECK(!rep.reason.empty());
    }
}

TEST_CASE("steep decays that make the smoother overshoot are still rejected") {
    for (double rate : {6.0, 10.0, 20.0}) {
        const EmpiricalDensity d = from_function(50, [&](double x) { return std::exp(-rate * x); });
        CHECK(!detect_ushape(d).u_flag);
    }
}

TEST_CASE("valley above 0.8 is rejected") {
    const EmpiricalDensity d = from_function(50, [](double x) { return (x - 0.9) * (x - 0.9) + 0.001; });
    const UShapeReport rep = detect_ushape(d);
    CHECK(rep.v2 > 0.8);
    CHECK(!rep.u_flag);
    CHECK(rep.reason == "valley above 0.8");
}

TEST_CASE("planted U shape is detected") {
    // 0.6 geometric decay on [0, 0.4], 0.1 uniform, 0.3 spike on [0.9, 1].
    const int B = 50;
    std::vector<double> geo;
    std::vector<double> w(B + 1, 0.0);
    double geo_total = 0.0;
    for (int k = 0; 5 * k <= 2 * B; ++k) geo_total += std::pow(0.7, k);
    for (int k = 0; k <= B; ++k) {
        if (5 * k <= 2 * B) w[static_cast<std::size_t>(k)] += 0.6 * std::pow(0.7, k) / geo_total;
        w[static_cast<std::size_t>(k)] += 0.1 / (B + 1);
        if (10 * k >= 9 * B) w[static_cast<std::size_t>(k)] += 0.3 / 6.0;
    }
    const UShapeReport rep = detect_ushape(normalized(w));
    CHECK(rep.u_flag);
    CHECK(rep.v2 >= 0.3);
    CHECK(rep.v2 <= 0.7);
    CHECK(rep.v1 < rep.v2);
    CHECK(rep.s1 >= rep.s2);
    CHECK(rep.s3 <= rep.s4);
}

TEST_CASE("half-interval sums on a hand-checkable density") {
    // Raw mass peaks at k = 1; the smooth valley of the V sits at 5.
    std::vector<double> w{0.0, 5.0, 4.0, 3.0, 2.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const EmpiricalDensity d = normalized(w);
    const UShapeReport rep = detect_ushape(d);
    REQUIRE(rep.k2 == 5);
    CHECK(rep.k1 == 1);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    // mu1 = 3, mu2 = 8 (7.5 rounds up)
    CHECK(rep.s1 == doctest::Approx((5.0 + 4.0 + 3.0) / total));
    CHECK(rep.s2 == doctest::Approx((2.0 + 1.0) / total));
    CHECK(rep.s3 == doctest::Approx((1.0 + 2.0 + 3.0 + 4.0) / total));
    CHECK(rep.s4 == doctest::Approx((5.0 + 6.0) / total));
    CHECK(rep.u_flag);
}

TEST_CASE("degenerate densities") {
    std::vector<double> spike(51, 0.0);
    spike[0] = 1.0;
    CHECK_THROWS_AS(detect_ushape(normalized(spike)), DegenerateDensity);
    CHECK_THROWS_AS(detect_ushape(normalized(std::vector<double>(6, 1.0))), ConfigError);
}
