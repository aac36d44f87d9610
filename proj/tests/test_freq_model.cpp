#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "binco/error.hpp"
#include "binco/freq_model.hpp"
#include "oracles.hpp"

using namespace binco;

namespace {

// Density whose mass is given exactly; counts carry the same shape so that
// tail emptiness checks work.
EmpiricalDensity exact_density(const std::vector<double>& mass) {
    EmpiricalDensity d;
    d.B = static_cast<int>(mass.size()) - 1;
    d.mass = mass;
    d.n_omega = 1000000000;
    for (double m : mass) d.counts.push_back(static_cast<std::size_t>(std::llround(m * 1e9)));
    return d;
}

NullMixtureFit fixed_fit(std::vector<double> null_mass, double pi) {
    NullMixtureFit fit;
    fit.B = static_cast<int>(null_mass.size()) - 1;
    fit.null_mass = std::move(null_mass);
    fit.pi_hat = pi;
    return fit;
}

}  // namespace

TEST_CASE("empirical density counts lattice occupancy") {
    FrequencyTable t(3, 2);
    t.set_count({0, 1}, 2);
    t.set_count({0, 2}, 1);
    const EmpiricalDensity d = empirical_density(t, 3);
    CHECK(d.B == 2);
    CHECK(d.n_omega == 3);
    for (double m : d.mass) CHECK(m == doctest::Approx(1.0 / 3.0));

    const EmpiricalDensity empty = empirical_density(FrequencyTable(4, 5), 4);
    CHECK(empty.mass.front() == 1.0);
    for (int k = 1; k <= 5; ++k) CHECK(empty.mass[static_cast<std::size_t>(k)] == 0.0);
    CHECK_THROWS_AS(empirical_density(t, 4), DimensionMismatch);
}

TEST_CASE("uniform prior gives uniform counts") {
    for (int B : {1, 7, 50}) {
        const auto h = powered_beta_binomial_pmf(B, {1.0, 1.0, 1.0});
        for (double v : h) CHECK(v == doctest::Approx(1.0 / (B + 1)).epsilon(1e-10));
    }
}

TEST_CASE("gamma = 1 reduces to the closed-form beta-binomial") {
    const auto h = powered_beta_binomial_pmf(10, {2.0, 3.0, 1.0});
    for (int k = 0; k <= 10; ++k) CHECK(std::abs(h[static_cast<std::size_t>(k)] - beta_binomial_pmf(k, 10, 2.0, 3.0)) < 1e-10);

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> shape(0.2, 12.0);
    for (int draw = 0; draw < 20; ++draw) {
        const double a = shape(gen);
        const double b = shape(gen);
        const int B = 5 + static_cast<int>(gen() % 96);
        const auto pmf = powered_beta_binomial_pmf(B, {a, b, 1.0});
        double worst = 0.0;
        for (int k = 0; k <= B; ++k)
            worst = std::max(worst, std::abs(pmf[static_cast<std::size_t>(k)] - beta_binomial_pmf(k, B, a, b)));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("powered beta-binomial agrees with simulation") {
    const PoweredBetaParams p{2.0, 5.0, 0.5};
    const int B = 20;
    const int draws = 1000000;
    const auto mc = test::monte_carlo_pmf(B, p, draws, 1234);
    const auto h = powered_beta_binomial_pmf(B, p);
    for (int k = 0; k <= B; ++k) {
        const double hk = h[static_cast<std::size_t>(k)];
        const double se = std::sqrt(hk * (1.0 - hk) / draws);
        CHECK(std::abs(mc[static_cast<std::size_t>(k)] - hk) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("pmf sums to one and single-k lookups agree") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> la(std::log(0.1), std::log(20.0));
    for (int draw = 0; draw < 25; ++draw) {
        const PoweredBetaParams p{std::exp(la(gen)), std::exp(la(gen)), std::exp(0.5 * la(gen))};
        const int B = 10 + static_cast<int>(gen() % 91);
        const auto h = powered_beta_binomial_pmf(B, p);
        CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
        const int k = static_cast<int>(gen() % static_cast<std::uint64_t>(B + 1));
        CHECK(powered_beta_binomial_pmf(k, B, p) == doctest::Approx(h[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(powered_beta_binomial_pmf(5, {0.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(powered_beta_binomial_pmf(6, 5, {1.0, 1.0, 1.0}), IndexOutOfRange);
}

TEST_CASE("pure-null density is recovered") {
    const int B = 50;
    const PoweredBetaParams truth{1.5, 8.0, 1.0};
    const auto h = powered_beta_binomial_pmf(B, truth);
    const EmpiricalDensity d = exact_density(h);
    const NullMixtureFit fit = fit_null(d, {1, 40});
    CHECK(fit.pi_hat < 0.02);
    double worst = 0.0;
    for (int k = 0; k <= B; ++k)
        worst = std::max(worst, std::abs(fit.null_mass[static_cast<std::size_t>(k)] - h[static_cast<std::size_t>(k)]));
    CHECK(worst < 0.002);
    for (double start : fit.start_objectives) CHECK(fit.objective <= start);
    for (double res : fit.start_results) CHECK(fit.objective <= res);
}

TEST_CASE("planted spike at frequency one is recovered") {
    const int B = 50;
    const auto h = powered_beta_binomial_pmf(B, {1.5, 8.0, 1.0});
    std::vector<double> mass(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) mass[k] = 0.95 * h[k];
    mass.back() += 0.05;
    const NullMixtureFit fit = fit_null(exact_density(mass), {1, 45});
    CHECK(std::abs(fit.pi_hat - 0.05) <= 0.02);
    CHECK(fit.v1() == doctest::Approx(0.02));
    CHECK(fit.v2() == doctest::Approx(0.9));
}

TEST_CASE("mass matching is exact on a scaled null") {
    const auto h = powered_beta_binomial_pmf(30, {0.7, 4.0, 1.3});
    std::vector<double> mass(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) mass[k] = 0.93 * h[k];
    mass.back() += 0.07;
    CHECK(mass_matched_pi(exact_density(mass), {2, 20}, h) == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("fit range validation") {
    const EmpiricalDensity d = exact_density(powered_beta_binomial_pmf(20, {1.0, 3.0, 1.0}));
    CHECK_THROWS_AS(fit_null(d, {10, 5}), EmptyFitRange);
    CHECK_THROWS_AS(fit_null(d, {5, 7}), EmptyFitRange);
    CHECK_THROWS_AS(fit_null(d, {0, 21}), EmptyFitRange);
}

TEST_CASE("all-null identity gives FDR one") {
    const auto h = powered_beta_binomial_pmf(20, {0.8, 3.0, 1.0});
    const EmpiricalDensity d = exact_density(h);
    const NullMixtureFit fit = fixed_fit(h, 0.0);
    for (int k = 0; k <= 20; ++k) CHECK(estimate_fdr(d, fit, k) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("FDR tail ratio arithmetic") {
    std::vector<double> mass(11, 0.0);
    mass[0] = 0.996;
    mass[10] = 0.004;
    std::vector<double> null(11, 0.0);
    null[0] = 0.9998;
    null[10] = 0.0002;
    CHECK(estimate_fdr(exact_density(mass), fixed_fit(null, 0.0), 10) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(estimate_fdr(exact_density(mass), fixed_fit(null, 0.5), 10) == doctest::Approx(0.025).epsilon(1e-12));
    mass[10] = 0.0;
    mass[0] = 1.0;
    CHECK_THROWS_AS(estimate_fdr(exact_density(mass), fixed_fit(null, 0.0), 10), EmptyTail);
}

TEST_CASE("optimal cutoff") {
    // Tail of f is 0.01 (101 - k); the null tail is g(k) times that, with
    // g(k) = 0.01 + 0.5 (1 - k / 100) decreasing through 0.0875 between 84
    // and 85.
    const int B = 100;
    std::vector<double> mass(B + 1, 0.01);
    mass[0] = 1.0 - 0.01 * B;
    auto g = [](int k) { return 0.01 + 0.5 * (1.0 - k / 100.0); };
    auto null_tail = [&](int k) { return k > B ? 0.0 : g(k) * 0.01 * (101 - k); };
    std::vector<double> null(B + 1);
    for (int k = 1; k <= B; ++k) null[static_cast<std::size_t>(k)] = null_tail(k) - null_tail(k + 1);
    null[0] = 1.0 - null_tail(1);
    const EmpiricalDensity d = exact_density(mass);
    const NullMixtureFit fit = fixed_fit(null, 0.0);

    CHECK(estimate_fdr(d, fit, 84) > 0.0875);
    CHECK(estimate_fdr(d, fit, 85) <= 0.0875);
    CHECK(optimal_cutoff(d, fit, 0.0875) == 85);
    CHECK(!optimal_cutoff(d, fit, 1e-6).has_value());
    CHECK(optimal_cutoff(d, fit, 1.0) == 1);

    // Brute-force scan of the whole lattice for the smallest passing cutoff.
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.3}) {
        std::optional<int> scan;
        for (int k = B; k >= 1; --k)
            if (d.tail_mass(k) > 0.0 && estimate_fdr(d, fit, k) <= alpha) scan = k;
        CHECK(optimal_cutoff(d, fit, alpha) == scan);
    }
}

TEST_CASE("alpha = 1 picks the first lattice point with a nonempty tail") {
    std::vector<double> mass(11, 0.0);
    mass[0] = 0.9;
    mass[7] = 0.1;
    std::vector<double> null(11, 0.0);
    null[0] = 0.5;
    null[9] = 0.5;
    CHECK(optimal_cutoff(exact_density(mass), fixed_fit(null, 0.0), 1.0) == 1);
}

TEST_CASE("true-edge estimate") {
    CHECK(estimate_true_edges(100, 0.05) == doctest::Approx(95.0));
    CHECK(estimate_true_edges(0, 0.3) == 0.0);
    CHECK(estimate_true_edges(338, 0.2) == doctest::Approx(270.4));
}

TEST_CASE("lambda selection") {
    auto cand = [](double lambda, double n, bool u, bool cut) {
        LambdaCandidate c;
        c.lambda = lambda;
        c.n_true_hat = n;
        c.u_flag = u;
        if (cut) c.cutoff_k = 40;
        return c;
    };
    CHECK(select_lambda({cand(1.0, 10, true, true)}) == 0u);
    CHECK(select_lambda({cand(1.0, 80, true, true), cand(2.0, 95, true, true), cand(3.0, 90, true, true)}) == 1u);
    CHECK(!select_lambda({cand(1.0, 80, false, true), cand(2.0, 95, false, true)}).has_value());
    CHECK(!select_lambda({cand(1.0, 80, true, false)}).has_value());
    CHECK(select_lambda({cand(1.0, 50, true, true), cand(2.0, 50, true, true)}) == 1u);
    CHECK(select_lambda({cand(1.0, 50, true, true), cand(2.0, 99, false, true)}) == 0u);
}
