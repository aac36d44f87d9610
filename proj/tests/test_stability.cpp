#include <doctest.h>

#include "binco/error.hpp"
#include "binco/stability.hpp"

using namespace binco;

namespace {

FrequencyTable table_with(int p, int B, const std::vector<std::pair<Edge, std::uint32_t>>& counts) {
    FrequencyTable t(p, B);
    for (const auto& [e, k] : counts) t.set_count(e, k);
    return t;
}

}  // namespace

TEST_CASE("max over lambda tables") {
    const FrequencyTable a = table_with(4, 10, {{{0, 1}, 2}, {{2, 3}, 9}});
    CHECK(max_frequencies({a}) == a);
    const FrequencyTable b = table_with(4, 10, {{{0, 1}, 7}});
    const FrequencyTable c = table_with(4, 10, {{{0, 1}, 4}, {{1, 2}, 1}});
    const FrequencyTable m = max_frequencies({a, b, c});
    CHECK(m.frequency({0, 1}) == doctest::Approx(0.7));
    CHECK(m.frequency({2, 3}) == doctest::Approx(0.9));
    CHECK(m.frequency({1, 2}) == doctest::Approx(0.1));
    CHECK_THROWS_AS(max_frequencies({a, FrequencyTable(4, 20)}), InconsistentTables);
    CHECK_THROWS_AS(max_frequencies({}), InconsistentTables);
}

TEST_CASE("q estimate and union sizes") {
    CHECK(estimate_q({40, 60}) == 50.0);
    FrequencyGrid grid;
    grid.lambdas = {1.0, 2.0};
    grid.tables = {FrequencyTable(4, 2), FrequencyTable(4, 2)};
    grid.selections = {{{0, 1, 2}, {0, 5}}, {{3}, {}}};
    CHECK(union_sizes(grid, 0, 1) == std::vector<std::size_t>{4, 1});
    CHECK(union_sizes(grid, 1, 1) == std::vector<std::size_t>{2, 0});
    CHECK(estimate_q(union_sizes(grid, 0, 0)) == 2.0);
    CHECK_THROWS_AS(union_sizes(grid, 1, 2), IndexOutOfRange);
    grid.selections.clear();
    CHECK_THROWS_AS(union_sizes(grid, 0, 1), ConfigError);
}

TEST_CASE("false-selection bound arithmetic") {
    const double bound = expected_false_bound(50.0, 0.9, 124750);
    CHECK(std::abs(bound - 2500.0 / (0.8 * 124750.0)) < 1e-12);
    CHECK(std::abs(bound - 0.025050100200400802) < 1e-12);
    CHECK(std::abs(fdr_proxy_bound(50.0, 0.9, 124750, 10) - 0.0025050100200400802) < 1e-12);
    CHECK_THROWS_AS(expected_false_bound(50.0, 0.5, 100), ThresholdTooLow);
    CHECK_THROWS_AS(fdr_proxy_bound(50.0, 0.9, 100, 0), EmptySelection);
}

TEST_CASE("threshold choice") {
    // Ten edges always selected: the proxy is q^2 / ((2t - 1) N 10), which
    // crosses alpha between t = 0.85 and t = 0.86.
    const int p = 30;
    const std::size_t n_omega = candidate_edge_count(p);
    std::vector<std::pair<Edge, std::uint32_t>> counts;
    for (int i = 0; i < 10; ++i) counts.push_back({{i, i + 1}, 100});
    counts.push_back({{20, 25}, 40});
    const FrequencyTable t = table_with(p, 100, counts);
    const double q = 12.0;
    const double alpha = q * q / (0.71 * static_cast<double>(n_omega) * 10.0);
    const auto res = stability_select(t, q, alpha);
    REQUIRE(res.has_value());
    CHECK(res->t_count == 86);
    CHECK(res->t_star == doctest::Approx(0.86));
    CHECK(res->edges.size() == 10);
    CHECK(res->bound_at_t <= alpha);
    CHECK(fdr_proxy_bound(q, 0.85, n_omega, 10) > alpha);

    CHECK(!stability_select(t, q, 1e-9).has_value());

    // With a small q the bound at t = 0.51 is already below one.
    const auto loose = stability_select(t, 1.0, 1.0);
    REQUIRE(loose.has_value());
    CHECK(loose->t_count == 51);
}

TEST_CASE("set size is recomputed at every threshold") {
    // Five edges at 0.6 and one at 1.0: the proxy divides by 6 up to t = 0.6
    // and by 1 above it.
    std::vector<std::pair<Edge, std::uint32_t>> counts;
    for (int i = 0; i < 5; ++i) counts.push_back({{i, i + 1}, 6});
    counts.push_back({{8, 9}, 10});
    const FrequencyTable t = table_with(10, 10, counts);
    const std::size_t n = candidate_edge_count(10);
    const double q = 3.0;
    const double alpha = fdr_proxy_bound(q, 0.6, n, 6) * 1.0000001;
    const auto res = stability_select(t, q, alpha);
    REQUIRE(res.has_value());
    CHECK(res->t_count == 6);
    CHECK(res->edges.size() == 6);
    CHECK(res->bound_at_t == doctest::Approx(fdr_proxy_bound(q, 0.6, n, 6)));
    // Just below that alpha the only candidate left is t = 0.7 with one
    // edge, whose bound is larger still.
    CHECK(fdr_proxy_bound(q, 0.7, n, 1) > alpha);
    CHECK(!stability_select(t, q, alpha * 0.999).has_value());
}
