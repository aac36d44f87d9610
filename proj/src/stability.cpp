#include "binco/stability.hpp"

#include <algorithm>
#include <numeric>

#include "binco/error.hpp"

namespace binco {

FrequencyTable max_frequencies(const std::vector<FrequencyTable>& tables) {
    if (tables.empty()) throw InconsistentTables("no tables to combine");
    const auto& first = tables.front();
    for (const auto& t : tables) {
        if (t.dimension() != first.dimension() || t.resamples() != first.resamples() ||
            t.config().scheme != first.config().scheme || t.config().seed != first.config().seed)
            throw InconsistentTables("tables differ in dimension, B or resample plan");
    }
    FrequencyTable out(first.dimension(), first.resamples(), first.config());
    const std::size_t n = first.counts().size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::uint32_t best = 0;
        for (const auto& t : tables) best = std::max(best, t.count_at(idx));
        out.set_count_at(idx, best);
    }
    return out;
}

double estimate_q(const std::vector<std::size_t>& union_sizes) {
    if (union_sizes.empty()) return 0.0;
    const double total = std::accumulate(union_sizes.begin(), union_sizes.end(), 0.0);
    return total / static_cast<double>(union_sizes.size());
}

std::vector<std::size_t> union_sizes(const FrequencyGrid& grid, std::size_t first, std::size_t last) {
    if (grid.selections.empty()) throw ConfigError("grid was run without keep_selections");
    if (first > last || last >= grid.lambdas.size()) throw IndexOutOfRange("lambda range outside the grid");
    std::vector<std::size_t> sizes;
    std::vector<std::uint32_t> merged;
    for (const auto& per_lambda : grid.selections) {
        merged.clear();
        for (std::size_t g = first; g <= last; ++g)
            merged.insert(merged.end(), per_lambda[g].begin(), per_lambda[g].end());
        std::sort(merged.begin(), merged.end());
        sizes.push_back(static_cast<std::size_t>(std::unique(merged.begin(), merged.end()) - merged.begin()));
    }
    return sizes;
}

double expected_false_bound(double q_hat, double t, std::size_t n_omega) {
    if (!(t > 0.5)) throw ThresholdTooLow("threshold must exceed 0.5");
    return q_hat * q_hat / ((2.0 * t - 1.0) * static_cast<double>(n_omega));
}

double fdr_proxy_bound(double q_hat, double t, std::size_t n_omega, std::size_t set_size) {
    if (set_size == 0) throw EmptySelection("stable set is empty");
    return expected_false_bound(q_hat, t, n_omega) / static_cast<double>(set_size);
}

std::optional<StabilityResult> stability_select(const FrequencyTable& max_table, double q_hat, double alpha) {
    const int B = max_table.resamples();
    const std::size_t n_omega = candidate_edge_count(max_table.dimension());
    // Smallest count strictly above B/2.
    for (int k = B / 2 + 1; k <= B; ++k) {
        std::size_t size = 0;
        for (auto c : max_table.counts())
            if (c >= static_cast<std::uint32_t>(k)) ++size;
        if (size == 0) break;
        const double t = static_cast<double>(k) / B;
        const double bound = fdr_proxy_bound(q_hat, t, n_omega, size);
        if (bound <= alpha) {
            StabilityResult res;
            res.t_count = k;
            res.B = B;
            res.t_star = t;
            res.edges = max_table.at_least(static_cast<std::uint32_t>(k));
            res.q_hat = q_hat;
            res.bound_at_t = bound;
            return res;
        }
    }
    return std::nullopt;
}

std::optional<StabilityResult> stability_select(const FrequencyGrid& grid, std::size_t first, std::size_t last,
                                                double alpha) {
    const std::vector<FrequencyTable> subset(grid.tables.begin() + static_cast<std::ptrdiff_t>(first),
                                             grid.tables.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return stability_select(max_frequencies(subset), estimate_q(union_sizes(grid, first, last)), alpha);
}

}  // namespace binco
