#include "binco/resample.hpp"

#include <algorithm>
#include <numeric>

#include "binco/error.hpp"
#include "binco/rng.hpp"

#ifdef BINCO_HAVE_OPENMP
#include <omp.h>
#endif

namespace binco {

std::string to_string(ResampleScheme scheme) {
    return scheme == ResampleScheme::Bootstrap ? "bootstrap" : "subsample";
}

std::string to_string(Procedure procedure) {
    return procedure == Procedure::Space ? "space" : "neighborhood";
}

ResampleScheme parse_scheme(const std::string& text) {
    if (text == "bootstrap") return ResampleScheme::Bootstrap;
    if (text == "subsample" || text == "subsample_half") return ResampleScheme::SubsampleHalf;
    throw ConfigError("unknown resampling scheme '" + text + "'");
}

Procedure parse_procedure(const std::string& text) {
    if (text == "space") return Procedure::Space;
    if (text == "neighborhood") return Procedure::Neighborhood;
    throw ConfigError("unknown procedure '" + text + "'");
}

std::vector<int> draw_resample(const ResamplePlan& plan, int b) {
    if (plan.n < 2) throw ConfigError("resample plan needs n >= 2");
    if (plan.B < 1) throw ConfigError("resample plan needs B >= 1");
    if (b < 0 || b >= plan.B) throw IndexOutOfRange("resample index " + std::to_string(b) + " outside [0, B)");
    auto gen = substream(plan.seed, static_cast<std::uint64_t>(b), StreamTag::ResampleIndices);
    const auto n = static_cast<std::uint64_t>(plan.n);
    std::vector<int> rows;
    if (plan.scheme == ResampleScheme::Bootstrap) {
        rows.resize(plan.n);
        for (auto& r : rows) r = static_cast<int>(uniform_below(gen, n));
        return rows;
    }
    // Partial Fisher-Yates.
    std::vector<int> pool(plan.n);
    std::iota(pool.begin(), pool.end(), 0);
    const int m = plan.n / 2;
    for (int k = 0; k < m; ++k) {
        const auto pick = k + static_cast<int>(uniform_below(gen, n - static_cast<std::uint64_t>(k)));
        std::swap(pool[k], pool[pick]);
    }
    rows.assign(pool.begin(), pool.begin() + m);
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::uint64_t resample_weight_seed(const ResamplePlan& plan, int b, bool redraw_per_resample) {
    auto gen = substream(plan.seed, redraw_per_resample ? static_cast<std::uint64_t>(b) : 0u,
                         StreamTag::PenaltyWeights);
    return gen();
}

FrequencyTable::FrequencyTable(int p, int B, FrequencyConfig config)
    : p_(p), B_(B), config_(config), counts_(candidate_edge_count(p), 0u) {}

void FrequencyTable::set_count(Edge e, std::uint32_t k) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i == e.j || e.i < 0 || e.j >= p_) throw IndexOutOfRange("edge outside the frequency table");
    if (k > static_cast<std::uint32_t>(B_)) throw IndexOutOfRange("count exceeds the number of resamples");
    counts_[pair_index(e.i, e.j, p_)] = k;
}

std::size_t FrequencyTable::domain_size() const {
    return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
}

std::vector<std::pair<Edge, std::uint32_t>> FrequencyTable::nonzero() const {
    std::vector<std::pair<Edge, std::uint32_t>> out;
    std::size_t idx = 0;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j, ++idx)
            if (counts_[idx] > 0) out.push_back({{i, j}, counts_[idx]});
    return out;
}

EdgeSet FrequencyTable::at_least(std::uint32_t k) const {
    std::vector<Edge> edges;
    std::size_t idx = 0;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j, ++idx)
            if (counts_[idx] >= k && counts_[idx] > 0) edges.push_back({i, j});
    return EdgeSet(p_, std::move(edges));
}

EdgeSet select_once(const Gram& gram, double lambda, const WeightMatrix* weights, const ResampleOptions& options,
                    bool* converged) {
    if (options.procedure == Procedure::Space) {
        const SpaceEstimate est = fit_space(gram, lambda, weights, options.space);
        if (converged) *converged = est.converged;
        return selected_edges(est, options.zero_tol);
    }
    const NeighborhoodFit fit = fit_neighborhood_coefficients(gram, lambda, weights, options.neighborhood);
    if (converged) *converged = fit.converged;
    return combine_neighborhoods(fit.beta, options.combine);
}

namespace {

struct ResampleOutcome {
    std::vector<std::vector<std::uint32_t>> selected;    // per lambda
    std::vector<char> converged;
};

void validate(const DataMatrix& data, const std::vector<double>& lambdas, double l, const ResamplePlan& plan) {
    if (lambdas.empty()) throw ConfigError("lambda grid is empty");
    for (double lam : lambdas)
        if (!(lam >= 0.0)) throw ConfigError("lambda values must be nonnegative");
    if (!(l > 0.0 && l <= 1.0)) throw InvalidPerturbationFloor(l);
    if (plan.n != data.n()) throw DimensionMismatch("resample plan n does not match the data");
    if (plan.B < 1) throw ConfigError("B must be at least 1");
}

ResampleOutcome run_resample(const DataMatrix& data, const std::vector<double>& lambdas, double l,
                             const ResamplePlan& plan, const ResampleOptions& options, int b) {
    const std::vector<int> rows = draw_resample(plan, b);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), data.values.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) y.row(static_cast<Eigen::Index>(r)) = data.values.row(rows[r]);
    const Gram gram = Gram::from_data(y);

    WeightMatrix weights;
    const bool perturbed = l < 1.0;
    if (perturbed) weights = sample_weights(data.p(), l, resample_weight_seed(plan, b, options.redraw_weights));

    ResampleOutcome out;
    out.selected.resize(lambdas.size());
    out.converged.resize(lambdas.size(), 1);
    const int p = data.p();
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        bool ok = true;
        const EdgeSet edges = select_once(gram, lambdas[g], perturbed ? &weights : nullptr, options, &ok);
        out.converged[g] = ok ? 1 : 0;
        auto& sel = out.selected[g];
        sel.reserve(edges.size());
        for (const Edge& e : edges) sel.push_back(static_cast<std::uint32_t>(pair_index(e.i, e.j, p)));
    }
    return out;
}

FrequencyGrid reduce(const DataMatrix& data, const std::vector<double>& lambdas, double l, const ResamplePlan& plan,
                     const ResampleOptions& options, std::vector<ResampleOutcome>& outcomes) {
    FrequencyGrid grid;
    grid.lambdas = lambdas;
    for (double lam : lambdas) {
        FrequencyConfig cfg{lam, l, plan.scheme, options.procedure, plan.seed};
        grid.tables.emplace_back(data.p(), plan.B, cfg);
    }
    for (const auto& outcome : outcomes) {
        for (std::size_t g = 0; g < lambdas.size(); ++g) {
            for (auto pair : outcome.selected[g]) grid.tables[g].increment(pair);
            if (!outcome.converged[g]) ++grid.tables[g].nonconverged_fits;
        }
    }
    if (options.keep_selections) {
        grid.selections.reserve(outcomes.size());
        for (auto& outcome : outcomes) grid.selections.push_back(std::move(outcome.selected));
    }
    return grid;
}

}  // namespace

FrequencyGrid frequency_grid_serial(const DataMatrix& data, const std::vector<double>& lambdas, double l,
                                    const ResamplePlan& plan, const ResampleOptions& options) {
    validate(data, lambdas, l, plan);
    std::vector<ResampleOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(plan.B));
    for (int b = 0; b < plan.B; ++b) {
        try {
            outcomes.push_back(run_resample(data, lambdas, l, plan, options, b));
        } catch (const std::exception& ex) {
            throw NumericalError("resample " + std::to_string(b) + ": " + ex.what());
        }
    }
    return reduce(data, lambdas, l, plan, options, outcomes);
}

FrequencyGrid frequency_grid(const DataMatrix& data, const std::vector<double>& lambdas, double l,
                             const ResamplePlan& plan, const ResampleOptions& options) {
#ifdef BINCO_HAVE_OPENMP
    validate(data, lambdas, l, plan);
    std::vector<ResampleOutcome> outcomes(static_cast<std::size_t>(plan.B));
    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
    // Lowest failing resample wins, so the message does not depend on timing.
    int failed = plan.B;
    std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int b = 0; b < plan.B; ++b) {
        try {
            outcomes[static_cast<std::size_t>(b)] = run_resample(data, lambdas, l, plan, options, b);
        } catch (const std::exception& ex) {
#pragma omp critical(binco_resample_failure)
            if (b < failed) {
                failed = b;
                failure = "resample " + std::to_string(b) + ": " + ex.what();
            }
        }
    }
    if (!failure.empty()) throw NumericalError(failure);
    return reduce(data, lambdas, l, plan, options, outcomes);
#else
    return frequency_grid_serial(data, lambdas, l, plan, options);
#endif
}

FrequencyTable selection_frequencies(const DataMatrix& data, double lambda, double l, const ResamplePlan& plan,
                                     const ResampleOptions& options) {
    ResampleOptions opts = options;
    opts.keep_selections = false;
    return std::move(frequency_grid(data, {lambda}, l, plan, opts).tables.front());
}

std::vector<double> mean_selection_counts(const FrequencyGrid& grid) {
    std::vector<double> out;
    for (const auto& table : grid.tables) {
        double total = 0.0;
        for (auto c : table.counts()) total += c;
        out.push_back(table.resamples() > 0 ? total / table.resamples() : 0.0);
    }
    return out;
}

}  // namespace binco
