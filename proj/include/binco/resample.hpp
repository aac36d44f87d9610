#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "binco/edges.hpp"
#include "binco/ggm.hpp"

namespace binco {

enum class ResampleScheme { Bootstrap, SubsampleHalf };
enum class Procedure { Space, Neighborhood };

std::string to_string(ResampleScheme scheme);
std::string to_string(Procedure procedure);
ResampleScheme parse_scheme(const std::string& text);
Procedure parse_procedure(const std::string& text);

struct ResamplePlan {
    ResampleScheme scheme = ResampleScheme::Bootstrap;
    int B = 100;
    std::uint64_t seed = 1;
    int n = 0;
};

// Row indices (0-based) of resample b in [0, B). Bootstrap draws n indices
// with replacement; SubsampleHalf draws floor(n/2) distinct indices, sorted.
std::vector<int> draw_resample(const ResamplePlan& plan, int b);

// Seed of the penalty weights used by resample b.
std::uint64_t resample_weight_seed(const ResamplePlan& plan, int b, bool redraw_per_resample);

struct FrequencyConfig {
    double lambda = 0.0;
    double l = 1.0;
    ResampleScheme scheme = ResampleScheme::Bootstrap;
    Procedure procedure = Procedure::Space;
    std::uint64_t seed = 0;
};

// Selection counts for every candidate edge; frequency = count / B.
class FrequencyTable {
public:
    FrequencyTable() = default;
    FrequencyTable(int p, int B, FrequencyConfig config = {});

    int dimension() const noexcept { return p_; }
    int resamples() const noexcept { return B_; }
    const FrequencyConfig& config() const noexcept { return config_; }
    FrequencyConfig& config() noexcept { return config_; }

    std::uint32_t count(Edge e) const {
        return e.i < e.j ? counts_[pair_index(e.i, e.j, p_)] : counts_[pair_index(e.j, e.i, p_)];
    }
    std::uint32_t count_at(std::size_t pair) const { return counts_[pair]; }
    double frequency(Edge e) const { return static_cast<double>(count(e)) / B_; }
    void set_count(Edge e, std::uint32_t k);
    void increment(std::size_t pair) { ++counts_[pair]; }
    void set_count_at(std::size_t pair, std::uint32_t k) { counts_[pair] = k; }
    const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }

    // Edges with nonzero frequency.
    std::size_t domain_size() const;
    std::vector<std::pair<Edge, std::uint32_t>> nonzero() const;
    // {(i,j) : count >= k}
    EdgeSet at_least(std::uint32_t k) const;

    int nonconverged_fits = 0;

    friend bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
        return a.p_ == b.p_ && a.B_ == b.B_ && a.counts_ == b.counts_;
    }

private:
    int p_ = 0;
    int B_ = 0;
    FrequencyConfig config_;
    std::vector<std::uint32_t> counts_;
};

struct ResampleOptions {
    Procedure procedure = Procedure::Space;
    CombineRule combine = CombineRule::Or;
    bool redraw_weights = true;
    double zero_tol = kDefaultZeroTol;
    SpaceOptions space;
    NeighborhoodOptions neighborhood;
    int workers = 0;    // 0: OpenMP default
    bool keep_selections = false;
};

// Output of a lambda-grid run. selections[b][g] holds the sorted pair
// indices selected on resample b at lambdas[g] (kept on request only).
struct FrequencyGrid {
    std::vector<double> lambdas;
    std::vector<FrequencyTable> tables;
    std::vector<std::vector<std::vector<std::uint32_t>>> selections;
};

// Edge set chosen by the base procedure on one (already resampled) Gram.
EdgeSet select_once(const Gram& gram, double lambda, const WeightMatrix* weights, const ResampleOptions& options,
                    bool* converged = nullptr);

// One table per lambda. Every lambda sees the same resampled rows and the
// same penalty weights. Resample fits run on an OpenMP team; the reduction is
// ordered, so results do not depend on the worker count.
FrequencyGrid frequency_grid(const DataMatrix& data, const std::vector<double>& lambdas, double l,
                             const ResamplePlan& plan, const ResampleOptions& options = {});

// Single-threaded reference implementation of frequency_grid.
FrequencyGrid frequency_grid_serial(const DataMatrix& data, const std::vector<double>& lambdas, double l,
                                    const ResamplePlan& plan, const ResampleOptions& options = {});

FrequencyTable selection_frequencies(const DataMatrix& data, double lambda, double l, const ResamplePlan& plan,
                                     const ResampleOptions& options = {});

// Mean over resamples of the number of selected edges at each lambda.
std::vector<double> mean_selection_counts(const FrequencyGrid& grid);

}  // namespace binco
