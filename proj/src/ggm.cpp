#include "binco/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binco/error.hpp"
#include "binco/rng.hpp"

namespace binco {

Edge pair_from_index(std::size_t index, int p) {
    int i = 0;
    std::size_t row_len = static_cast<std::size_t>(p - 1);
    while (index >= row_len) {
        index -= row_len;
        ++i;
        --row_len;
    }
    return {i, i + 1 + static_cast<int>(index)};
}

EdgeSet::EdgeSet(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
    for (auto& e : edges_) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i == e.j) throw IndexOutOfRange("self-loop at " + std::to_string(e.i));
        if (e.i < 0 || e.j >= p_) throw IndexOutOfRange("edge index outside [0, p)");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(Edge e) const {
    if (e.i > e.j) std::swap(e.i, e.j);
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
    return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

DataMatrix standardize(const Eigen::MatrixXd& raw, std::vector<std::string> column_names) {
    const auto n = raw.rows();
    const auto p = raw.cols();
    if (n < 2 || p < 2) throw DimensionMismatch("standardize needs n >= 2 and p >= 2");
    if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != p)
        throw DimensionMismatch("column name count does not match the number of columns");
    for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            if (!std::isfinite(raw(r, c)))
                throw NonFiniteInput(static_cast<std::size_t>(r), static_cast<std::size_t>(c));

    DataMatrix out;
    out.values.resize(n, p);
    for (Eigen::Index c = 0; c < p; ++c) {
        const double mean = raw.col(c).mean();
        Eigen::VectorXd centered = raw.col(c).array() - mean;
        const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
        if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::abs(mean)))
            throw ZeroVarianceColumn(static_cast<std::size_t>(c));
        out.values.col(c) = centered / sd;
    }
    if (column_names.empty()) {
        column_names.reserve(static_cast<std::size_t>(p));
        for (Eigen::Index c = 0; c < p; ++c) column_names.push_back("V" + std::to_string(c + 1));
    }
    out.column_names = std::move(column_names);
    return out;
}

WeightMatrix sample_weights(int p, double l, std::uint64_t seed) {
    if (!(l > 0.0 && l <= 1.0)) throw InvalidPerturbationFloor(l);
    WeightMatrix wm;
    wm.floor = l;
    wm.seed = seed;
    wm.w = Eigen::MatrixXd::Ones(p, p);
    if (l == 1.0) return wm;
    auto gen = substream(seed, 0, StreamTag::PenaltyWeights);
    const double span = 1.0 / l - 1.0;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double inv = 1.0 + uniform01(gen) * span;
            wm.w(i, j) = wm.w(j, i) = 1.0 / inv;
        }
    }
    return wm;
}

Gram Gram::from_data(const Eigen::MatrixXd& y) {
    Gram g;
    g.s = y.transpose() * y;
    g.n = static_cast<int>(y.rows());
    return g;
}

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double penalty_weight(const WeightMatrix* weights, int i, int j) {
    return weights ? weights->w(i, j) : 1.0;
}

void check_dims(const Gram& gram, const WeightMatrix* weights) {
    if (gram.s.rows() != gram.s.cols()) throw DimensionMismatch("Gram matrix is not square");
    if (weights && (weights->w.rows() != gram.s.rows() || weights->w.cols() != gram.s.cols()))
        throw DimensionMismatch("weight matrix does not match the number of variables");
}

// Coordinate descent for rho with sigma fixed. Keeps ct(j, i) = Y_j . r_i,
// the transposed cross products between predictors and residuals.
class RhoSolver {
public:
    RhoSolver(const Gram& gram, const Eigen::VectorXd& sigma, double lambda, const WeightMatrix* weights,
              Eigen::MatrixXd& rho)
        : s_(gram.s), p_(gram.p()), lambda_(lambda), weights_(weights), rho_(rho) {
        scale_.resize(p_, p_);
        for (int j = 0; j < p_; ++j)
            for (int i = 0; i < p_; ++i) scale_(i, j) = std::sqrt(sigma(j) / sigma(i));
        Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p_, p_);
        for (int j = 0; j < p_; ++j)
            for (int i = 0; i < p_; ++i)
                if (i != j && rho_(i, j) != 0.0) beta(i, j) = scale_(i, j) * rho_(i, j);
        ct_ = s_ - s_ * beta.transpose();
        for (int i = 0; i < p_; ++i)
            for (int j = i + 1; j < p_; ++j)
                if (rho_(i, j) != 0.0) active_.push_back({i, j});
    }

    // Returns the number of sweeps used; `converged` reports the stop reason.
    int solve(const SpaceOptions& options, bool& converged) {
        int sweeps = 0;
        converged = false;
        while (sweeps < options.max_sweeps) {
            const double full_delta = full_sweep();
            ++sweeps;
            trace(options);
            if (full_delta < options.tol) {
                converged = true;
                break;
            }
            while (sweeps < options.max_sweeps) {
                const double delta = active_sweep();
                ++sweeps;
                trace(options);
                if (delta < options.tol) break;
            }
        }
        return sweeps;
    }

    double objective() const {
        double loss = 0.0;
        for (int i = 0; i < p_; ++i) {
            double rss = ct_(i, i);
            for (int k = 0; k < p_; ++k)
                if (k != i && rho_(i, k) != 0.0) rss -= scale_(i, k) * rho_(i, k) * ct_(k, i);
            loss += rss;
        }
        double pen = 0.0;
        for (int i = 0; i < p_; ++i)
            for (int j = i + 1; j < p_; ++j)
                if (rho_(i, j) != 0.0) pen += std::abs(rho_(i, j)) / penalty_weight(weights_, i, j);
        return 0.5 * loss + lambda_ * pen;
    }

    // ||r_i||^2 for every node at the current rho.
    Eigen::VectorXd residual_ss() const {
        Eigen::VectorXd rss(p_);
        for (int i = 0; i < p_; ++i) {
            double v = ct_(i, i);
            for (int k = 0; k < p_; ++k)
                if (k != i && rho_(i, k) != 0.0) v -= scale_(i, k) * rho_(i, k) * ct_(k, i);
            rss(i) = v;
        }
        return rss;
    }

private:
    double update(int i, int j) {
        const double a = scale_(i, j);
        const double inv_a = scale_(j, i);
        const double old = rho_(i, j);
        const double curvature = a * a * s_(j, j) + inv_a * inv_a * s_(i, i);
        const double z = a * ct_(j, i) + inv_a * ct_(i, j) + old * curvature;
        const double threshold = lambda_ / penalty_weight(weights_, i, j);
        const double next = soft_threshold(z, threshold) / curvature;
        const double delta = next - old;
        if (delta != 0.0) {
            rho_(i, j) = rho_(j, i) = next;
            ct_.col(i).noalias() -= (a * delta) * s_.col(j);
            ct_.col(j).noalias() -= (inv_a * delta) * s_.col(i);
        }
        return std::abs(delta);
    }

    double full_sweep() {
        double max_delta = 0.0;
        for (int i = 0; i < p_; ++i)
            for (int j = i + 1; j < p_; ++j) max_delta = std::max(max_delta, update(i, j));
        active_.clear();
        for (int i = 0; i < p_; ++i)
            for (int j = i + 1; j < p_; ++j)
                if (rho_(i, j) != 0.0) active_.push_back({i, j});
        return max_delta;
    }

    double active_sweep() {
        double max_delta = 0.0;
        for (const auto& e : active_) max_delta = std::max(max_delta, update(e.i, e.j));
        return max_delta;
    }

    void trace(const SpaceOptions& options) const {
        if (options.objective_trace) options.objective_trace->push_back(objective());
    }

    const Eigen::MatrixXd& s_;
    int p_;
    double lambda_;
    const WeightMatrix* weights_;
    Eigen::MatrixXd& rho_;
    Eigen::MatrixXd scale_;    // scale_(i, j) = sqrt(sigma_j / sigma_i)
    Eigen::MatrixXd ct_;
    std::vector<Edge> active_;
};

}  // namespace

SpaceEstimate fit_space(const DataMatrix& data, double lambda, const WeightMatrix* weights,
                        const SpaceOptions& options) {
    return fit_space(Gram::from_data(data.values), lambda, weights, options);
}

SpaceEstimate fit_space(const Gram& gram, double lambda, const WeightMatrix* weights, const SpaceOptions& options) {
    check_dims(gram, weights);
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
    const int p = gram.p();

    SpaceEstimate est;
    est.lambda = lambda;
    if (weights) est.weights = weights->w;
    est.rho = Eigen::MatrixXd::Zero(p, p);
    est.sigma_diag = Eigen::VectorXd::Ones(p);
    est.converged = true;

    const int rounds = std::max(1, options.outer_rounds);
    for (int round = 0; round < rounds; ++round) {
        RhoSolver solver(gram, est.sigma_diag, lambda, weights, est.rho);
        bool converged = false;
        est.iterations += solver.solve(options, converged);
        est.converged = est.converged && converged;
        if (round + 1 == rounds) break;
        const Eigen::VectorXd rss = solver.residual_ss();
        for (int i = 0; i < p; ++i) {
            const double floor = 1e-12 * gram.s(i, i);
            est.sigma_diag(i) = static_cast<double>(gram.n) / std::max(rss(i), floor);
        }
    }
    est.rho.diagonal().setOnes();
    return est;
}

Eigen::MatrixXd space_gradient(const Gram& gram, const Eigen::MatrixXd& rho, const Eigen::VectorXd& sigma_diag) {
    const int p = gram.p();
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) beta(i, j) = std::sqrt(sigma_diag(j) / sigma_diag(i)) * rho(i, j);
    // cross(i, j) = Y_j . r_i
    const Eigen::MatrixXd cross = gram.s - beta * gram.s;
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double a = std::sqrt(sigma_diag(j) / sigma_diag(i));
            grad(i, j) = grad(j, i) = -(a * cross(i, j) + cross(j, i) / a);
        }
    }
    return grad;
}

double space_objective(const Gram& gram, const Eigen::MatrixXd& rho, const Eigen::VectorXd& sigma_diag,
                       double lambda, const WeightMatrix* weights) {
    const int p = gram.p();
    Eigen::MatrixXd coef = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) coef(i, j) = -std::sqrt(sigma_diag(j) / sigma_diag(i)) * rho(i, j);
    // Residual of node i is Y coef.row(i)^T, so sum_i ||r_i||^2 = tr(coef S coef^T).
    const double loss = (coef * gram.s * coef.transpose()).trace();
    double pen = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pen += std::abs(rho(i, j)) / penalty_weight(weights, i, j);
    return 0.5 * loss + lambda * pen;
}

double space_kkt_residual(const Gram& gram, const SpaceEstimate& est, const WeightMatrix* weights) {
    const Eigen::MatrixXd grad = space_gradient(gram, est.rho, est.sigma_diag);
    double worst = 0.0;
    for (int i = 0; i < gram.p(); ++i) {
        for (int j = i + 1; j < gram.p(); ++j) {
            const double t = est.lambda / penalty_weight(weights, i, j);
            const double r = est.rho(i, j);
            const double v = r != 0.0 ? std::abs(grad(i, j) + t * (r > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(grad(i, j)) - t);
            worst = std::max(worst, v);
        }
    }
    return worst;
}

double space_lambda_max(const Gram& gram, const WeightMatrix* weights) {
    double best = 0.0;
    for (int i = 0; i < gram.p(); ++i)
        for (int j = i + 1; j < gram.p(); ++j)
            best = std::max(best, 2.0 * std::abs(gram.s(i, j)) * penalty_weight(weights, i, j));
    return best;
}

NeighborhoodFit fit_neighborhood_coefficients(const Gram& gram, double lambda, const WeightMatrix* weights,
                                              const NeighborhoodOptions& options) {
    check_dims(gram, weights);
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
    const int p = gram.p();
    const Eigen::MatrixXd& s = gram.s;
    NeighborhoodFit fit;
    fit.beta = Eigen::MatrixXd::Zero(p, p);

    Eigen::VectorXd cross(p);
    std::vector<int> active;
    for (int i = 0; i < p; ++i) {
        // cross(j) = Y_j . r_i
        cross = s.col(i);
        auto coordinate = [&](int j) {
            const double old = fit.beta(i, j);
            const double z = cross(j) + old * s(j, j);
            const double next = soft_threshold(z, lambda / penalty_weight(weights, i, j)) / s(j, j);
            const double delta = next - old;
            if (delta != 0.0) {
                fit.beta(i, j) = next;
                cross.noalias() -= delta * s.col(j);
            }
            return std::abs(delta);
        };
        int sweeps = 0;
        bool converged = false;
        while (sweeps < options.max_sweeps) {
            double full = 0.0;
            for (int j = 0; j < p; ++j)
                if (j != i) full = std::max(full, coordinate(j));
            ++sweeps;
            if (full < options.tol) {
                converged = true;
                break;
            }
            active.clear();
            for (int j = 0; j < p; ++j)
                if (j != i && fit.beta(i, j) != 0.0) active.push_back(j);
            while (sweeps < options.max_sweeps) {
                double delta = 0.0;
                for (int j : active) delta = std::max(delta, coordinate(j));
                ++sweeps;
                if (delta < options.tol) break;
            }
        }
        fit.converged = fit.converged && converged;
        fit.iterations += sweeps;
    }
    return fit;
}

EdgeSet combine_neighborhoods(const Eigen::MatrixXd& beta, CombineRule combine, double zero_tol) {
    const int p = static_cast<int>(beta.rows());
    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const bool fwd = std::abs(beta(i, j)) > zero_tol;
            const bool bwd = std::abs(beta(j, i)) > zero_tol;
            if (combine == CombineRule::And ? (fwd && bwd) : (fwd || bwd)) edges.push_back({i, j});
        }
    }
    return EdgeSet(p, std::move(edges));
}

EdgeSet fit_neighborhood(const DataMatrix& data, double lambda, const WeightMatrix* weights, CombineRule combine,
                         const NeighborhoodOptions& options) {
    return fit_neighborhood(Gram::from_data(data.values), lambda, weights, combine, options);
}

EdgeSet fit_neighborhood(const Gram& gram, double lambda, const WeightMatrix* weights, CombineRule combine,
                         const NeighborhoodOptions& options) {
    return combine_neighborhoods(fit_neighborhood_coefficients(gram, lambda, weights, options).beta, combine);
}

double neighborhood_lambda_max(const Gram& gram, const WeightMatrix* weights) {
    double best = 0.0;
    for (int i = 0; i < gram.p(); ++i)
        for (int j = 0; j < gram.p(); ++j)
            if (i != j) best = std::max(best, std::abs(gram.s(i, j)) * penalty_weight(weights, i, j));
    return best;
}

EdgeSet selected_edges(const SpaceEstimate& est, double zero_tol) {
    const int p = static_cast<int>(est.rho.rows());
    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (std::abs(est.rho(i, j)) > zero_tol) edges.push_back({i, j});
    return EdgeSet(p, std::move(edges));
}

}  // namespace binco
