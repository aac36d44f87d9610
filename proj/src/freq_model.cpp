#include "binco/freq_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "binco/error.hpp"
#include "binco/quadrature.hpp"

namespace binco {

double EmpiricalDensity::tail_mass(int k_min) const {
    double total = 0.0;
    for (int k = std::max(k_min, 0); k <= B; ++k) total += mass[static_cast<std::size_t>(k)];
    return total;
}

std::size_t EmpiricalDensity::tail_count(int k_min) const {
    std::size_t total = 0;
    for (int k = std::max(k_min, 0); k <= B; ++k) total += counts[static_cast<std::size_t>(k)];
    return total;
}

EmpiricalDensity density_from_counts(std::vector<std::size_t> counts) {
    if (counts.size() < 2) throw DimensionMismatch("density needs at least two lattice points");
    EmpiricalDensity d;
    d.B = static_cast<int>(counts.size()) - 1;
    d.n_omega = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (d.n_omega == 0) throw DimensionMismatch("density has no candidate edges");
    d.mass.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
        d.mass[k] = static_cast<double>(counts[k]) / static_cast<double>(d.n_omega);
    d.counts = std::move(counts);
    return d;
}

EmpiricalDensity empirical_density(const FrequencyTable& table, int p) {
    if (table.dimension() != p) throw DimensionMismatch("frequency table refers to a different number of variables");
    std::vector<std::size_t> counts(static_cast<std::size_t>(table.resamples()) + 1, 0);
    for (auto c : table.counts()) {
        if (c > static_cast<std::uint32_t>(table.resamples())) throw IndexOutOfRange("count exceeds B");
        ++counts[c];
    }
    return density_from_counts(std::move(counts));
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

void check_params(const PoweredBetaParams& params) {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(params.a) || !ok(params.b) || !ok(params.gamma))
        throw ConfigError("powered beta parameters must be positive and finite");
}

}  // namespace

std::vector<double> powered_beta_binomial_pmf_at(const std::vector<int>& ks, int B, const PoweredBetaParams& params,
                                                 double abs_tol) {
    check_params(params);
    if (B < 1) throw ConfigError("B must be at least 1");
    for (int k : ks)
        if (k < 0 || k > B) throw IndexOutOfRange("k outside [0, B]");
    const double a = params.a;
    const double b = params.b;
    const double g = params.gamma;
    const double lb = log_beta(a, b);
    std::vector<double> lc(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) lc[i] = log_choose(B, ks[i]) - lb;

    // Integrate over q = t^(1/gamma) ~ Beta(a, b):
    //   C(B,k) q^(gamma k) (1 - q^gamma)^(B-k) q^(a-1) (1-q)^(b-1) / Beta(a,b)
    const LogIntegrand integrand = [&](double log_q, double log_1mq, std::span<double> out) {
        double log_1mt;
        if (-g * log_q < 1e-12)
            log_1mt = std::log(g) + log_1mq;    // 1 - q^g ~ g (1 - q) next to q = 1
        else
            log_1mt = std::log(-std::expm1(g * log_q));
        const double base = (a - 1.0) * log_q + (b - 1.0) * log_1mq;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const int k = ks[i];
            double v = lc[i] + base + g * k * log_q;
            if (k < B) v += (B - k) * log_1mt;
            out[i] = v;
        }
    };
    QuadratureOptions qopt;
    qopt.abs_tol = abs_tol;
    const QuadratureResult r = integrate_unit_interval(ks.size(), integrand, qopt);
    if (!r.converged)
        throw QuadratureFailure("powered beta-binomial quadrature did not reach tolerance (error " +
                                std::to_string(r.error_estimate) + ")");
    return r.values;
}

std::vector<double> powered_beta_binomial_pmf(int B, const PoweredBetaParams& params, double abs_tol) {
    std::vector<int> ks(static_cast<std::size_t>(B) + 1);
    std::iota(ks.begin(), ks.end(), 0);
    return powered_beta_binomial_pmf_at(ks, B, params, abs_tol);
}

double powered_beta_binomial_pmf(int k, int B, const PoweredBetaParams& params, double abs_tol) {
    return powered_beta_binomial_pmf_at({k}, B, params, abs_tol).front();
}

double beta_binomial_pmf(int k, int B, double a, double b) {
    return std::exp(log_choose(B, k) + log_beta(k + a, B - k + b) - log_beta(a, b));
}

namespace {

std::vector<int> range_points(FitRange range) {
    std::vector<int> ks;
    for (int k = range.k_low + 1; k <= range.k_high; ++k) ks.push_back(k);
    return ks;
}

void check_range(const EmpiricalDensity& density, FitRange range) {
    if (range.k_low < 0 || range.k_high > density.B || range.k_low >= range.k_high)
        throw EmptyFitRange("fitting range must satisfy 0 <= V1 < V2 <= 1 on the lattice");
}

// Bounds of the search box in log space; the quadrature truncation is
// accurate for exponents down to about 0.05.
constexpr std::array<double, 3> kLogLower{-3.0, -3.0, -3.9};
constexpr std::array<double, 3> kLogUpper{6.2, 6.2, 6.2};

PoweredBetaParams from_log(const std::array<double, 3>& x) {
    return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2])};
}

double cross_entropy(const EmpiricalDensity& density, const std::vector<int>& ks, const std::vector<double>& h) {
    const double norm = std::accumulate(h.begin(), h.end(), 0.0);
    if (!(norm > 0.0) || !std::isfinite(norm)) return std::numeric_limits<double>::infinity();
    double obj = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double f = density.mass[static_cast<std::size_t>(ks[i])];
        if (f == 0.0) continue;
        if (!(h[i] > 0.0)) return std::numeric_limits<double>::infinity();
        obj -= f * std::log(h[i] / norm);
    }
    // Generalized KL with 1 - pi <= 1: when the null puts less mass on the
    // range than the data, mass matching cannot absorb the gap and the
    // mismatch is charged here.
    double in_range = 0.0;
    for (int k : ks) in_range += density.mass[static_cast<std::size_t>(k)];
    if (norm < in_range) {
        const double r = norm / in_range;
        obj += in_range * (r - 1.0 - std::log(r));
    }
    return obj;
}

struct SimplexResult {
    std::array<double, 3> x{};
    double f = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

template <typename F>
SimplexResult nelder_mead(F&& f, std::array<double, 3> x0, double step, double ftol, int max_evals) {
    constexpr int dim = 3;
    std::array<std::array<double, 3>, dim + 1> pts;
    std::array<double, dim + 1> vals;
    SimplexResult res;
    auto eval = [&](const std::array<double, 3>& x) {
        ++res.evaluations;
        return f(x);
    };
    pts[0] = x0;
    for (int i = 0; i < dim; ++i) {
        pts[i + 1] = x0;
        pts[i + 1][i] += step;
    }
    for (int i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

    std::array<int, dim + 1> order;
    while (res.evaluations < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int l, int r) { return vals[l] < vals[r]; });
        const int best = order[0];
        const int worst = order[dim];
        const int second = order[dim - 1];
        if (std::isfinite(vals[worst]) && vals[worst] - vals[best] < ftol) break;

        std::array<double, 3> centroid{};
        for (int i = 0; i < dim; ++i)
            for (int d = 0; d < dim; ++d) centroid[d] += pts[order[i]][d] / dim;
        auto along = [&](double t) {
            std::array<double, 3> x;
            for (int d = 0; d < dim; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
            return x;
        };
        const auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (int i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (int d = 0; d < dim; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
            vals[i] = eval(pts[i]);
        }
    }
    const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.f = vals[best];
    return res;
}

}  // namespace

double null_fit_objective(const EmpiricalDensity& density, FitRange range, const PoweredBetaParams& params,
                          double quadrature_tol) {
    check_range(density, range);
    const auto ks = range_points(range);
    return cross_entropy(density, ks, powered_beta_binomial_pmf_at(ks, density.B, params, quadrature_tol));
}

double mass_matched_pi(const EmpiricalDensity& density, FitRange range, const std::vector<double>& null_mass) {
    double f_sum = 0.0;
    double h_sum = 0.0;
    for (int k = range.k_low + 1; k <= range.k_high; ++k) {
        f_sum += density.mass[static_cast<std::size_t>(k)];
        h_sum += null_mass[static_cast<std::size_t>(k)];
    }
    if (!(h_sum > 0.0)) return 0.0;
    return std::clamp(1.0 - f_sum / h_sum, 0.0, 1.0 - 1e-6);
}

NullMixtureFit fit_null(const EmpiricalDensity& density, FitRange range, const NullFitOptions& options) {
    check_range(density, range);
    const auto ks = range_points(range);
    double in_range = 0.0;
    int positive = 0;
    for (int k : ks) {
        in_range += density.mass[static_cast<std::size_t>(k)];
        if (density.mass[static_cast<std::size_t>(k)] > 0.0) ++positive;
    }
    if (ks.size() < 4 || !(in_range > 0.0))
        throw EmptyFitRange("fitting range needs at least four lattice points and positive mass");

    auto objective = [&](const std::array<double, 3>& x) {
        for (int d = 0; d < 3; ++d)
            if (x[d] < kLogLower[d] || x[d] > kLogUpper[d]) return std::numeric_limits<double>::infinity();
        try {
            return cross_entropy(density, ks, powered_beta_binomial_pmf_at(ks, density.B, from_log(x),
                                                                           options.quadrature_tol));
        } catch (const QuadratureFailure&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    NullMixtureFit fit;
    fit.range = range;
    fit.B = density.B;
    SimplexResult best;
    for (double la : {std::log(0.5), std::log(2.0)}) {
        for (double lb : {std::log(2.0), std::log(10.0)}) {
            for (double lg : {std::log(0.5), std::log(2.0)}) {
                const std::array<double, 3> start{la, lb, lg};
                fit.start_objectives.push_back(objective(start));
                SimplexResult r = nelder_mead(objective, start, 0.5, options.objective_tol, options.max_evaluations);
                // One restart from the optimum guards against a collapsed simplex.
                const SimplexResult polish =
                    nelder_mead(objective, r.x, 0.1, options.objective_tol, options.max_evaluations);
                if (polish.f <= r.f) r = polish;
                fit.start_results.push_back(r.f);
                if (r.f < best.f) best = r;
            }
        }
    }
    if (!std::isfinite(best.f)) throw OptimizerFailure("no multistart reached a finite objective");

    fit.params = from_log(best.x);
    fit.objective = best.f;
    fit.null_mass = powered_beta_binomial_pmf(density.B, fit.params, options.quadrature_tol);
    for (auto& h : fit.null_mass) h = std::max(h, std::numeric_limits<double>::min());
    fit.pi_hat = mass_matched_pi(density, range, fit.null_mass);
    return fit;
}

double estimate_fdr(const EmpiricalDensity& density, const NullMixtureFit& fit, int cutoff_k) {
    if (cutoff_k < 0 || cutoff_k > density.B) throw IndexOutOfRange("cutoff outside the lattice");
    if (fit.null_mass.size() != density.mass.size()) throw DimensionMismatch("fit and density lattices differ");
    const double f_tail = density.tail_mass(cutoff_k);
    if (!(f_tail > 0.0)) throw EmptyTail("no edge has frequency at or above the cutoff");
    double h_tail = 0.0;
    for (int k = cutoff_k; k <= density.B; ++k) h_tail += fit.null_mass[static_cast<std::size_t>(k)];
    return std::min(1.0, (1.0 - fit.pi_hat) * h_tail / f_tail);
}

std::optional<int> optimal_cutoff(const EmpiricalDensity& density, const NullMixtureFit& fit, double alpha) {
    for (int k = 1; k <= density.B; ++k) {
        if (density.tail_count(k) == 0) break;
        if (estimate_fdr(density, fit, k) <= alpha) return k;
    }
    return std::nullopt;
}

double estimate_true_edges(std::size_t set_size, double fdr) {
    return static_cast<double>(set_size) * (1.0 - fdr);
}

std::optional<std::size_t> select_lambda(const std::vector<LambdaCandidate>& candidates) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (!c.u_flag || !c.cutoff_k) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cur = candidates[*best];
        if (c.n_true_hat > cur.n_true_hat || (c.n_true_hat == cur.n_true_hat && c.lambda > cur.lambda)) best = i;
    }
    return best;
}

}  // namespace binco
