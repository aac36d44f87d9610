#include "binco/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "binco/error.hpp"
#include "binco/rng.hpp"

namespace binco {

std::string to_string(Topology topology) {
    switch (topology) {
        case Topology::PowerLaw: return "power_law";
        case Topology::Hub: return "hub";
        case Topology::Empirical: return "empirical";
        case Topology::Empty: return "empty";
    }
    return "unknown";
}

std::string to_string(SignalLevel level) {
    switch (level) {
        case SignalLevel::Strong: return "strong";
        case SignalLevel::Weak: return "weak";
        case SignalLevel::VeryWeak: return "very_weak";
    }
    return "unknown";
}

Topology parse_topology(const std::string& text) {
    if (text == "power_law" || text == "powerlaw") return Topology::PowerLaw;
    if (text == "hub") return Topology::Hub;
    if (text == "empirical") return Topology::Empirical;
    if (text == "empty") return Topology::Empty;
    throw ConfigError("unknown topology '" + text + "'");
}

SignalLevel parse_signal(const std::string& text) {
    if (text == "strong") return SignalLevel::Strong;
    if (text == "weak") return SignalLevel::Weak;
    if (text == "very_weak") return SignalLevel::VeryWeak;
    throw ConfigError("unknown signal level '" + text + "'");
}

double signal_target_mean(SignalLevel level) {
    switch (level) {
        case SignalLevel::Strong: return 0.34;
        case SignalLevel::Weak: return 0.25;
        case SignalLevel::VeryWeak: return 0.21;
    }
    return 0.34;
}

namespace {

int draw_weighted(std::mt19937_64& gen, const std::vector<int>& values, const std::vector<double>& cumulative) {
    const double u = uniform01(gen) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return values[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                      static_cast<std::ptrdiff_t>(values.size()) - 1))];
}

struct DegreeLaw {
    std::vector<int> values;
    std::vector<double> cumulative;

    void add(int degree, double weight) {
        values.push_back(degree);
        cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + weight);
    }
    int draw(std::mt19937_64& gen) const { return draw_weighted(gen, values, cumulative); }
};

std::vector<int> draw_degrees(Topology kind, int size, const TopologyParams& params, std::mt19937_64& gen) {
    std::vector<int> degrees(static_cast<std::size_t>(size), 0);
    if (kind == Topology::PowerLaw) {
        DegreeLaw law;
        const int top = params.power_max_degree > 0 ? std::min(params.power_max_degree, size - 1) : size - 1;
        for (int k = 1; k <= top; ++k) law.add(k, std::pow(static_cast<double>(k), -params.power_exponent));
        for (auto& d : degrees) d = law.draw(gen);
    } else if (kind == Topology::Hub) {
        if (params.hubs_per_component >= size) throw ConfigError("more hubs than nodes in a component");
        DegreeLaw law;
        for (int k = params.other_degree_min; k <= params.other_degree_max; ++k) law.add(k, 1.0 / k);
        const int span = params.hub_degree_max - params.hub_degree_min + 1;
        for (int v = 0; v < size; ++v) {
            if (v < params.hubs_per_component)
                degrees[static_cast<std::size_t>(v)] =
                    params.hub_degree_min + static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(span)));
            else
                degrees[static_cast<std::size_t>(v)] = law.draw(gen);
        }
    } else if (kind == Topology::Empirical) {
        if (params.degree_histogram.empty()) throw ConfigError("empirical topology needs a degree histogram");
        DegreeLaw law;
        for (const auto& [degree, count] : params.degree_histogram)
            if (count > 0 && degree >= 0 && degree < size) law.add(degree, static_cast<double>(count));
        if (law.values.empty()) throw ConfigError("degree histogram has no usable degrees");
        for (auto& d : degrees) d = law.draw(gen);
    }
    return degrees;
}

}  // namespace

bool pair_degree_sequence(const std::vector<int>& degrees, int offset, std::mt19937_64& gen, int attempts,
                          std::vector<Edge>& out) {
    const int size = static_cast<int>(degrees.size());
    std::vector<int> remaining;
    std::vector<std::set<int>> neighbors;
    std::vector<Edge> edges;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        remaining = degrees;
        neighbors.assign(static_cast<std::size_t>(size), {});
        edges.clear();
        bool stuck = false;
        while (!stuck) {
            // Node with the most unpaired stubs; ties go to the lowest index.
            int u = -1;
            for (int v = 0; v < size; ++v)
                if (remaining[v] > 0 && (u < 0 || remaining[v] > remaining[u])) u = v;
            if (u < 0) break;
            // Choose a partner stub uniformly among admissible stubs.
            long total = 0;
            for (int v = 0; v < size; ++v)
                if (v != u && remaining[v] > 0 && !neighbors[u].count(v)) total += remaining[v];
            if (total == 0) {
                stuck = true;
                break;
            }
            long pick = static_cast<long>(uniform_below(gen, static_cast<std::uint64_t>(total)));
            int partner = -1;
            for (int v = 0; v < size; ++v) {
                if (v == u || remaining[v] == 0 || neighbors[u].count(v)) continue;
                if (pick < remaining[v]) {
                    partner = v;
                    break;
                }
                pick -= remaining[v];
            }
            --remaining[u];
            --remaining[partner];
            neighbors[u].insert(partner);
            neighbors[partner].insert(u);
            edges.push_back({offset + std::min(u, partner), offset + std::max(u, partner)});
        }
        if (!stuck) {
            out.insert(out.end(), edges.begin(), edges.end());
            return true;
        }
    }
    return false;
}

EdgeSet gen_topology(Topology kind, int p, int n_components, const TopologyParams& params, std::uint64_t seed) {
    if (p < 2 || n_components < 1 || p % n_components != 0)
        throw ConfigError("p must be divisible into equal components of at least one node");
    const int size = p / n_components;
    if (kind == Topology::Empty) return EdgeSet(p);
    if (size < 2) throw ConfigError("components need at least two nodes");
    if (kind == Topology::PowerLaw && !(params.power_exponent > 0.0)) throw ConfigError("bad power-law exponent");

    auto gen = substream(seed, 0, StreamTag::Topology);
    std::vector<Edge> edges;
    for (int c = 0; c < n_components; ++c) {
        bool done = false;
        for (int draw = 0; draw < params.max_sequence_draws && !done; ++draw) {
            const std::vector<int> degrees = draw_degrees(kind, size, params, gen);
            const long total = std::accumulate(degrees.begin(), degrees.end(), 0L);
            if (total % 2 != 0) continue;
            done = pair_degree_sequence(degrees, c * size, gen, params.max_pairing_attempts, edges);
        }
        if (!done)
            throw UngraphicalDegreeSequence("could not realize a degree sequence for component " +
                                            std::to_string(c));
    }
    return EdgeSet(p, std::move(edges));
}

Eigen::MatrixXd partial_correlations(const Eigen::MatrixXd& concentration) {
    const Eigen::VectorXd d = concentration.diagonal().array().sqrt();
    Eigen::MatrixXd rho = -concentration.array() / (d * d.transpose()).array();
    rho.diagonal().setOnes();
    return rho;
}

GroundTruthModel gen_precision(const EdgeSet& adjacency, SignalLevel level, std::uint64_t seed, Topology topology,
                               bool cap_signal) {
    return gen_precision(adjacency, signal_target_mean(level), seed, topology, cap_signal);
}

GroundTruthModel gen_precision(const EdgeSet& adjacency, double target_mean, std::uint64_t seed, Topology topology,
                               bool cap_signal) {
    const int p = adjacency.dimension();
    if (p < 1) throw ConfigError("adjacency has no nodes");
    if (!(target_mean > 0.0 && target_mean < 1.0)) throw ConfigError("target mean |rho| must lie in (0, 1)");
    // Smallest eigenvalue the concentration matrix may have.
    constexpr double kMinEigenvalue = 1e-2;

    GroundTruthModel model;
    model.adjacency = adjacency;
    model.topology = topology;
    if (adjacency.empty()) {
        model.concentration = Eigen::MatrixXd::Identity(p, p);
        model.partial_corr = Eigen::MatrixXd::Identity(p, p);
        return model;
    }

    // Omega = I - m R has smallest eigenvalue 1 - m lambda_max(R), so the
    // admissible multipliers are m <= (1 - kMinEigenvalue) / lambda_max(R).
    auto finish = [&](Eigen::MatrixXd omega, bool calibrated) -> bool {
        const Eigen::MatrixXd rho = partial_correlations(omega);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const Edge& e : adjacency) {
            const double a = std::abs(rho(e.i, e.j));
            if (a <= 1e-10) return false;
            sum += a;
            sum_sq += a * a;
        }
        const double m = static_cast<double>(adjacency.size());
        model.concentration = std::move(omega);
        model.partial_corr = rho;
        model.signal_mean = sum / m;
        model.signal_sd = m > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0))) : 0.0;
        model.calibrated = calibrated;
        return true;
    };

    constexpr int kAttempts = 20;
    Eigen::MatrixXd best_capped;
    double best_capped_mean = 0.0;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        auto gen = substream(seed, static_cast<std::uint64_t>(attempt), StreamTag::Precision);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
        for (const Edge& e : adjacency) {
            const double mag = 0.5 + 0.5 * uniform01(gen);
            const double sign = (gen() >> 63) ? 1.0 : -1.0;
            w(e.i, e.j) = w(e.j, e.i) = sign * mag;
        }
        const Eigen::VectorXd strength = w.cwiseAbs().rowwise().sum();
        Eigen::MatrixXd normalized = Eigen::MatrixXd::Zero(p, p);
        double mean_abs = 0.0;
        for (const Edge& e : adjacency) {
            const double v = w(e.i, e.j) / std::sqrt(strength(e.i) * strength(e.j));
            normalized(e.i, e.j) = normalized(e.j, e.i) = v;
            mean_abs += std::abs(v);
        }
        mean_abs /= static_cast<double>(adjacency.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normalized, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) continue;
        const double top = es.eigenvalues().maxCoeff();
        const double admissible = top > 0.0 ? (1.0 - kMinEigenvalue) / top : std::numeric_limits<double>::infinity();
        // mean |rho| is linear in the multiplier, so the calibration is exact.
        const double multiplier = target_mean / mean_abs;
        if (multiplier <= admissible) {
            if (finish(Eigen::MatrixXd::Identity(p, p) - multiplier * normalized, true)) return model;
            continue;
        }
        if (cap_signal && admissible * mean_abs > best_capped_mean) {
            best_capped_mean = admissible * mean_abs;
            best_capped = Eigen::MatrixXd::Identity(p, p) - admissible * normalized;
        }
    }
    if (cap_signal && best_capped.size() > 0 && finish(std::move(best_capped), false)) return model;
    throw CalibrationFailure("could not reach the target mean |rho| with a positive definite matrix");
}

DataMatrix sample_mvn(const GroundTruthModel& model, int n, std::uint64_t seed) {
    const int p = model.p();
    if (n < 2) throw ConfigError("need at least two samples");
    Eigen::LLT<Eigen::MatrixXd> omega_llt(model.concentration);
    if (omega_llt.info() != Eigen::Success) throw FactorizationFailure("concentration is not positive definite");
    const Eigen::MatrixXd sigma = omega_llt.solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (sigma + sigma.transpose()));
    if (llt.info() != Eigen::Success) throw FactorizationFailure("covariance factorization failed");
    const Eigen::MatrixXd lower = llt.matrixL();

    auto gen = substream(seed, 0, StreamTag::Sample);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(n, p);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < p; ++c) z(r, c) = normal(gen);
    const Eigen::MatrixXd x = z * lower.transpose();
    return standardize(x);
}

EvalResult evaluate(const EdgeSet& selected, const EdgeSet& truth) {
    EvalResult r;
    for (const Edge& e : selected) {
        if (truth.contains(e))
            ++r.tp;
        else
            ++r.fp;
    }
    r.fn = truth.size() - r.tp;
    r.fdr = static_cast<double>(r.fp) / static_cast<double>(std::max<std::size_t>(1, r.tp + r.fp));
    r.power = truth.empty() ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(truth.size());
    return r;
}

double ideal_power(const std::vector<FrequencyTable>& tables, const EdgeSet& truth, double alpha) {
    double best = 0.0;
    if (truth.empty()) return 0.0;
    for (const auto& table : tables) {
        const int p = table.dimension();
        const int B = table.resamples();
        std::vector<std::size_t> true_hist(static_cast<std::size_t>(B) + 1, 0);
        std::vector<std::size_t> all_hist(static_cast<std::size_t>(B) + 1, 0);
        for (auto c : table.counts()) ++all_hist[c];
        for (const Edge& e : truth) {
            if (e.j >= p) throw DimensionMismatch("truth refers to variables outside the table");
            ++true_hist[table.count(e)];
        }
        std::size_t tp = 0;
        std::size_t selected = 0;
        for (int k = B; k >= 1; --k) {
            tp += true_hist[static_cast<std::size_t>(k)];
            selected += all_hist[static_cast<std::size_t>(k)];
            const double fdr = static_cast<double>(selected - tp) / static_cast<double>(std::max<std::size_t>(1, selected));
            if (fdr <= alpha) best = std::max(best, static_cast<double>(tp) / static_cast<double>(truth.size()));
        }
    }
    return best;
}

}  // namespace binco
