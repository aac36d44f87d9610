// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by number (default: all). Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "binco/driver.hpp"
#include "binco/freq_model.hpp"
#include "binco/ggm.hpp"
#include "binco/io.hpp"
#include "binco/report.hpp"
#include "binco/simgen.hpp"
#include "binco/stability.hpp"
#include "oracles.hpp"

using namespace binco;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void info(const std::string& s) { std::printf("  %s\n", s.c_str()); }

// Desk-scale design shared by criteria 1, 2 and 9.
StudyConfig desk_study(std::uint64_t seed) {
    StudyConfig s;
    s.topology = Topology::PowerLaw;
    s.p = 100;
    s.components = 1;
    s.n = 200;
    s.signal = SignalLevel::Strong;
    s.replicates = 10;
    s.seed = seed;
    s.alphas = {0.05, 0.1};
    s.run.B = 50;
    return s;
}

// The strong-signal study is shared by criteria 1 and 2.
const StudyResult& desk_result() {
    static const StudyResult r = run_simulation_study(desk_study(2024));
    return r;
}

std::vector<const ReplicateResult*> rows_for(const StudyResult& r, const std::string& method, double alpha) {
    std::vector<const ReplicateResult*> out;
    for (const auto& row : r.replicates)
        if (row.method == method && row.alpha == alpha) out.push_back(&row);
    return out;
}

Outcome fdr_control() {
    const StudyResult& r = desk_result();
    bool pass = true;
    std::string detail;
    for (double alpha : {0.05, 0.1}) {
        const auto rows = rows_for(r, "binco", alpha);
        double sum = 0.0;
        int within = 0;
        int close = 0;
        int usable = 0;
        for (const auto* row : rows) {
            info(fmt("alpha=%.2f rep=%d selected=%zu realized_fdr=%.4f estimated_fdr=%.4f power=%.4f%s%s", alpha,
                     row->replicate, row->selected, row->eval.fdr, row->fdr_hat, row->eval.power,
                     row->no_signal ? " NO_SIGNAL" : "", row->error.empty() ? "" : (" error: " + row->error).c_str()));
            if (!row->error.empty()) continue;
            ++usable;
            sum += row->eval.fdr;
            if (row->eval.fdr <= 2.0 * alpha) ++within;
            if (!row->no_signal && std::abs(row->fdr_hat - row->eval.fdr) <= 0.05) ++close;
        }
        const double mean = usable ? sum / usable : 1.0;
        const bool ok = usable == static_cast<int>(rows.size()) && mean <= 2.0 * alpha && mean >= 0.0 && within >= 8;
        pass = pass && ok;
        detail += fmt("alpha=%.2f mean_fdr=%.4f (<= %.2f) within=%d/10; ", alpha, mean, 2.0 * alpha, within);
        info(fmt("INFO alpha=%.2f: |estimated - realized FDR| <= 0.05 in %d/%d replicates", alpha, close, usable));
    }
    return {pass, detail};
}

Outcome efficiency() {
    const auto rows = rows_for(desk_result(), "binco", 0.05);
    double power = 0.0;
    double ideal = 0.0;
    for (const auto* row : rows) {
        power += row->eval.power;
        ideal += row->ideal_power;
        info(fmt("rep=%d power=%.4f ideal=%.4f mpe=%.3f", row->replicate, row->eval.power, row->ideal_power, row->mpe));
    }
    power /= static_cast<double>(rows.size());
    ideal /= static_cast<double>(rows.size());
    return {power >= 0.8 * ideal, fmt("mean power %.4f vs 0.8 x ideal %.4f (ratio %.3f)", power, 0.8 * ideal,
                                      ideal > 0 ? power / ideal : 0.0)};
}

Outcome empty_gate() {
    StudyConfig s = desk_study(77);
    s.topology = Topology::Empty;
    s.alphas = {0.05};
    const StudyResult r = run_simulation_study(s);
    int none = 0;
    for (const auto* row : rows_for(r, "binco", 0.05)) {
        info(fmt("rep=%d %s selected=%zu", row->replicate, row->no_signal ? "NO_SIGNAL" : "signal", row->selected));
        if (row->no_signal && row->error.empty()) ++none;
    }
    return {none >= 9, fmt("NO_SIGNAL in %d/10 replicates", none)};
}

Outcome stability_comparison() {
    StudyConfig s = desk_study(555);
    s.replicates = 5;
    s.alphas = {0.05};
    s.stability = true;
    s.run.l = 0.5;
    const StudyResult r = run_simulation_study(s);
    const auto binco_rows = rows_for(r, "binco", 0.05);
    const auto stab_rows = rows_for(r, "stability", 0.05);
    int good = 0;
    for (std::size_t i = 0; i < binco_rows.size(); ++i) {
        const auto& b = *binco_rows[i];
        const auto& st = *stab_rows[i];
        const bool ok = b.error.empty() && st.error.empty() && st.eval.fdr <= 0.05 && st.eval.power < b.eval.power;
        info(fmt("rep=%d stability fdr=%.4f power=%.4f | binco fdr=%.4f power=%.4f%s", b.replicate, st.eval.fdr,
                 st.eval.power, b.eval.fdr, b.eval.power, ok ? "" : "  <- not satisfied"));
        if (ok) ++good;
    }
    return {good >= 4, fmt("stability FDR <= 0.05 and power below BINCO in %d/5 replicates", good)};
}

Outcome null_oracle() {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> shape(0.2, 12.0);
    std::uniform_real_distribution<double> power(0.3, 3.0);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const double a = shape(gen);
        const double b = shape(gen);
        const int B = 5 + static_cast<int>(gen() % 96);
        const auto h = powered_beta_binomial_pmf(B, {a, b, 1.0});
        for (int k = 0; k <= B; ++k)
            worst = std::max(worst, std::abs(h[static_cast<std::size_t>(k)] - beta_binomial_pmf(k, B, a, b)));
    }
    const bool closed_ok = worst < 1e-10;

    // With ~150 lattice points a handful of 3-SE excursions are expected by
    // chance, so a flagged point is re-simulated independently with ten
    // times the draws: a real pmf error grows to ~sqrt(10) times its z-score
    // there, a chance excursion does not recur.
    const int draws = 1000000;
    int flagged = 0;
    int confirmed = 0;
    int checked = 0;
    double worst_z = 0.0;
    for (int c = 0; c < 5; ++c) {
        const PoweredBetaParams p{shape(gen), shape(gen), power(gen)};
        const int B = 10 + static_cast<int>(gen() % 41);
        const auto mc = test::monte_carlo_pmf(B, p, draws, gen());
        const std::uint64_t recheck_seed = gen();
        const auto h = powered_beta_binomial_pmf(B, p);
        std::vector<double> big;
        for (int k = 0; k <= B; ++k) {
            const double hk = h[static_cast<std::size_t>(k)];
            const double se = std::sqrt(hk * (1.0 - hk) / draws);
            const double diff = std::abs(mc[static_cast<std::size_t>(k)] - hk);
            if (se > 0) worst_z = std::max(worst_z, diff / se);
            ++checked;
            if (diff <= 3.0 * se + 1e-12) continue;
            ++flagged;
            if (big.empty()) big = test::monte_carlo_pmf(B, p, 10 * draws, recheck_seed);
            const double se10 = std::sqrt(hk * (1.0 - hk) / (10.0 * draws));
            const double diff10 = std::abs(big[static_cast<std::size_t>(k)] - hk);
            info(fmt("case %d k=%d: z=%.2f at 1e6 draws, z=%.2f at 1e7 draws", c, k, diff / se, diff10 / se10));
            if (diff10 > 3.0 * se10 + 1e-12) ++confirmed;
        }
        info(fmt("case %d: a=%.3f b=%.3f gamma=%.3f B=%d", c, p.a, p.b, p.gamma, B));
    }
    return {closed_ok && confirmed == 0,
            fmt("closed form max error %.2e (< 1e-10); Monte Carlo %d/%d lattice points outside 3 SE (max z %.2f), "
                "%d confirmed at 1e7 draws",
                worst, flagged, checked, worst_z, confirmed)};
}

Outcome solver_oracle() {
    std::mt19937_64 gen(47);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const int p = 3 + static_cast<int>(gen() % 18);
        const int n = 20 + static_cast<int>(gen() % 81);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd x(n, p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c) x(r, c) = normal(gen);
        const double mix = unit(gen);
        for (int c = 1; c < p; ++c) x.col(c) += mix * x.col(c - 1);
        const DataMatrix d = standardize(x);
        const Gram g = Gram::from_data(d.values);
        const WeightMatrix w = sample_weights(p, inst % 2 ? 0.5 : 1.0, gen());
        SpaceOptions opt;
        opt.tol = 1e-12;
        opt.max_sweeps = 100000;
        const double lambda = frac(gen) * space_lambda_max(g, &w);
        const SpaceEstimate est = fit_space(g, lambda, &w, opt);
        worst = std::max(worst, test::kkt_residual_by_differences(d.values, est.rho, est.sigma_diag, lambda, &w.w));
    }

    int mismatches = 0;
    int ambiguous = 0;
    NeighborhoodOptions nopt;
    nopt.tol = 1e-13;
    nopt.max_sweeps = 100000;
    for (int inst = 0; inst < 50; ++inst) {
        const int n = 20 + static_cast<int>(gen() % 81);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd x(n, 3);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < 3; ++c) x(r, c) = normal(gen);
        x.col(1) += unit(gen) * x.col(0);
        x.col(2) += unit(gen) * x.col(1);
        const DataMatrix d = standardize(x);
        const Gram g = Gram::from_data(d.values);
        const WeightMatrix w = sample_weights(3, inst % 2 ? 0.5 : 1.0, gen());
        const double lambda = frac(gen) * neighborhood_lambda_max(g, &w);
        Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(3, 3);
        const Eigen::Matrix3d s = g.s;
        for (int i = 0; i < 3; ++i) {
            const int j0 = (i + 1) % 3;
            const int j1 = (i + 2) % 3;
            int hits = 0;
            const auto beta = test::exhaustive_lasso(s, i, {lambda / w.w(i, j0), lambda / w.w(i, j1)}, hits);
            if (hits != 1) ++ambiguous;
            oracle(i, j0) = beta[0];
            oracle(i, j1) = beta[1];
        }
        for (auto rule : {CombineRule::And, CombineRule::Or})
            if (fit_neighborhood(g, lambda, &w, rule, nopt) != combine_neighborhoods(oracle, rule)) ++mismatches;
    }
    return {worst < 1e-6 && mismatches == 0 && ambiguous == 0,
            fmt("space max KKT residual %.2e over 50 instances; neighborhood support mismatches %d/100, "
                "ambiguous oracle solves %d",
                worst, mismatches, ambiguous)};
}

Outcome mixture_consistency() {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ua(0.2, 0.9);
    std::uniform_real_distribution<double> ub(2.0, 12.0);
    std::uniform_real_distribution<double> ug(0.6, 2.0);
    const int B = 50;
    const FitRange range{5, 35};    // (0.1, 0.7]
    int failures = 0;
    double worst_pi = 0.0;
    double worst_tail = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
        const PoweredBetaParams truth{ua(gen), ub(gen), ug(gen)};
        const auto h = powered_beta_binomial_pmf(B, truth);
        for (double pi : {0.0, 0.02, 0.05}) {
            // True edges sit at frequency one.
            EmpiricalDensity den;
            den.B = B;
            den.n_omega = 1000000000;
            for (int k = 0; k <= B; ++k) {
                const double m = (1.0 - pi) * h[static_cast<std::size_t>(k)] + (k == B ? pi : 0.0);
                den.mass.push_back(m);
                den.counts.push_back(static_cast<std::size_t>(std::llround(m * 1e9)));
            }
            const NullMixtureFit fit = fit_null(den, range);
            double tail_true = 0.0;
            double tail_fit = 0.0;
            for (int k = 45; k <= B; ++k) {
                tail_true += (1.0 - pi) * h[static_cast<std::size_t>(k)];
                tail_fit += (1.0 - fit.pi_hat) * fit.null_mass[static_cast<std::size_t>(k)];
            }
            const double dpi = std::abs(fit.pi_hat - pi);
            const double rel = std::abs(tail_fit / tail_true - 1.0);
            worst_pi = std::max(worst_pi, dpi);
            worst_tail = std::max(worst_tail, rel);
            const bool ok = dpi <= 0.02 && rel <= 0.3;
            if (!ok) ++failures;
            info(fmt("draw=%d (a=%.3f b=%.3f gamma=%.3f) pi=%.2f pi_hat=%.4f tail rel.err=%.4f%s", draw, truth.a,
                     truth.b, truth.gamma, pi, fit.pi_hat, rel, ok ? "" : "  <- outside tolerance"));
        }
    }
    return {failures == 0,
            fmt("%d/30 fits outside tolerance; max |pi_hat - pi| %.4f, max tail rel.err %.4f", failures, worst_pi,
                worst_tail)};
}

Outcome bound_arithmetic() {
    struct Case {
        double q, t;
        std::size_t n, set;
        double bound, proxy;
    };
    // Hand-computed: q^2 / ((2t - 1) N), and that divided by |S|.
    const std::vector<Case> cases{
        {50.0, 0.9, 124750, 10, 0.025050100200400802, 0.0025050100200400802},
        {10.0, 0.6, 4950, 4, 0.10101010101010101, 0.025252525252525252},
        {3.0, 0.75, 45, 2, 0.4, 0.2},
    };
    double worst = 0.0;
    for (const Case& c : cases) {
        worst = std::max(worst, std::abs(expected_false_bound(c.q, c.t, c.n) - c.bound));
        worst = std::max(worst, std::abs(fdr_proxy_bound(c.q, c.t, c.n, c.set) - c.proxy));
    }
    return {worst < 1e-12, fmt("max deviation %.2e over %zu cases", worst, cases.size())};
}

Outcome determinism() {
    // First replicate of the desk design, rebuilt from fixed seeds.
    const EdgeSet truth = gen_topology(Topology::PowerLaw, 100, 1, {}, 901);
    const GroundTruthModel model = gen_precision(truth, SignalLevel::Strong, 902, Topology::PowerLaw);
    const DataMatrix data = sample_mvn(model, 200, 903);
    const fs::path dir = fs::temp_directory_path() / "binco_acceptance_determinism";
    fs::remove_all(dir);
    RunConfig c;
    c.B = 50;
    c.seed = 904;
    std::vector<std::string> files;
    for (int workers : {1, 4}) {
        c.workers = workers;
        const BincoResult r = run_binco(data, c);
        write_binco_report(dir / std::to_string(workers), r, data.column_names, c.alpha);
        files.push_back(read_text(dir / std::to_string(workers) / "edges.tsv") +
                        read_text(dir / std::to_string(workers) / "summary.json"));
        if (workers == 1)
            info(r.no_signal() ? "NO_SIGNAL" : fmt("%zu edges selected", r.estimate()->edges.size()));
    }
    return {files[0] == files[1], files[0] == files[1] ? "edges.tsv and summary.json identical for workers 1 and 4"
                                                       : "reports differ between workers 1 and 4"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"FDR control at desk scale", fdr_control},
        {"BINCO power >= 0.8 x ideal power", efficiency},
        {"empty network gives NO_SIGNAL", empty_gate},
        {"stability selection is conservative and less powerful", stability_comparison},
        {"powered beta-binomial oracles", null_oracle},
        {"solver oracles", solver_oracle},
        {"mixture self-consistency", mixture_consistency},
        {"false-selection bound arithmetic", bound_arithmetic},
        {"determinism across worker counts", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!wanted.empty() && !wanted.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
