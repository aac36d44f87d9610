#include "binco/driver.hpp"

#include <algorithm>
#include <cmath>

#include "binco/error.hpp"
#include "binco/rng.hpp"

namespace binco {

void RunConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (B < 10) throw ConfigError("B must be at least 10");
    if (!(l > 0.0 && l <= 1.0)) throw InvalidPerturbationFloor(l);
    for (double li : l_grid)
        if (!(li > 0.0 && li <= 1.0)) throw InvalidPerturbationFloor(li);
    if (workers < 0) throw ConfigError("workers must be nonnegative");
    if (lambdas.empty()) {
        if (lambda_points < 1) throw ConfigError("lambda grid needs at least one point");
        if (!(lambda_low > 0.0 && lambda_low <= lambda_high))
            throw ConfigError("lambda grid fractions must satisfy 0 < low <= high");
    } else {
        for (std::size_t g = 0; g < lambdas.size(); ++g) {
            if (!(lambdas[g] > 0.0) || !std::isfinite(lambdas[g])) throw ConfigError("lambdas must be positive");
            if (g > 0 && !(lambdas[g] > lambdas[g - 1]))
                throw ConfigError("lambda grid must be strictly increasing");
        }
    }
}

ResampleOptions resample_options(const RunConfig& config) {
    ResampleOptions options;
    options.procedure = config.procedure;
    options.combine = config.combine;
    options.redraw_weights = config.redraw_weights;
    options.workers = config.workers;
    return options;
}

double lambda_max(const DataMatrix& data, Procedure procedure) {
    const Gram gram = Gram::from_data(data.values);
    return procedure == Procedure::Space ? space_lambda_max(gram) : neighborhood_lambda_max(gram);
}

std::vector<double> lambda_grid(const DataMatrix& data, const RunConfig& config) {
    if (!config.lambdas.empty()) return config.lambdas;
    const double top = lambda_max(data, config.procedure);
    if (!(top > 0.0)) throw NumericalError("lambda_max is zero; the data carry no off-diagonal signal");
    std::vector<double> grid;
    const int m = config.lambda_points;
    for (int g = 0; g < m; ++g) {
        const double frac =
            m == 1 ? config.lambda_low
                   : config.lambda_low + (config.lambda_high - config.lambda_low) * g / static_cast<double>(m - 1);
        grid.push_back(frac * top);
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

LambdaScan scan_table(const FrequencyTable& table, int p, double lambda, double l) {
    LambdaScan scan;
    scan.lambda = lambda;
    scan.l = l;
    scan.density = empirical_density(table, p);
    try {
        scan.ushape = detect_ushape(scan.density);
    } catch (const Error& e) {
        scan.ushape.B = scan.density.B;
        scan.ushape.reason = e.what();
        scan.note = e.what();
        return scan;
    }
    if (!scan.ushape.u_flag) {
        scan.note = "not U-shaped: " + scan.ushape.reason;
        return scan;
    }
    try {
        scan.fit = fit_null(scan.density, {scan.ushape.k1, scan.ushape.k2});
    } catch (const Error& e) {
        scan.note = std::string("null fit failed: ") + e.what();
    }
    return scan;
}

Selection choose_network(const std::vector<LambdaScan>& scans, const std::vector<FrequencyTable>& tables,
                         double alpha) {
    if (scans.size() != tables.size()) throw DimensionMismatch("one scan per table expected");
    Selection out;
    std::vector<LambdaCandidate> candidates;
    for (const LambdaScan& scan : scans) {
        LambdaChoice choice;
        choice.candidate.lambda = scan.lambda;
        choice.candidate.l = scan.l;
        choice.candidate.u_flag = scan.ushape.u_flag;
        if (scan.fit) {
            choice.candidate.cutoff_k = optimal_cutoff(scan.density, *scan.fit, alpha);
            if (choice.candidate.cutoff_k) {
                const int c = *choice.candidate.cutoff_k;
                choice.fdr_hat = estimate_fdr(scan.density, *scan.fit, c);
                choice.set_size = scan.density.tail_count(c);
                choice.candidate.n_true_hat = estimate_true_edges(choice.set_size, choice.fdr_hat);
            }
        }
        candidates.push_back(choice.candidate);
        out.choices.push_back(choice);
    }
    const auto winner = select_lambda(candidates);
    if (!winner) return out;

    const LambdaScan& scan = scans[*winner];
    const LambdaChoice& choice = out.choices[*winner];
    NetworkEstimate est;
    est.index = *winner;
    est.cutoff_k = *choice.candidate.cutoff_k;
    est.B = scan.density.B;
    est.c_star = static_cast<double>(est.cutoff_k) / est.B;
    est.lambda_star = scan.lambda;
    est.l_star = scan.l;
    est.fdr_hat = choice.fdr_hat;
    est.n_true_hat = choice.candidate.n_true_hat;
    est.fit = *scan.fit;
    est.edges = tables[*winner].at_least(static_cast<std::uint32_t>(est.cutoff_k));
    if (!scan.ushape.u_flag || est.fdr_hat > alpha || est.edges.size() != choice.set_size)
        throw NumericalError("selected lambda violates the selection invariants");
    out.estimate = std::move(est);
    return out;
}

namespace {

ResamplePlan make_plan(const DataMatrix& data, const RunConfig& config) {
    return {config.scheme, config.B, config.seed, data.n()};
}

BincoResult scan_grid(const DataMatrix& data, const std::vector<double>& lambdas, double l, const RunConfig& config) {
    BincoResult result;
    FrequencyGrid grid = frequency_grid(data, lambdas, l, make_plan(data, config), resample_options(config));
    result.tables = std::move(grid.tables);
    for (std::size_t g = 0; g < lambdas.size(); ++g)
        result.scans.push_back(scan_table(result.tables[g], data.p(), lambdas[g], l));
    result.selection = choose_network(result.scans, result.tables, config.alpha);
    return result;
}

}  // namespace

BincoResult run_binco(const DataMatrix& data, const RunConfig& config) {
    config.validate();
    if (config.two_step) return two_step_l(data, config);
    return scan_grid(data, lambda_grid(data, config), config.l, config);
}

double matched_lambda(double lambda_bar, double l) {
    if (!(l > 0.0 && l <= 1.0)) throw InvalidPerturbationFloor(l);
    return 2.0 * lambda_bar / (1.0 + 1.0 / l);
}

BincoResult two_step_l(const DataMatrix& data, const RunConfig& config) {
    config.validate();
    BincoResult first = scan_grid(data, lambda_grid(data, config), 1.0, config);
    std::vector<double> shaped;
    for (const LambdaScan& scan : first.scans)
        if (scan.ushape.u_flag) shaped.push_back(scan.lambda);

    std::vector<double> ls = config.l_grid;
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    if (!shaped.empty()) {
        for (double l : ls) {
            if (l >= 1.0) break;
            std::vector<double> lambdas;
            for (double lambda_bar : shaped) lambdas.push_back(matched_lambda(lambda_bar, l));
            BincoResult stage = scan_grid(data, lambdas, l, config);
            if (stage.selection.estimate) {
                stage.first_stage = std::move(first.scans);
                return stage;
            }
        }
    }
    first.first_stage = first.scans;
    first.two_step_fallback = true;
    return first;
}

std::vector<StudySummary> summarize(const std::vector<ReplicateResult>& rows) {
    std::vector<StudySummary> out;
    for (const ReplicateResult& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const StudySummary& s) {
            return s.method == row.method && s.alpha == row.alpha;
        });
        if (it == out.end()) {
            out.push_back({});
            it = out.end() - 1;
            it->method = row.method;
            it->alpha = row.alpha;
        }
        if (!row.error.empty()) {
            ++it->failures;
            continue;
        }
        ++it->runs;
        if (row.no_signal) ++it->no_signal;
    }
    for (StudySummary& s : out) {
        std::vector<const ReplicateResult*> ok;
        for (const ReplicateResult& row : rows)
            if (row.method == s.method && row.alpha == s.alpha && row.error.empty()) ok.push_back(&row);
        if (ok.empty()) continue;
        const double m = static_cast<double>(ok.size());
        for (const auto* r : ok) {
            s.fdr_mean += r->eval.fdr / m;
            s.power_mean += r->eval.power / m;
            s.ideal_mean += r->ideal_power / m;
            s.mpe_mean += r->mpe / m;
        }
        if (ok.size() > 1) {
            for (const auto* r : ok) {
                s.fdr_sd += (r->eval.fdr - s.fdr_mean) * (r->eval.fdr - s.fdr_mean);
                s.power_sd += (r->eval.power - s.power_mean) * (r->eval.power - s.power_mean);
            }
            s.fdr_sd = std::sqrt(s.fdr_sd / (m - 1.0));
            s.power_sd = std::sqrt(s.power_sd / (m - 1.0));
        }
    }
    return out;
}

namespace {

void fill_ideal(ReplicateResult& row, const std::vector<FrequencyTable>& tables, const EdgeSet& truth) {
    row.ideal_power = ideal_power(tables, truth, row.alpha);
    row.mpe = row.ideal_power > 0.0 ? row.eval.power / row.ideal_power : 0.0;
}

}  // namespace

StudyResult run_simulation_study(const StudyConfig& config) {
    if (config.replicates < 1) throw ConfigError("a study needs at least one replicate");
    if (config.alphas.empty()) throw ConfigError("a study needs at least one alpha");
    StudyResult result;
    for (int r = 0; r < config.replicates; ++r) {
        auto gen = substream(config.seed, static_cast<std::uint64_t>(r), StreamTag::Replicate);
        const std::uint64_t topology_seed = gen();
        const std::uint64_t precision_seed = gen();
        const std::uint64_t sample_seed = gen();
        const std::uint64_t resample_seed = gen();

        auto fail_all = [&](const std::string& what) {
            for (double alpha : config.alphas) {
                ReplicateResult row;
                row.replicate = r;
                row.method = "binco";
                row.alpha = alpha;
                row.error = what;
                result.replicates.push_back(row);
                if (config.stability) {
                    row.method = "stability";
                    result.replicates.push_back(row);
                }
            }
        };
        try {
            const EdgeSet truth =
                gen_topology(config.topology, config.p, config.components, config.topology_params, topology_seed);
            const GroundTruthModel model = gen_precision(truth, config.signal, precision_seed, config.topology, config.cap_signal);
            const DataMatrix data = sample_mvn(model, config.n, sample_seed);

            RunConfig run = config.run;
            run.seed = resample_seed;
            run.validate();
            const std::vector<double> lambdas = lambda_grid(data, run);

            // One grid serves every alpha unless l is chosen per alpha.
            std::optional<BincoResult> shared;
            FrequencyGrid stab_grid;
            if (!run.two_step || config.stability) {
                ResampleOptions options = resample_options(run);
                options.keep_selections = config.stability;
                stab_grid = frequency_grid(data, lambdas, run.l, make_plan(data, run), options);
                if (!run.two_step) {
                    shared.emplace();
                    shared->tables = stab_grid.tables;
                    for (std::size_t g = 0; g < lambdas.size(); ++g)
                        shared->scans.push_back(scan_table(shared->tables[g], data.p(), lambdas[g], run.l));
                }
            }
            for (double alpha : config.alphas) {
                ReplicateResult row;
                row.replicate = r;
                row.method = "binco";
                row.alpha = alpha;
                std::optional<BincoResult> own;
                const BincoResult* res = nullptr;
                if (shared) {
                    shared->selection = choose_network(shared->scans, shared->tables, alpha);
                    res = &*shared;
                } else {
                    run.alpha = alpha;
                    own = two_step_l(data, run);
                    res = &*own;
                }
                if (res->estimate()) {
                    const NetworkEstimate& est = *res->estimate();
                    row.eval = evaluate(est.edges, truth);
                    row.lambda_star = est.lambda_star;
                    row.l_star = est.l_star;
                    row.cutoff = est.c_star;
                    row.fdr_hat = est.fdr_hat;
                    row.selected = est.edges.size();
                } else {
                    row.no_signal = true;
                    row.eval = evaluate(EdgeSet(data.p()), truth);
                }
                fill_ideal(row, res->tables, truth);
                result.replicates.push_back(row);

                if (config.stability) {
                    ReplicateResult srow;
                    srow.replicate = r;
                    srow.method = "stability";
                    srow.alpha = alpha;
                    srow.l_star = run.l;
                    const auto stab = stability_select(stab_grid, 0, lambdas.size() - 1, alpha);
                    if (stab) {
                        srow.eval = evaluate(stab->edges, truth);
                        srow.cutoff = stab->t_star;
                        srow.fdr_hat = stab->bound_at_t;
                        srow.selected = stab->edges.size();
                    } else {
                        srow.no_signal = true;
                        srow.eval = evaluate(EdgeSet(data.p()), truth);
                    }
                    fill_ideal(srow, stab_grid.tables, truth);
                    result.replicates.push_back(srow);
                }
            }
        } catch (const Error& e) {
            fail_all(e.what());
        }
    }
    result.summaries = summarize(result.replicates);
    return result;
}

}  // namespace binco
