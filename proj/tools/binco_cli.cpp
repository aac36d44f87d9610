// binco: command-line front end for aggregated network inference with
// direct FDR control.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "binco/driver.hpp"
#include "binco/error.hpp"
#include "binco/io.hpp"
#include "binco/report.hpp"
#include "binco/stability.hpp"

namespace fs = std::filesystem;
using namespace binco;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct Options {
    std::string input;
    std::string output = "binco_out";
    std::vector<double> lambdas;
    int lambda_points = 17;
    double lambda_low = 0.2;
    double lambda_high = 1.0;
    double alpha = 0.05;
    std::string scheme = "bootstrap";
    int B = 100;
    std::uint64_t seed = 1;
    std::string procedure = "space";
    std::string combine = "or";
    double l = 1.0;
    bool two_step = false;
    bool fixed_weights = false;
    int workers = 0;
};

void add_run_options(CLI::App* cmd, Options& o, bool needs_input) {
    auto* in = cmd->add_option("-i,--input", o.input, "Data matrix (CSV/TSV, header row of names)");
    if (needs_input) in->required();
    cmd->add_option("-o,--output", o.output, "Output directory")->capture_default_str();
    cmd->add_option("--lambda", o.lambdas, "Explicit lambda grid (strictly increasing)");
    cmd->add_option("--lambda-points", o.lambda_points, "Default grid size")->capture_default_str();
    cmd->add_option("--lambda-low", o.lambda_low, "Default grid start, fraction of lambda_max")->capture_default_str();
    cmd->add_option("--lambda-high", o.lambda_high, "Default grid end, fraction of lambda_max")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Target FDR")->capture_default_str();
    cmd->add_option("--scheme", o.scheme, "bootstrap or subsample")->capture_default_str();
    cmd->add_option("-B,--resamples", o.B, "Number of resamples")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--procedure", o.procedure, "space or neighborhood")->capture_default_str();
    cmd->add_option("--combine", o.combine, "and/or rule for neighborhood selection")->capture_default_str();
    cmd->add_option("-l,--perturbation", o.l, "Randomized-lasso floor l in (0, 1]")->capture_default_str();
    cmd->add_flag("--two-step", o.two_step, "Choose l by the two-step rule");
    cmd->add_flag("--fixed-weights", o.fixed_weights, "Share one weight draw across resamples");
}

RunConfig to_config(const Options& o) {
    RunConfig c;
    c.input = o.input;
    c.output_dir = o.output;
    c.lambdas = o.lambdas;
    c.lambda_points = o.lambda_points;
    c.lambda_low = o.lambda_low;
    c.lambda_high = o.lambda_high;
    c.alpha = o.alpha;
    try {
        c.scheme = parse_scheme(o.scheme);
        c.procedure = parse_procedure(o.procedure);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (o.combine == "and")
        c.combine = CombineRule::And;
    else if (o.combine == "or")
        c.combine = CombineRule::Or;
    else
        throw ConfigError("combine must be 'and' or 'or'");
    c.B = o.B;
    c.seed = o.seed;
    c.l = o.l;
    c.two_step = o.two_step;
    c.redraw_weights = !o.fixed_weights;
    c.workers = o.workers;
    c.validate();
    return c;
}

DataMatrix load_data(const std::string& path) {
    RawTable raw = read_matrix(path);
    return standardize(raw.values, raw.column_names);
}

// Resolved settings of the subcommand that ran, loadable with --config.
void save_config(const CLI::App& app, const fs::path& dir) {
    ensure_directory(dir);
    std::string text = "workers=" + app.get_option("--workers")->as<std::string>() + "\n";
    for (const CLI::App* sub : app.get_subcommands()) {
        text += "[" + sub->get_name() + "]\n";
        // Unset options (an empty lambda list) would read back as a value.
        std::istringstream lines(sub->config_to_str(true, false));
        for (std::string line; std::getline(lines, line);)
            if (!line.ends_with("=\"\"")) text += line + "\n";
    }
    write_text(dir / "config.ini", text);
}

int run_standardize(const Options& o) {
    const DataMatrix d = load_data(o.input);
    write_matrix(o.output, d.values, d.column_names);
    return kOk;
}

int run_frequencies(const CLI::App& app, const Options& o) {
    const RunConfig c = to_config(o);
    const DataMatrix d = load_data(o.input);
    const std::vector<double> lambdas = lambda_grid(d, c);
    const FrequencyGrid grid =
        frequency_grid(d, lambdas, c.l, {c.scheme, c.B, c.seed, d.n()}, resample_options(c));
    for (std::size_t g = 0; g < grid.tables.size(); ++g) {
        char name[32];
        std::snprintf(name, sizeof name, "freq_%03zu.tsv", g + 1);
        write_frequency_table(fs::path(o.output) / name, grid.tables[g]);
    }
    save_config(app, o.output);
    std::cout << grid.tables.size() << " frequency tables written to " << o.output << "\n";
    return kOk;
}

int run_binco_cmd(const CLI::App& app, const Options& o) {
    const RunConfig c = to_config(o);
    const DataMatrix d = load_data(o.input);
    const BincoResult r = run_binco(d, c);
    write_binco_report(o.output, r, d.column_names, c.alpha);
    save_config(app, o.output);
    if (r.no_signal()) {
        std::cout << "NO_SIGNAL: no lambda gave a U-shaped, FDR-controllable frequency distribution\n";
    } else {
        const NetworkEstimate& e = *r.estimate();
        std::cout << e.edges.size() << " edges at lambda=" << e.lambda_star << " l=" << e.l_star
                  << " c*=" << e.c_star << " estimated FDR=" << e.fdr_hat << "\n";
    }
    return kOk;
}

int run_stability_cmd(const CLI::App& app, const Options& o) {
    const RunConfig c = to_config(o);
    const DataMatrix d = load_data(o.input);
    const std::vector<double> lambdas = lambda_grid(d, c);
    ResampleOptions opts = resample_options(c);
    opts.keep_selections = true;
    const FrequencyGrid grid = frequency_grid(d, lambdas, c.l, {c.scheme, c.B, c.seed, d.n()}, opts);
    const double q = estimate_q(union_sizes(grid, 0, lambdas.size() - 1));
    const auto res = stability_select(max_frequencies(grid.tables), q, c.alpha);
    write_stability_report(o.output, res, max_frequencies(grid.tables), d.column_names, c.alpha, q);
    save_config(app, o.output);
    if (res)
        std::cout << res->edges.size() << " edges at t=" << res->t_star << " (q=" << q << ")\n";
    else
        std::cout << "NO_SIGNAL: the bound exceeds alpha at every threshold\n";
    return kOk;
}

struct SimOptions {
    std::string topology = "power_law";
    std::string signal = "strong";
    std::string histogram;
    int p = 100;
    int components = 1;
    int n = 200;
    int max_degree = 20;
    int replicates = 0;
    std::vector<double> alphas{0.05, 0.1};
    bool stability = false;
    bool cap_signal = false;
};

int run_simulate(const CLI::App& app, const Options& o, const SimOptions& s) {
    StudyConfig study;
    try {
        study.topology = parse_topology(s.topology);
        study.signal = parse_signal(s.signal);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    study.p = s.p;
    study.components = s.components;
    study.n = s.n;
    study.seed = o.seed;
    study.cap_signal = s.cap_signal;
    study.topology_params.power_max_degree = s.max_degree;
    if (!s.histogram.empty()) study.topology_params.degree_histogram = read_degree_histogram(s.histogram);

    if (s.replicates <= 0) {
        const EdgeSet truth = gen_topology(study.topology, s.p, s.components, study.topology_params, o.seed);
        const GroundTruthModel model = gen_precision(truth, study.signal, o.seed, study.topology, s.cap_signal);
        const DataMatrix d = sample_mvn(model, s.n, o.seed);
        const fs::path dir = o.output;
        write_matrix(dir / "data.csv", d.values, d.column_names);
        write_ground_truth(dir / "truth_edges.tsv", dir / "concentration.txt", model);
        save_config(app, dir);
        std::cout << truth.size() << " true edges; mean |rho| " << model.signal_mean << ", sd " << model.signal_sd
                  << (model.calibrated ? "" : " (capped below the target)") << "\n";
        return kOk;
    }
    study.replicates = s.replicates;
    study.alphas = s.alphas;
    study.stability = s.stability;
    study.run = to_config(o);
    const StudyResult res = run_simulation_study(study);
    write_study_report(o.output, res);
    save_config(app, o.output);
    for (const StudySummary& row : res.summaries)
        std::cout << row.method << " alpha=" << row.alpha << " runs=" << row.runs << " fdr=" << row.fdr_mean
                  << " power=" << row.power_mean << " ideal=" << row.ideal_mean << " mpe=" << row.mpe_mean
                  << " no_signal=" << row.no_signal << "\n";
    return kOk;
}

int run_report(const CLI::App& app, const Options& o, const std::vector<std::string>& tables_in) {
    if (tables_in.empty()) throw ConfigError("report needs at least one frequency table");
    BincoResult r;
    for (const auto& path : tables_in) r.tables.push_back(read_frequency_table(path));
    std::sort(r.tables.begin(), r.tables.end(), [](const FrequencyTable& a, const FrequencyTable& b) {
        return a.config().lambda < b.config().lambda;
    });
    const int p = r.tables.front().dimension();
    for (const FrequencyTable& t : r.tables) {
        if (t.dimension() != p || t.resamples() != r.tables.front().resamples())
            throw InconsistentTables("frequency tables differ in p or B");
        r.scans.push_back(scan_table(t, p, t.config().lambda, t.config().l));
    }
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    r.selection = choose_network(r.scans, r.tables, o.alpha);
    write_binco_report(o.output, r, {}, o.alpha);
    save_config(app, o.output);
    std::cout << (r.no_signal() ? "NO_SIGNAL" : std::to_string(r.estimate()->edges.size()) + " edges") << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BINCO: bootstrap-aggregated sparse Gaussian graphical models with direct FDR control"};
    app.set_config("--config", "", "Key=value configuration file; command-line values take precedence");
    app.require_subcommand(1);

    Options o;
    SimOptions s;
    std::vector<std::string> tables_in;
    app.add_option("--workers", o.workers, "Worker threads for resample fits (0 = all cores)")
        ->envname("BINCO_WORKERS")
        ->capture_default_str();

    auto* std_cmd = app.add_subcommand("standardize", "Center and scale every column to unit SD");
    std_cmd->add_option("-i,--input", o.input, "Raw data matrix")->required();
    std_cmd->add_option("-o,--output", o.output, "Output CSV")->required();

    auto* freq_cmd = app.add_subcommand("frequencies", "Selection-frequency tables over a lambda grid");
    add_run_options(freq_cmd, o, true);

    auto* binco_cmd = app.add_subcommand("binco", "Full procedure: lambda scan, null fit, cutoff and lambda choice");
    add_run_options(binco_cmd, o, true);

    auto* stab_cmd = app.add_subcommand("stability", "Stability-selection baseline");
    add_run_options(stab_cmd, o, true);

    auto* sim_cmd = app.add_subcommand("simulate", "Simulated data, or a replicated simulation study");
    add_run_options(sim_cmd, o, false);
    sim_cmd->add_option("--topology", s.topology, "power_law, hub, empirical or empty")->capture_default_str();
    sim_cmd->add_option("--signal", s.signal, "strong, weak or very_weak")->capture_default_str();
    sim_cmd->add_option("--degree-histogram", s.histogram, "degree/count file for the empirical topology");
    sim_cmd->add_option("-p,--nodes", s.p, "Number of variables")->capture_default_str();
    sim_cmd->add_option("--components", s.components, "Disconnected components")->capture_default_str();
    sim_cmd->add_option("-n,--samples", s.n, "Sample size")->capture_default_str();
    sim_cmd->add_option("--max-degree", s.max_degree, "Largest power-law degree (0 = component size - 1)")
        ->capture_default_str();
    sim_cmd->add_option("--replicates", s.replicates, "Run a study with this many replicates")->capture_default_str();
    sim_cmd->add_option("--study-alpha", s.alphas, "FDR targets evaluated in a study")->capture_default_str();
    sim_cmd->add_flag("--with-stability", s.stability, "Also evaluate stability selection");
    sim_cmd->add_flag("--cap-signal", s.cap_signal, "Use the strongest admissible signal when the target is out of reach");

    auto* rep_cmd = app.add_subcommand("report", "BINCO report from saved frequency tables");
    rep_cmd->add_option("tables", tables_in, "Frequency table TSVs (sidecars alongside)")->required();
    rep_cmd->add_option("-o,--output", o.output, "Output directory")->capture_default_str();
    rep_cmd->add_option("--alpha", o.alpha, "Target FDR")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*std_cmd) return run_standardize(o);
        if (*freq_cmd) return run_frequencies(app, o);
        if (*binco_cmd) return run_binco_cmd(app, o);
        if (*stab_cmd) return run_stability_cmd(app, o);
        if (*sim_cmd) return run_simulate(app, o, s);
        if (*rep_cmd) return run_report(app, o, tables_in);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const ZeroVarianceColumn& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kIo;
    } catch (const NonFiniteInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
