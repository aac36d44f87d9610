#include "binco/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "binco/error.hpp"
#include "binco/io.hpp"

namespace binco {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string name_of(const std::vector<std::string>& names, int i) {
    return static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)] : "V" + std::to_string(i + 1);
}

// Nonzero-frequency edges, most frequent first, then by index.
std::vector<std::pair<Edge, std::uint32_t>> ranked(const FrequencyTable& table) {
    auto rows = table.nonzero();
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return rows;
}

std::string edges_tsv(const FrequencyTable* table, std::uint32_t cutoff, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "i\tj\tname_i\tname_j\tfreq\tpasses_cstar\n";
    if (!table) return out.str();
    for (const auto& [e, count] : ranked(*table))
        out << e.i + 1 << '\t' << e.j + 1 << '\t' << name_of(names, e.i) << '\t' << name_of(names, e.j) << '\t'
            << num(static_cast<double>(count) / table->resamples()) << '\t' << (count >= cutoff ? 1 : 0) << '\n';
    return out.str();
}

json fit_json(const NullMixtureFit& fit) {
    return {{"pi_hat", fit.pi_hat},   {"a", fit.params.a},      {"b", fit.params.b},
            {"gamma", fit.params.gamma}, {"V1", fit.v1()},         {"V2", fit.v2()},
            {"objective", fit.objective}};
}

json scan_json(const LambdaScan& scan, const LambdaChoice* choice) {
    const UShapeReport& u = scan.ushape;
    json j = {{"lambda", scan.lambda},
              {"l", scan.l},
              {"u_flag", u.u_flag},
              {"v1", u.v1},
              {"v2", u.v2},
              {"s1", u.s1},
              {"s2", u.s2},
              {"s3", u.s3},
              {"s4", u.s4},
              {"smoother_df", u.smoother_df},
              {"sign_changes", u.sign_changes},
              {"domain_size", scan.density.n_omega - scan.density.counts.front()},
              {"note", scan.note}};
    j["fit"] = scan.fit ? fit_json(*scan.fit) : json(nullptr);
    if (choice && choice->candidate.cutoff_k) {
        j["c_star"] = static_cast<double>(*choice->candidate.cutoff_k) / scan.density.B;
        j["fdr_hat"] = choice->fdr_hat;
        j["set_size"] = choice->set_size;
        j["n_true_hat"] = choice->candidate.n_true_hat;
    } else {
        j["c_star"] = nullptr;
    }
    return j;
}

}  // namespace

std::size_t report_index(const BincoResult& result) {
    if (result.estimate()) return result.estimate()->index;
    if (result.scans.empty()) throw ConfigError("empty lambda grid");
    return result.scans.size() / 2;
}

std::string density_svg(const LambdaScan& scan, const std::vector<std::pair<std::string, int>>& cutoffs) {
    const EmpiricalDensity& d = scan.density;
    const int B = d.B;
    const double width = 640;
    const double height = 400;
    const double left = 60;
    const double right = 20;
    const double top = 30;
    const double bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    // Lattice point 0 dwarfs the rest and is left off, as in the usual plot.
    std::vector<double> null_curve;
    if (scan.fit)
        for (int k = 0; k <= B; ++k)
            null_curve.push_back((1.0 - scan.fit->pi_hat) * scan.fit->null_mass[static_cast<std::size_t>(k)]);
    double ymax = 0.0;
    for (int k = 1; k <= B; ++k) {
        ymax = std::max(ymax, d.mass[static_cast<std::size_t>(k)]);
        if (!null_curve.empty()) ymax = std::max(ymax, null_curve[static_cast<std::size_t>(k)]);
    }
    if (!(ymax > 0.0)) ymax = 1.0;
    auto px = [&](double x) { return left + pw * x; };
    auto py = [&](double y) { return top + ph * (1.0 - y / ymax); };
    const double bar = pw / (B + 1);

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << left << "\" y=\"18\">lambda = " << fixed(scan.lambda, 4) << ", l = " << fixed(scan.l, 2)
      << "</text>\n";
    for (int k = 1; k <= B; ++k) {
        const double m = d.mass[static_cast<std::size_t>(k)];
        if (m <= 0.0) continue;
        const double x = px(static_cast<double>(k) / B) - bar / 2;
        s << "<rect x=\"" << fixed(x, 2) << "\" y=\"" << fixed(py(m), 2) << "\" width=\"" << fixed(bar, 2)
          << "\" height=\"" << fixed(top + ph - py(m), 2) << "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
    }
    if (!null_curve.empty()) {
        s << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
        for (int k = 1; k <= B; ++k)
            s << (k > 1 ? " " : "") << fixed(px(static_cast<double>(k) / B), 2) << ","
              << fixed(py(std::min(ymax, null_curve[static_cast<std::size_t>(k)])), 2);
        s << "\"/>\n";
    }
    for (const auto& [label, k] : cutoffs) {
        const double x = px(static_cast<double>(k) / B);
        s << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << top << "\" x2=\"" << fixed(x, 2) << "\" y2=\""
          << top + ph << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
        s << "<text x=\"" << fixed(x + 3, 2) << "\" y=\"" << top + 12 << "\">" << label << "="
          << fixed(static_cast<double>(k) / B, 2) << "</text>\n";
    }
    s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
        const double x = px(t / 10.0);
        s << "<text x=\"" << fixed(x - 8, 2) << "\" y=\"" << top + ph + 18 << "\">" << fixed(t / 10.0, 1)
          << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 - 60 << "\" y=\"" << height - 10 << "\">selection frequency</text>\n";
    s << "<text x=\"10\" y=\"" << top - 6 << "\">max " << fixed(ymax, 4) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

void write_binco_report(const fs::path& dir, const BincoResult& result, const std::vector<std::string>& names,
                        double alpha) {
    ensure_directory(dir);
    const auto& est = result.estimate();
    const std::size_t shown = report_index(result);
    const LambdaScan& scan = result.scans.at(shown);

    write_text(dir / "edges.tsv", edges_tsv(est ? &result.tables.at(est->index) : nullptr,
                                            est ? static_cast<std::uint32_t>(est->cutoff_k) : 0u, names));

    json summary = {{"method", "binco"}, {"status", est ? "ok" : "no_signal"}, {"alpha", alpha}};
    if (est) {
        summary["lambda_star"] = est->lambda_star;
        summary["l_star"] = est->l_star;
        summary["c_star"] = est->c_star;
        summary["B"] = est->B;
        summary["fdr_hat"] = est->fdr_hat;
        summary["n_true_hat"] = est->n_true_hat;
        summary["n_edges"] = est->edges.size();
        summary["fit"] = fit_json(est->fit);
    } else {
        summary["n_edges"] = 0;
    }
    summary["lambdas_scanned"] = result.scans.size();
    summary["two_step_fallback"] = result.two_step_fallback;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    std::ostringstream dens;
    dens << "k\tx\tcount\tf_hat\tnull_fit\n";
    for (int k = 0; k <= scan.density.B; ++k) {
        dens << k << '\t' << num(scan.density.abscissa(k)) << '\t' << scan.density.counts[static_cast<std::size_t>(k)]
             << '\t' << num(scan.density.mass[static_cast<std::size_t>(k)]) << '\t';
        if (scan.fit)
            dens << num((1.0 - scan.fit->pi_hat) * scan.fit->null_mass[static_cast<std::size_t>(k)]);
        else
            dens << "NA";
        dens << '\n';
    }
    write_text(dir / "density.tsv", dens.str());

    std::vector<std::pair<std::string, int>> marks;
    if (scan.fit) {
        for (std::size_t a = 0; a < kPlotAlphas.size(); ++a)
            if (const auto c = optimal_cutoff(scan.density, *scan.fit, kPlotAlphas[a]))
                marks.emplace_back("C" + std::to_string(a + 1), *c);
    }
    write_text(dir / "plot.svg", density_svg(scan, marks));

    json lambdas = json::array();
    for (std::size_t g = 0; g < result.scans.size(); ++g)
        lambdas.push_back(scan_json(result.scans[g],
                                    g < result.selection.choices.size() ? &result.selection.choices[g] : nullptr));
    json diag = {{"lambdas", lambdas}};
    if (!result.first_stage.empty()) {
        json first = json::array();
        for (const LambdaScan& s : result.first_stage) first.push_back(scan_json(s, nullptr));
        diag["first_stage"] = first;
    }
    write_text(dir / "lambdas.json", diag.dump(2) + "\n");
}

void write_stability_report(const fs::path& dir, const std::optional<StabilityResult>& result,
                            const FrequencyTable& max_table, const std::vector<std::string>& names, double alpha,
                            double q_hat) {
    ensure_directory(dir);
    const std::uint32_t cutoff = result ? static_cast<std::uint32_t>(result->t_count) : 0u;
    write_text(dir / "edges.tsv", edges_tsv(result ? &max_table : nullptr, cutoff, names));
    json summary = {{"method", "stability"}, {"status", result ? "ok" : "no_signal"}, {"alpha", alpha},
                    {"q_hat", q_hat}};
    if (result) {
        summary["t_star"] = result->t_star;
        summary["bound_at_t"] = result->bound_at_t;
        summary["n_edges"] = result->edges.size();
        summary["B"] = result->B;
    } else {
        summary["n_edges"] = 0;
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void write_study_report(const fs::path& dir, const StudyResult& study) {
    ensure_directory(dir);
    std::ostringstream rows;
    rows << "replicate\tmethod\talpha\tstatus\tfdr\tpower\tideal_power\tmpe\ttp\tfp\tfn\tlambda\tl\tcutoff\tfdr_hat"
            "\tselected\terror\n";
    for (const ReplicateResult& r : study.replicates) {
        const std::string status = !r.error.empty() ? "error" : r.no_signal ? "no_signal" : "ok";
        rows << r.replicate << '\t' << r.method << '\t' << num(r.alpha) << '\t' << status << '\t' << num(r.eval.fdr)
             << '\t' << num(r.eval.power) << '\t' << num(r.ideal_power) << '\t' << num(r.mpe) << '\t' << r.eval.tp
             << '\t' << r.eval.fp << '\t' << r.eval.fn << '\t' << num(r.lambda_star) << '\t' << num(r.l_star) << '\t'
             << num(r.cutoff) << '\t' << num(r.fdr_hat) << '\t' << r.selected << '\t' << r.error << '\n';
    }
    write_text(dir / "replicates.tsv", rows.str());

    json agg = json::array();
    for (const StudySummary& s : study.summaries)
        agg.push_back({{"method", s.method},
                       {"alpha", s.alpha},
                       {"runs", s.runs},
                       {"failures", s.failures},
                       {"no_signal", s.no_signal},
                       {"fdr_mean", s.fdr_mean},
                       {"fdr_sd", s.fdr_sd},
                       {"power_mean", s.power_mean},
                       {"power_sd", s.power_sd},
                       {"ideal_power_mean", s.ideal_mean},
                       {"mpe_mean", s.mpe_mean}});
    write_text(dir / "summary.json", agg.dump(2) + "\n");
}

}  // namespace binco
