#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "binco/driver.hpp"

namespace binco {

// Alpha levels marked on the density plot as C1, C2 and C3.
inline const std::vector<double> kPlotAlphas{0.05, 0.1, 0.2};

// Writes edges.tsv, summary.json, density.tsv, plot.svg and lambdas.json
// into `dir`. Every file is a pure function of its inputs.
void write_binco_report(const std::filesystem::path& dir, const BincoResult& result,
                        const std::vector<std::string>& names, double alpha);

// edges.tsv and summary.json for the stability-selection baseline; freq is
// the maximum frequency over the lambda grid.
void write_stability_report(const std::filesystem::path& dir, const std::optional<StabilityResult>& result,
                            const FrequencyTable& max_table, const std::vector<std::string>& names, double alpha,
                            double q_hat);

// Lattice index of the table shown in density.tsv / plot.svg: the winner, or
// the middle of the grid when there is none.
std::size_t report_index(const BincoResult& result);

std::string density_svg(const LambdaScan& scan, const std::vector<std::pair<std::string, int>>& cutoffs);

void write_study_report(const std::filesystem::path& dir, const StudyResult& study);

}  // namespace binco
