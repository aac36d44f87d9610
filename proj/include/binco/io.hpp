#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "binco/resample.hpp"
#include "binco/simgen.hpp"

namespace binco {

struct RawTable {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;
};

// Delimited text with a header row of variable names and one sample per row.
// The delimiter is a tab if the header contains one, else a comma. "NA",
// "NaN" and empty cells read as NaN so that standardize can report them.
RawTable read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                  const std::vector<std::string>& column_names, char delimiter = ',');

// `i  j  freq` rows (1-based, nonzero frequencies only) plus a JSON sidecar
// at <path>.json with p, B, lambda, l, scheme, procedure and seed.
void write_frequency_table(const std::filesystem::path& path, const FrequencyTable& table);
FrequencyTable read_frequency_table(const std::filesystem::path& path);

// Edge list `i  j  rho` (1-based) and the dense concentration matrix.
void write_ground_truth(const std::filesystem::path& edges_path, const std::filesystem::path& matrix_path,
                        const GroundTruthModel& model);
EdgeSet read_edge_list(const std::filesystem::path& path, int p);

// Two whitespace-separated columns: degree, count.
std::vector<std::pair<int, std::size_t>> read_degree_histogram(const std::filesystem::path& path);

// Opens for writing, creating parent directories; throws IoError.
void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

}  // namespace binco
