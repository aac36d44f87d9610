#include "binco/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "binco/error.hpp"

namespace binco {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, const fs::path& path, std::size_t line, std::size_t col) {
    const std::string s = trim(raw);
    if (s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "na")
        return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError(path.string() + ":" + std::to_string(line) + ": column " + std::to_string(col + 1) +
                      " is not a number: '" + s + "'");
    return v;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) ensure_directory(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

fs::path sidecar(const fs::path& path) {
    fs::path s = path;
    s += ".json";
    return s;
}

}  // namespace

void ensure_directory(const fs::path& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& contents) {
    auto out = open_out(path);
    out << contents;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RawTable read_matrix(const fs::path& path) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw IoError(path.string() + " is empty");
    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    RawTable t;
    for (const auto& name : split(header, delim)) t.column_names.push_back(trim(name));
    const std::size_t p = t.column_names.size();

    std::vector<double> cells;
    std::string line;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto parts = split(line, delim);
        if (parts.size() != p)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(p) +
                          " fields, found " + std::to_string(parts.size()));
        for (std::size_t c = 0; c < p; ++c) cells.push_back(parse_cell(parts[c], path, line_no, c));
        ++rows;
    }
    if (rows == 0) throw IoError(path.string() + " has no data rows");
    t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < p; ++c)
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cells[r * p + c];
    return t;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& values, const std::vector<std::string>& column_names,
                  char delimiter) {
    if (column_names.size() != static_cast<std::size_t>(values.cols()))
        throw DimensionMismatch("one column name per column expected");
    auto out = open_out(path);
    for (std::size_t c = 0; c < column_names.size(); ++c) out << (c ? std::string(1, delimiter) : "") << column_names[c];
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            out << (c ? std::string(1, delimiter) : "") << format_double(values(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void write_frequency_table(const fs::path& path, const FrequencyTable& table) {
    auto out = open_out(path);
    out << "i\tj\tfreq\n";
    for (const auto& [e, count] : table.nonzero())
        out << e.i + 1 << '\t' << e.j + 1 << '\t' << format_double(static_cast<double>(count) / table.resamples())
            << '\n';
    if (!out) throw IoError("write failed for " + path.string());

    const FrequencyConfig& cfg = table.config();
    json meta = {{"p", table.dimension()},
                 {"B", table.resamples()},
                 {"lambda", cfg.lambda},
                 {"l", cfg.l},
                 {"scheme", to_string(cfg.scheme)},
                 {"procedure", to_string(cfg.procedure)},
                 {"seed", cfg.seed},
                 {"nonconverged_fits", table.nonconverged_fits}};
    write_text(sidecar(path), meta.dump(2) + "\n");
}

FrequencyTable read_frequency_table(const fs::path& path) {
    json meta;
    try {
        meta = json::parse(read_text(sidecar(path)));
    } catch (const json::exception& e) {
        throw IoError("bad sidecar for " + path.string() + ": " + e.what());
    }
    FrequencyConfig cfg;
    int p = 0;
    int B = 0;
    try {
        p = meta.at("p").get<int>();
        B = meta.at("B").get<int>();
        cfg.lambda = meta.at("lambda").get<double>();
        cfg.l = meta.at("l").get<double>();
        cfg.scheme = parse_scheme(meta.at("scheme").get<std::string>());
        cfg.procedure = parse_procedure(meta.at("procedure").get<std::string>());
        cfg.seed = meta.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw IoError("bad sidecar for " + path.string() + ": " + e.what());
    }
    if (p < 2 || B < 1) throw IoError("sidecar for " + path.string() + " has invalid p or B");
    FrequencyTable table(p, B, cfg);
    table.nonconverged_fits = meta.value("nonconverged_fits", 0);

    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    if (trim(line) != "i\tj\tfreq" && split(trim(line), '\t') != std::vector<std::string>{"i", "j", "freq"})
        throw IoError(path.string() + ": expected header 'i<TAB>j<TAB>freq'");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto parts = split(line, '\t');
        if (parts.size() != 3) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
        const double i = parse_cell(parts[0], path, line_no, 0);
        const double j = parse_cell(parts[1], path, line_no, 1);
        const double f = parse_cell(parts[2], path, line_no, 2);
        const double k = std::round(f * B);
        if (!(std::abs(k - f * B) < 1e-6) || k < 0 || k > B)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": frequency is not on the k/B lattice");
        if (i < 1 || j < 1 || i > p || j > p || i != std::floor(i) || j != std::floor(j))
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": index outside 1..p");
        table.set_count({static_cast<int>(i) - 1, static_cast<int>(j) - 1}, static_cast<std::uint32_t>(k));
    }
    return table;
}

void write_ground_truth(const fs::path& edges_path, const fs::path& matrix_path, const GroundTruthModel& model) {
    {
        auto out = open_out(edges_path);
        out << "i\tj\trho\n";
        for (const Edge& e : model.adjacency)
            out << e.i + 1 << '\t' << e.j + 1 << '\t' << format_double(model.partial_corr(e.i, e.j)) << '\n';
        if (!out) throw IoError("write failed for " + edges_path.string());
    }
    auto out = open_out(matrix_path);
    const Eigen::MatrixXd& m = model.concentration;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_double(m(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + matrix_path.string());
}

EdgeSet read_edge_list(const fs::path& path, int p) {
    auto in = open_in(path);
    std::string line;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a >> b)) continue;
        if (line_no == 1 && (a == "i" || a == "from")) continue;
        const double i = parse_cell(a, path, line_no, 0);
        const double j = parse_cell(b, path, line_no, 1);
        if (i < 1 || j < 1 || i > p || j > p)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": index outside 1..p");
        edges.push_back({static_cast<int>(i) - 1, static_cast<int>(j) - 1});
    }
    return EdgeSet(p, std::move(edges));
}

std::vector<std::pair<int, std::size_t>> read_degree_histogram(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::pair<int, std::size_t>> hist;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        long degree = 0;
        long count = 0;
        if (!(ls >> degree >> count) || degree < 0 || count < 0)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 'degree count'");
        hist.emplace_back(static_cast<int>(degree), static_cast<std::size_t>(count));
    }
    if (hist.empty()) throw IoError(path.string() + " has no histogram rows");
    return hist;
}

}  // namespace binco
