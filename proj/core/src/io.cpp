#include "sgcm/io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sgcm {

namespace {

bool is_blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

bool parse_double(const std::string& tok, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(tok, &used);
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        return used == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<double> parse_row(const std::string& line, const std::string& path, long row) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double v = 0.0;
        if (!parse_double(tok, v)) {
            throw FileError(path + ": row " + std::to_string(row) + ": cannot parse '" + tok +
                            "' as a number");
        }
        vals.push_back(v);
    }
    if (vals.empty()) {
        throw FileError(path + ": row " + std::to_string(row) + ": empty row");
    }
    return vals;
}

std::vector<std::vector<double>> read_rows(const std::string& path, bool allow_header) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank_or_comment(line)) continue;
        if (first_data && allow_header) {
            // A non-numeric first row is treated as a column header.
            double probe = 0.0;
            std::stringstream ss(line);
            std::string tok;
            std::getline(ss, tok, ',');
            if (!parse_double(tok, probe)) {
                first_data = false;
                continue;
            }
        }
        first_data = false;
        rows.push_back(parse_row(line, path, lineno));
    }
    if (rows.empty()) throw FileError(path + ": no data rows");
    return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
    const auto rows = read_rows(path, false);
    const std::size_t cols = rows.front().size();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw FileError(path + ": row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " columns, expected " +
                            std::to_string(cols));
        }
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

std::vector<Vector> read_csv_rows(const std::string& path) {
    const auto rows = read_rows(path, false);
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        Vector v(static_cast<Eigen::Index>(r.size()));
        for (std::size_t j = 0; j < r.size(); ++j) v[static_cast<Eigen::Index>(j)] = r[j];
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<DensityGrid> read_density_csv(const std::string& path) {
    const auto rows = read_csv_rows(path);
    if (rows.size() < 2) {
        throw FileError(path + ": need a grid row plus at least one density row");
    }
    const Vector& grid = rows.front();
    std::vector<DensityGrid> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != grid.size()) {
            throw FileError(path + ": density row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " values, expected " +
                            std::to_string(grid.size()));
        }
        out.emplace_back(grid, rows[i]);
    }
    return out;
}

std::vector<MetricCurve> read_curve_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw FileError(dir + " is not a directory");

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path().string());
        }
    }
    if (files.empty()) throw FileError(dir + ": no .csv files found");
    std::sort(files.begin(), files.end());

    std::vector<MetricCurve> out;
    for (const auto& path : files) {
        const auto rows = read_rows(path, true);
        const std::size_t cols = rows.front().size();
        if (cols < 2) throw FileError(path + ": curve rows need a time column plus values");
        Vector times(static_cast<Eigen::Index>(rows.size()));
        Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) {
                throw FileError(path + ": row " + std::to_string(i + 1) +
                                " has inconsistent column count");
            }
            times[static_cast<Eigen::Index>(i)] = rows[i][0];
            for (std::size_t j = 1; j < cols; ++j) {
                values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) =
                    rows[i][j];
            }
        }
        out.emplace_back(std::move(times), std::move(values));
        if (out.size() > 1 &&
            (out.back().times.size() != out.front().times.size() ||
             (out.back().times.array() != out.front().times.array()).any())) {
            throw GridError(path + ": time grid differs from " + files.front());
        }
    }
    return out;
}

}  // namespace sgcm
