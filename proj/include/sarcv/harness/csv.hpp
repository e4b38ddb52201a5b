#pragma once

// Matrix CSV files: mandatory header row, '.' decimal separator, '\n'
// line endings.

#include <iomanip>
#include <istream>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sarcv/gridcore.hpp"
#include "sarcv/harness/config.hpp"
#include "sarcv/truncation.hpp"

namespace sarcv {

namespace detail {

inline void write_rows(std::ostream& out, const Matrix& m, const std::string& prefix)
{
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c == 0 ? "" : ",") << prefix << (c + 1);
    }
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c == 0 ? "" : ",") << m(r, c);
        }
        out << '\n';
    }
}

/// Splits one record; quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_record(const std::string& line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                fields.back() += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

} // namespace detail

/// Header x_1..x_{n+1}, one line per time index.
inline void write_sample_matrix(std::ostream& out, const SampleMatrix& samples)
{
    detail::write_rows(out, samples.values(), "x_");
}

inline void write_cov_matrix(std::ostream& out, const CovMatrix& m)
{
    detail::write_rows(out, m.entries(), "x_");
}

inline Matrix read_matrix_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("CSV input is empty");
    }
    const std::size_t width = detail::split_record(line).size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = detail::split_record(line);
        if (fields.size() != width) {
            throw ConfigError("CSV row " + std::to_string(rows.size() + 2) + " has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(width));
        }
        std::vector<double> values;
        values.reserve(width);
        for (const std::string& field : fields) {
            std::istringstream parse(field);
            parse.imbue(std::locale::classic());
            double v = 0.0;
            if (!(parse >> v) || !(parse >> std::ws).eof()) {
                throw ConfigError("CSV field '" + field + "' is not a number");
            }
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

inline SampleMatrix read_sample_matrix(std::istream& in)
{
    Matrix values = read_matrix_csv(in);
    if (values.cols() < 2 || values.rows() < 2) {
        throw ConfigError("sample CSV must have at least two rows and two columns");
    }
    const int n = static_cast<int>(values.cols()) - 1;
    return SampleMatrix(n, std::move(values));
}

/// step (one-based), one 0/1 column per increment kind.
inline void write_flags(std::ostream& out, const std::vector<std::pair<std::string, std::vector<bool>>>& columns)
{
    out << "step";
    for (const auto& [name, flags] : columns) {
        out << ',' << name;
    }
    out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().second.size();
    for (std::size_t i = 0; i < rows; ++i) {
        out << (i + 1);
        for (const auto& [name, flags] : columns) {
            out << ',' << (flags[i] ? 1 : 0);
        }
        out << '\n';
    }
}

} // namespace sarcv
