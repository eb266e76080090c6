#include "pfa/io.hpp"

#include "pfa/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace pfa::io {

namespace {

std::vector<std::vector<double>> read_rows(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header && line_no == 1) continue;
        if (line.empty()) continue;

        std::vector<double> row;
        std::size_t start = 0;
        long col = 0;
        while (true) {
            ++col;
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            const char* first = line.data() + start;
            const char* last = line.data() + end;
            while (first < last && (*first == ' ' || *first == '\t')) ++first;
            while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;

            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) {
                throw NonNumericCellError(path + ": non-numeric cell at row " +
                                          std::to_string(line_no) + ", column " +
                                          std::to_string(col));
            }
            row.push_back(value);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw RaggedRowsError(path + ": row " + std::to_string(line_no) + " has " +
                                  std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw IoError(path + ": no data rows");
    }
    return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path, bool header) {
    const auto rows = read_rows(path, header);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Vector read_vector_csv(const std::string& path, bool header) {
    const auto rows = read_rows(path, header);
    if (rows.front().size() != 1) {
        throw RaggedRowsError(path + ": expected a single column, found " +
                              std::to_string(rows.front().size()));
    }
    Vector v(static_cast<Index>(rows.size()));
    for (Index i = 0; i < v.size(); ++i) {
        v[i] = rows[static_cast<std::size_t>(i)].front();
    }
    return v;
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write to " + tmp + " failed");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ostringstream out;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    write_text_atomic(path, out.str());
}

void write_vector_csv(const std::string& path, const Vector& v) {
    std::ostringstream out;
    for (Index i = 0; i < v.size(); ++i) {
        out << format_double(v[i]) << '\n';
    }
    write_text_atomic(path, out.str());
}

}  // namespace pfa::io
