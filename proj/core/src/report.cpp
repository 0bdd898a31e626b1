#include "adel/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adel/errors.hpp"

namespace adel {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt17(Cplx v) {
    std::string out = fmt17(v.real());
    out += v.imag() < 0.0 ? "-" : "+";
    out += fmt17(std::abs(v.imag()));
    out += "i";
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::string TextTable::render() const {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], row[i].size());

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << cells[i];
            if (i + 1 < cells.size())
                out << std::string(width[i] - cells[i].size() + 2, ' ');
        }
        out << '\n';
    };
    emit(header);
    std::size_t total = 0;
    for (std::size_t w : width) total += w + 2;
    out << std::string(total > 2 ? total - 2 : total, '-') << '\n';
    for (const auto& row : rows) emit(row);
    return out.str();
}

std::string format_matrix(const Mat& m, int precision) {
    std::ostringstream out;
    out.precision(precision);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const Cplx v = m(i, j);
            out << v.real();
            out << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
            if (j + 1 < m.cols()) out << ", ";
        }
        out << "]\n";
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << content;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error("cannot create directory '" + path + "': " + ec.message());
}

} // namespace adel
