// Deterministic output formatting: CSV cells with 17 significant digits
// (round-trip safe, byte-stable across reruns) and aligned plain-text tables.

#pragma once

#include <string>
#include <vector>

#include "adel/types.hpp"

namespace adel {

// %.17g, C locale; the one numeric serialization used in every output file.
std::string fmt17(double v);
std::string fmt17(Cplx v);  // "re+imi" / "re-imi"

std::string csv_line(const std::vector<std::string>& cells);

struct TextTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string render() const;  // column-aligned, two-space gutter
};

std::string format_matrix(const Mat& m, int precision = 6);

void write_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

} // namespace adel
