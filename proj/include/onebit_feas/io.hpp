#pragma once

#include <filesystem>
#include <string>

#include "onebit_feas/types.hpp"

namespace obf::io {

// 17 significant digits, round-trip exact for doubles.
std::string format_double(double v);

enum class CsvNumbers { Real, Integer };

/// One matrix row per line, comma separated, no header.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, CsvNumbers numbers = CsvNumbers::Real);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace obf::io
