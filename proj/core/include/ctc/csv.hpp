#pragma once

#include <string>
#include <vector>

#include "ctc/simulator.hpp"

namespace ctc {

/// Column names in emission order for the given mode.
std::vector<std::string> csv_columns(bool output_mode);

/// Writes the log with one row per sample, numbers in shortest
/// round-trip decimal form. Throws IoError on unwritable paths.
void write_csv(const SimLog& log, const std::string& path);

struct CsvData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvData read_csv(const std::string& path);

}  // namespace ctc
