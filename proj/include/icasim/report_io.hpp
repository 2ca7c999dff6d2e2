#pragma once

#include <string>
#include <vector>

#include "icasim/harness.hpp"

namespace icasim::report_io {

/// One CSV row; plots are rendered from these alone, so SVGs never carry
/// information that is not in the CSVs.
struct CsvRow {
    double snr_db = 0.0;
    std::string algorithm;
    std::string detector;
    double mean_ser = 0.0;
    double stderr_val = 0.0;
    int failed_runs = 0;
    double mean_iterations = 0.0;
};

/// Per-(noise, M) table extracted from a report or read back from disk.
struct CsvTable {
    std::string noise;  ///< "awgn" or "pink"
    int symbols = 0;
    std::vector<CsvRow> rows;  ///< sorted by (snr_db, algorithm, detector)
};

std::vector<CsvTable> tables_from_report(const harness::SerReport& report);

/// Write one `ser_<noise>_M<M>.csv` per table into dir; returns the paths.
std::vector<std::string> write_csv(const harness::SerReport& report, const std::string& dir);

/// Parse one CSV produced by write_csv. Derives noise and M from the
/// filename. Throws IoError / ConfigError on malformed input.
CsvTable read_csv(const std::string& path);

/// Render one SVG line chart per table: SER (log scale, floor 1e-5) against
/// SNR, one series per (algorithm, detector). Zero/NaN-floored points are
/// drawn with a distinct marker. Returns the written paths.
std::vector<std::string> render_plots(const std::vector<CsvTable>& tables,
                                      const std::string& dir);

std::vector<std::string> render_plots(const harness::SerReport& report,
                                      const std::string& dir);

/// The log-scale floor used by the plots.
inline constexpr double kSerFloor = 1e-5;

}  // namespace icasim::report_io
