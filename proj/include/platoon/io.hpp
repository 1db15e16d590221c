#pragma once

#include <Eigen/Dense>
#include <string>

#include "json.hpp"
#include "platoon/metrics.hpp"
#include "platoon/simulator.hpp"

namespace platoon {

/// Writes one signal as CSV: a time column in seconds with 6 decimals, then
/// one full-precision column per vehicle ("veh0" is the virtual leader).
void write_signal_csv(const std::string& path, double Ts, const Eigen::MatrixXd& signal);

/// Reads a CSV produced by write_signal_csv, dropping the time column.
Eigen::MatrixXd read_signal_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

nlohmann::json report_to_json(const StabilityReport& report);
nlohmann::json ensemble_to_json(const EnsembleSummary& summary);

/// Writes all SimRun signals plus meta.json into a directory (created if
/// missing). Returns the list of files written.
std::vector<std::string> write_run_directory(const std::string& dir, const SimRun& run,
                                             const StabilityReport& report,
                                             const nlohmann::json& meta);

}  // namespace platoon
