#pragma once

#include <string>
#include <vector>

#include "simfocus/experiment.hpp"

namespace simfocus {

/// Shortest round-trippable decimal form ("%.17g" trimmed to "%.12g");
/// byte-stable across runs.
std::string format_double(double v);

/// Trial rows, exact column order:
///   trial,scheme,K,L,M,nmse,iterations,sum_rate_bps_hz,min_sinr_db,max_sinr_db
std::string trial_csv(const std::vector<TrialResult>& rows);

/// Summary rows: scheme,<sweep key>,trials,nmse_mean,nmse_std,sum_rate_mean,sum_rate_std
std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& sweep_key);

/// Grid file: two header lines "# x_min x_max nx" and "# y_min y_max ny",
/// then ny rows of nx space-separated linear-scale energies.
std::string heatmap_text(const HeatmapGrid& grid);

/// Writes content to path, creating parent directories. Throws
/// std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

} // namespace simfocus
