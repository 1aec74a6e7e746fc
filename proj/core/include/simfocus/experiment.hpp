#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simfocus/allocation.hpp"
#include "simfocus/config.hpp"
#include "simfocus/propagation.hpp"

namespace simfocus {

/// Outcome of one scheme on one trial. Failed trials keep their slot with
/// an error message instead of being dropped.
struct TrialResult {
    int trial = 0;
    Scheme scheme = Scheme::proposed;
    int users = 0;   ///< K
    int layers = 0;  ///< L
    int atoms = 0;   ///< M
    double nmse = 0.0;
    int iterations = 0;
    double sum_rate_bps_hz = 0.0;
    double min_sinr_db = 0.0;
    double max_sinr_db = 0.0;
    Eigen::VectorXd sinrs;   ///< linear, per user
    Eigen::VectorXd powers;  ///< watts, per user
    bool failed = false;
    std::string error;
};

/// Aggregates of one (scheme, sweep value) cell.
struct SummaryRow {
    Scheme scheme = Scheme::proposed;
    int sweep_value = 0;  ///< L or K depending on the sweep
    int trials = 0;       ///< completed trials
    double nmse_mean = 0.0;
    double nmse_std = 0.0;
    double sum_rate_mean = 0.0;
    double sum_rate_std = 0.0;
};

struct SweepResult {
    std::string sweep_key;  ///< "L" or "K"
    std::vector<TrialResult> rows;     ///< ordered by (sweep value, trial, scheme)
    std::vector<SummaryRow> summary;
};

/// Per-trial seeds: stream `trial_index` of the master seed, then separate
/// sub-streams for user placement, codebook draws and the random scheme,
/// so results never depend on which schemes were requested.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index);

/// Runs all requested schemes on one trial: draws the scene, builds (or
/// reuses) the propagation set, fits the stack, allocates power and
/// evaluates rates. Deterministic given (config, trial index). When
/// `shared_prop` is given its fingerprint must match the scene.
std::vector<TrialResult> run_trial(const ExperimentConfig& config, int trial_index,
                                   const PropagationSet* shared_prop = nullptr);

/// Sum rate vs number of layers, all schemes, config.trials trials per
/// point. Trial seeds do not depend on L, so every layer count sees the
/// same user draws.
SweepResult sweep_layers(const ExperimentConfig& config);

/// Sum rate vs number of users (transmit antennas track the user count).
SweepResult sweep_users(const ExperimentConfig& config);

struct CompareFieldResult {
    SweepResult nearfield;
    SweepResult farfield;
    /// mean proposed-scheme sum-rate ratio near / far, per layer count
    std::vector<std::pair<int, double>> ratio_by_layers;
};

/// Paired near- vs far-field comparison: same trial seeds in both arms,
/// normalized channel gains forced.
CompareFieldResult compare_field(const ExperimentConfig& config);

struct HeatmapArm {
    std::string label;         ///< "L1", "L2", "L4", ... or "zf"
    int layers = 0;            ///< 0 for the zf arm
    double nmse = 0.0;
    int iterations = 0;
    HeatmapGrid grid;
    Eigen::MatrixXd ue_energy; ///< [j, k] = energy of stream k at user j's location
};

struct HeatmapResult {
    std::vector<HeatmapArm> arms;
    std::vector<Vec3> ue_positions;
};

/// Beamfocusing visualization: users placed deterministically on the
/// y-axis at the configured spacing, one optimization per requested layer
/// count plus the zero-forcing arm, energies sampled over the grid.
HeatmapResult run_heatmap(const ExperimentConfig& config);

struct GradCheckReport {
    double max_rel_error = 0.0;
    double tolerance = 1e-5;
    bool pass = false;
    int layers = 0;
    int atoms = 0;
};

/// Compares the analytic gradient against central finite differences on a
/// seeded small instance. `corrupt` perturbs one analytic entry first and
/// is the negative control. `tolerance` is the pass threshold.
GradCheckReport gradcheck(const ExperimentConfig& config, bool corrupt = false,
                          double tolerance = 1e-5);

/// Mean and (population) standard deviation grouped by (scheme, sweep
/// value), failed trials excluded. Exposed for the sweep drivers and tests.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows,
                                  bool sweep_over_users);

} // namespace simfocus
