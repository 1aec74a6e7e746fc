#pragma once

#include <Eigen/Core>

#include "simfocus/geometry.hpp"

namespace simfocus {

/// Per-user SINR of the end-to-end channel Q under powers p and noise
/// powers sigma2:
///   gamma_k = p_k |Q[k,k]|^2 / (sum_{k' != k} p_{k'} |Q[k,k']|^2 + sigma2_k).
Eigen::VectorXd sinr(const Eigen::MatrixXcd& end_to_end_channel, const Eigen::VectorXd& powers,
                     const Eigen::VectorXd& noise_powers);

/// Sum rate sum_k log2(1 + gamma_k) in bit/s/Hz.
double sum_rate(const Eigen::VectorXd& sinrs);

struct PowerAllocation {
    Eigen::VectorXd powers;    ///< p_k >= 0, sum = total budget
    double total_power = 0.0;  ///< P_T
    double water_level = 0.0;  ///< kappa
    bool converged = true;
    int rounds = 0;
};

/// Iterative water-filling: with interference frozen at the previous
/// iterate, each round solves p_k = (kappa - e_k)^+ where e_k is the
/// inverse effective gain (interference + noise over desired gain) and
/// kappa is found by binary search so the powers sum to the budget.
/// Starts from the uniform allocation. A run that has not settled after
/// max_rounds is returned with converged = false.
/// Throws std::invalid_argument for a zero diagonal entry or a
/// non-positive budget.
PowerAllocation water_filling(const Eigen::MatrixXcd& end_to_end_channel,
                              const Eigen::VectorXd& noise_powers, double total_power,
                              int max_rounds = 100, double tolerance = 1e-8);

/// How per-stream energies combine at a sample point.
enum class EnergyMode {
    incoherent, ///< sum_k |h^H g_k|^2 (independent symbols)
    coherent    ///< |sum_k h^H g_k|^2
};

struct HeatmapSpec {
    double x_min, x_max;
    int nx;
    double y_min, y_max;
    int ny;
    EnergyMode mode = EnergyMode::incoherent;
};

/// Received-energy samples over a rectangular grid on z = 0, row-major with
/// y varying by row: energy[iy * nx + ix].
struct HeatmapGrid {
    double x_min, x_max;
    int nx;
    double y_min, y_max;
    int ny;
    std::vector<double> energy;
};

/// Samples the received energy of the stack response G over the grid. Each
/// sample uses the unit-norm spherical-wavefront row from the sample point
/// to the last layer, so the map shows focusing geometry rather than path
/// loss. Throws std::invalid_argument if a sample coincides with an atom.
HeatmapGrid heatmap(const SceneGeometry& geometry, const Eigen::MatrixXcd& response,
                    const HeatmapSpec& spec);

} // namespace simfocus
