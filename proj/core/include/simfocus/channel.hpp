#pragma once

#include <Eigen/Core>

#include "simfocus/geometry.hpp"

namespace simfocus {

/// Whether channel columns carry the physical link gain sqrt(beta) or are
/// rescaled to unit norm.
enum class GainMode { physical, normalized };

/// User channels to the last metasurface layer: H is M x K, column k is
/// user k. In physical mode every entry of column k has magnitude
/// sqrt(beta_k); in normalized mode every column has unit Euclidean norm.
struct ChannelSet {
    Eigen::MatrixXcd matrix;            ///< H, M x K
    GainMode mode = GainMode::physical;
    Eigen::VectorXd link_distances_m;   ///< user to last-layer center
};

/// Free-space power gain beta = (lambda / (4*pi))^2 * d^{-alpha}.
/// Throws std::invalid_argument for d <= 0.
double path_loss(double distance_m, double wavelength_m, double alpha);

/// Spherical-wavefront channel: H[m,k] = sqrt(beta_k) e^{-j 2 pi d_{m,k} / lambda}
/// with d_{m,k} the exact distance from user k to atom m of the last layer
/// and beta_k evaluated at the user-to-layer-center distance.
/// Throws std::invalid_argument if a user coincides with an atom.
ChannelSet nearfield_channel(const SceneGeometry& geometry, GainMode mode,
                             double path_loss_alpha = 2.8);

/// Planar-wavefront channel: each user contributes a steering column
/// H[m,k] = sqrt(beta_k) e^{+j 2 pi (u_k . p_m) / lambda} with u_k the unit
/// bearing from the last-layer center to the user and p_m the atom position
/// relative to that center. The phase sign matches the spherical model in
/// the large-range limit (up to a bearing-independent common phase). In
/// physical mode beta_k is evaluated at the reference distance, i.e. the
/// user is virtually moved to that range along its true bearing.
/// Throws std::invalid_argument for a zero-length bearing.
ChannelSet farfield_channel(const SceneGeometry& geometry, double reference_distance_m,
                            GainMode mode, double path_loss_alpha = 2.8);

/// Zero-forcing reference precoder and the fitting target it induces.
struct ZfTarget {
    Eigen::MatrixXcd precoder;   ///< W_zf = H (H^H H)^{-1}, M x K
    Eigen::MatrixXcd target;     ///< Lambda = H^H W_zf, K x K (identity up to conditioning)
    double target_energy = 0.0;  ///< tau = |Lambda|_F^2
};

/// Computes the ZF precoder. Throws std::runtime_error when H^H H has
/// condition number above 1e12 (e.g. duplicated user positions).
ZfTarget zf_target(const Eigen::MatrixXcd& channel);

/// End-to-end channel Q = H^H G (K x K when G is the stack response or a
/// digital precoder). Row k is user k; column k is stream k.
Eigen::MatrixXcd end_to_end(const Eigen::MatrixXcd& channel, const Eigen::MatrixXcd& response);

} // namespace simfocus
