#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "simfocus/geometry.hpp"
#include "simfocus/metasurface.hpp"

namespace simfocus {

/// Rayleigh-Sommerfeld propagation coefficient from a source element of
/// area S_a to a destination point:
///   w = cos(psi) * S_a / r * (1 / (2*pi*r) - j / lambda) * e^{j 2*pi*r / lambda}
/// with r the distance and psi the angle to the source plane normal.
/// Throws std::invalid_argument for coincident points.
cplx rs_coefficient(const Vec3& src, const Vec3& dst, const Vec3& src_normal,
                    double wavelength_m, double atom_area_m2);

/// The fixed propagation matrices of a scene: BS array -> layer 1 (M x S)
/// and layer l-1 -> layer l (M x M) for l = 2..L. When the layers are
/// isomorphic and equally spaced, the inter-layer matrix is computed once
/// and reused. Immutable after build; shared read-only across trials.
class PropagationSet {
  public:
    PropagationSet(Eigen::MatrixXcd bs_to_first, std::vector<Eigen::MatrixXcd> between_layers,
                   std::uint64_t fingerprint);

    int layer_count() const { return static_cast<int>(between_layers_.size()) + 1; }
    int atoms_per_layer() const { return static_cast<int>(bs_to_first_.rows()); }
    int antenna_count() const { return static_cast<int>(bs_to_first_.cols()); }

    /// W^1, M x S.
    const Eigen::MatrixXcd& bs_to_first() const { return bs_to_first_; }

    /// W^l for l in [2, L], M x M.
    const Eigen::MatrixXcd& between_layers(int l) const;

    /// Fingerprint of the geometry this set was built from; lets callers
    /// cache one set per fixed scene layout.
    std::uint64_t fingerprint() const { return fingerprint_; }

  private:
    Eigen::MatrixXcd bs_to_first_;
    std::vector<Eigen::MatrixXcd> between_layers_;
    std::uint64_t fingerprint_;
};

/// Builds all propagation matrices of the scene. The source plane normal is
/// +y for the BS array and every layer.
PropagationSet build_propagation(const SceneGeometry& geometry);

/// End-to-end response of the stack to the transmit array:
///   G = Phi^L W^L ... Phi^2 W^2 Phi^1 W^1   (M x S).
/// Accumulated right-to-left so every step is an (M x M) * (M x S) product.
/// Throws std::invalid_argument on dimension mismatch.
Eigen::MatrixXcd sim_response(const SimState& state, const PropagationSet& prop);

} // namespace simfocus
