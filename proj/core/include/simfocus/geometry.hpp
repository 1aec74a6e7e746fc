#pragma once

#include <Eigen/Core>
#include <vector>

#include "simfocus/rng.hpp"

namespace simfocus {

using Vec3 = Eigen::Vector3d;

/// Parameters of the physical scene: a uniform planar transmit array, a
/// stack of identical metasurface layers in front of it, and single-antenna
/// users on the ground plane. Arrays live in planes parallel to x-z; the
/// stack grows along +y; users are drawn in a disk on z = 0.
struct SceneConfig {
    double wavelength_m = 0.03;
    int bs_rows = 2;
    int bs_cols = 2;
    int bs_active = 0;        ///< keep only the first S grid antennas; 0 = all
    int layers = 12;          ///< L
    int atoms_per_side = 15;  ///< each layer is a square UPA, M = side^2
    int users = 4;            ///< K
    double antenna_spacing_m = 0.03;   ///< d_S
    double atom_spacing_m = 0.03;      ///< d_M
    double layer_spacing_m = 0.036;    ///< d_L
    double array_height_m = 3.0;       ///< H_BS = H_S
    double ue_center_x_m = 3.0;
    double ue_center_y_m = 3.0;
    double ue_radius_m = 3.0;
};

/// All positions and derived scalars of one scene. Immutable after
/// construction and safe to share read-only across concurrent trials.
class SceneGeometry {
  public:
    /// Validates invariants: finite coordinates, positive wavelength and
    /// spacings, layers parallel to x-z and strictly ordered along +y,
    /// users on z = 0 within the disk. Throws std::invalid_argument.
    SceneGeometry(double wavelength_m,
                  std::vector<Vec3> bs_positions,
                  std::vector<std::vector<Vec3>> layer_positions,
                  std::vector<Vec3> ue_positions,
                  double antenna_spacing_m, double atom_spacing_m,
                  double layer_spacing_m, double array_height_m,
                  Vec3 ue_disk_center, double ue_disk_radius_m);

    double wavelength() const { return wavelength_m_; }
    double atom_area() const { return atom_spacing_m_ * atom_spacing_m_; } ///< S_a = d_M^2
    double antenna_spacing() const { return antenna_spacing_m_; }
    double atom_spacing() const { return atom_spacing_m_; }
    double layer_spacing() const { return layer_spacing_m_; }
    double array_height() const { return array_height_m_; }
    const Vec3& ue_disk_center() const { return ue_disk_center_; }
    double ue_disk_radius() const { return ue_disk_radius_m_; }

    int antenna_count() const { return static_cast<int>(bs_positions_.size()); }      ///< S
    int layer_count() const { return static_cast<int>(layer_positions_.size()); }     ///< L
    int atoms_per_layer() const { return static_cast<int>(layer_positions_[0].size()); } ///< M
    int user_count() const { return static_cast<int>(ue_positions_.size()); }          ///< K

    const std::vector<Vec3>& bs_positions() const { return bs_positions_; }
    const std::vector<Vec3>& layer(int l) const;  ///< 1-based layer index
    const std::vector<Vec3>& last_layer() const { return layer_positions_.back(); }
    const std::vector<Vec3>& ue_positions() const { return ue_positions_; }

    /// Centroid of layer l's meta-atom positions (1-based).
    Vec3 layer_center(int l) const;

    /// Fingerprint of (wavelength, BS and layer positions); identifies the
    /// fixed part of the scene that propagation matrices depend on.
    std::uint64_t propagation_fingerprint() const;

  private:
    double wavelength_m_;
    std::vector<Vec3> bs_positions_;
    std::vector<std::vector<Vec3>> layer_positions_;
    std::vector<Vec3> ue_positions_;
    double antenna_spacing_m_;
    double atom_spacing_m_;
    double layer_spacing_m_;
    double array_height_m_;
    Vec3 ue_disk_center_;
    double ue_disk_radius_m_;
};

/// Builds the scene from config. The BS array is centered at (0, 0, H),
/// layer l at (0, l*d_L, H); users are drawn uniformly over the disk area
/// (radius scaled by sqrt of a uniform draw). Pure function of (config, rng
/// state). Throws on non-positive spacings or counts.
SceneGeometry build_scene(const SceneConfig& config, Rng& rng);

/// Same, but with user positions placed explicitly instead of drawn.
SceneGeometry build_scene(const SceneConfig& config, const std::vector<Vec3>& ue_positions);

/// Rayleigh distance 2 D^2 / lambda of one metasurface layer, with D the
/// diagonal aperture sqrt(2) * (sqrt(M) - 1) * d_M. Zero for M = 1.
double rayleigh_distance(const SceneGeometry& geometry);

/// Euclidean distance |q - p|.
double link_distance(const Vec3& p, const Vec3& q);

/// Angle in [0, pi] between (q - p) and the source plane normal.
/// Throws std::invalid_argument for coincident points.
double link_angle(const Vec3& p, const Vec3& q, const Vec3& plane_normal);

} // namespace simfocus
