#include "simfocus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace simfocus {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool all_finite(const Vec3& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

/// Centered grid offsets for an n-element axis with spacing d.
double grid_offset(int i, int n, double d) {
    return (i - 0.5 * (n - 1)) * d;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    return split_mix64(h ^ bits);
}

} // namespace

SceneGeometry::SceneGeometry(double wavelength_m, std::vector<Vec3> bs_positions,
                             std::vector<std::vector<Vec3>> layer_positions,
                             std::vector<Vec3> ue_positions, double antenna_spacing_m,
                             double atom_spacing_m, double layer_spacing_m,
                             double array_height_m, Vec3 ue_disk_center,
                             double ue_disk_radius_m)
    : wavelength_m_(wavelength_m),
      bs_positions_(std::move(bs_positions)),
      layer_positions_(std::move(layer_positions)),
      ue_positions_(std::move(ue_positions)),
      antenna_spacing_m_(antenna_spacing_m),
      atom_spacing_m_(atom_spacing_m),
      layer_spacing_m_(layer_spacing_m),
      array_height_m_(array_height_m),
      ue_disk_center_(ue_disk_center),
      ue_disk_radius_m_(ue_disk_radius_m) {
    require(wavelength_m_ > 0 && std::isfinite(wavelength_m_), "wavelength must be positive");
    require(antenna_spacing_m_ > 0, "antenna spacing must be positive");
    require(atom_spacing_m_ > 0, "atom spacing must be positive");
    require(layer_spacing_m_ > 0, "layer spacing must be positive");
    require(!bs_positions_.empty(), "need at least one transmit antenna");
    require(!layer_positions_.empty(), "need at least one metasurface layer");
    require(!ue_positions_.empty(), "need at least one user");

    const std::size_t atoms = layer_positions_[0].size();
    require(atoms >= 1, "need at least one meta-atom per layer");

    for (const Vec3& p : bs_positions_) {
        require(all_finite(p), "non-finite antenna position");
        require(p.y() == bs_positions_[0].y(), "transmit array must lie in a plane parallel to x-z");
    }
    double prev_y = bs_positions_[0].y();
    for (const auto& layer : layer_positions_) {
        require(layer.size() == atoms, "layers must have equal atom counts");
        for (const Vec3& p : layer) {
            require(all_finite(p), "non-finite meta-atom position");
            require(p.y() == layer[0].y(), "layer must lie in a plane parallel to x-z");
        }
        require(layer[0].y() > prev_y, "layers must be strictly ordered along +y");
        prev_y = layer[0].y();
    }
    const double tol = 1e-9 + 1e-12 * ue_disk_radius_m_;
    for (const Vec3& p : ue_positions_) {
        require(all_finite(p), "non-finite user position");
        require(p.z() == 0.0, "users must lie on z = 0");
        require((p - ue_disk_center_).norm() <= ue_disk_radius_m_ + tol,
                "user outside the placement disk");
    }
}

const std::vector<Vec3>& SceneGeometry::layer(int l) const {
    if (l < 1 || l > layer_count()) throw std::out_of_range("layer index out of range");
    return layer_positions_[static_cast<std::size_t>(l - 1)];
}

Vec3 SceneGeometry::layer_center(int l) const {
    const auto& atoms = layer(l);
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : atoms) c += p;
    return c / static_cast<double>(atoms.size());
}

std::uint64_t SceneGeometry::propagation_fingerprint() const {
    std::uint64_t h = hash_double(0x5349'4d46'4f43'5553ULL, wavelength_m_);
    h = hash_double(h, atom_area());
    for (const Vec3& p : bs_positions_) {
        h = hash_double(h, p.x());
        h = hash_double(h, p.y());
        h = hash_double(h, p.z());
    }
    for (const auto& layer : layer_positions_)
        for (const Vec3& p : layer) {
            h = hash_double(h, p.x());
            h = hash_double(h, p.y());
            h = hash_double(h, p.z());
        }
    return h;
}

namespace {

SceneGeometry assemble_scene(const SceneConfig& c, std::vector<Vec3> ues) {
    require(c.bs_rows >= 1 && c.bs_cols >= 1, "transmit array dimensions must be >= 1");
    require(c.layers >= 1, "layer count must be >= 1");
    require(c.atoms_per_side >= 1, "atoms per side must be >= 1");
    require(c.antenna_spacing_m > 0 && c.atom_spacing_m > 0 && c.layer_spacing_m > 0,
            "spacings must be positive");

    std::vector<Vec3> bs;
    bs.reserve(static_cast<std::size_t>(c.bs_rows) * c.bs_cols);
    for (int r = 0; r < c.bs_rows; ++r)
        for (int col = 0; col < c.bs_cols; ++col)
            bs.emplace_back(grid_offset(col, c.bs_cols, c.antenna_spacing_m), 0.0,
                            c.array_height_m + grid_offset(r, c.bs_rows, c.antenna_spacing_m));
    if (c.bs_active > 0) {
        require(c.bs_active <= static_cast<int>(bs.size()),
                "cannot activate more antennas than the grid holds");
        bs.resize(static_cast<std::size_t>(c.bs_active));
    }

    const int side = c.atoms_per_side;
    std::vector<std::vector<Vec3>> layers(static_cast<std::size_t>(c.layers));
    for (int l = 0; l < c.layers; ++l) {
        auto& atoms = layers[static_cast<std::size_t>(l)];
        atoms.reserve(static_cast<std::size_t>(side) * side);
        const double y = (l + 1) * c.layer_spacing_m;
        for (int r = 0; r < side; ++r)
            for (int col = 0; col < side; ++col)
                atoms.emplace_back(grid_offset(col, side, c.atom_spacing_m), y,
                                   c.array_height_m + grid_offset(r, side, c.atom_spacing_m));
    }

    return SceneGeometry(c.wavelength_m, std::move(bs), std::move(layers), std::move(ues),
                         c.antenna_spacing_m, c.atom_spacing_m, c.layer_spacing_m,
                         c.array_height_m, Vec3(c.ue_center_x_m, c.ue_center_y_m, 0.0),
                         c.ue_radius_m);
}

} // namespace

SceneGeometry build_scene(const SceneConfig& config, Rng& rng) {
    require(config.users >= 1, "user count must be >= 1");
    require(config.ue_radius_m >= 0, "user disk radius must be non-negative");
    std::vector<Vec3> ues;
    ues.reserve(static_cast<std::size_t>(config.users));
    for (int k = 0; k < config.users; ++k) {
        // uniform over the disk area
        const double radius = config.ue_radius_m * std::sqrt(rng.uniform());
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        ues.emplace_back(config.ue_center_x_m + radius * std::cos(angle),
                         config.ue_center_y_m + radius * std::sin(angle), 0.0);
    }
    return assemble_scene(config, std::move(ues));
}

SceneGeometry build_scene(const SceneConfig& config, const std::vector<Vec3>& ue_positions) {
    return assemble_scene(config, ue_positions);
}

double rayleigh_distance(const SceneGeometry& geometry) {
    const double side = std::sqrt(static_cast<double>(geometry.atoms_per_layer()));
    const double diagonal = std::numbers::sqrt2 * (side - 1.0) * geometry.atom_spacing();
    return 2.0 * diagonal * diagonal / geometry.wavelength();
}

double link_distance(const Vec3& p, const Vec3& q) { return (q - p).norm(); }

double link_angle(const Vec3& p, const Vec3& q, const Vec3& plane_normal) {
    const Vec3 d = q - p;
    const double dn = d.norm();
    const double nn = plane_normal.norm();
    if (dn == 0.0) throw std::invalid_argument("link_angle: coincident points");
    if (nn == 0.0) throw std::invalid_argument("link_angle: zero normal");
    const double c = std::clamp(d.dot(plane_normal) / (dn * nn), -1.0, 1.0);
    return std::acos(c);
}

} // namespace simfocus
