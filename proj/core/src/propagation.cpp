#include "simfocus/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simfocus {

cplx rs_coefficient(const Vec3& src, const Vec3& dst, const Vec3& src_normal,
                    double wavelength_m, double atom_area_m2) {
    if (wavelength_m <= 0.0) throw std::invalid_argument("rs_coefficient: wavelength must be positive");
    if (atom_area_m2 <= 0.0) throw std::invalid_argument("rs_coefficient: element area must be positive");
    const Vec3 d = dst - src;
    const double r = d.norm();
    if (r == 0.0) throw std::invalid_argument("rs_coefficient: coincident points");
    const double cos_psi = d.dot(src_normal) / (r * src_normal.norm());
    const double kr = 2.0 * std::numbers::pi * r / wavelength_m;
    const cplx spherical(1.0 / (2.0 * std::numbers::pi * r), -1.0 / wavelength_m);
    return cos_psi * atom_area_m2 / r * spherical * std::polar(1.0, kr);
}

PropagationSet::PropagationSet(Eigen::MatrixXcd bs_to_first,
                               std::vector<Eigen::MatrixXcd> between_layers,
                               std::uint64_t fingerprint)
    : bs_to_first_(std::move(bs_to_first)),
      between_layers_(std::move(between_layers)),
      fingerprint_(fingerprint) {}

const Eigen::MatrixXcd& PropagationSet::between_layers(int l) const {
    if (l < 2 || l > layer_count()) throw std::out_of_range("inter-layer index out of range");
    return between_layers_[static_cast<std::size_t>(l - 2)];
}

namespace {

const Vec3 plane_normal(0.0, 1.0, 0.0); // all arrays face +y

Eigen::MatrixXcd link_matrix(const std::vector<Vec3>& sources, const std::vector<Vec3>& targets,
                             double wavelength, double area) {
    Eigen::MatrixXcd w(targets.size(), sources.size());
    for (Eigen::Index col = 0; col < w.cols(); ++col)
        for (Eigen::Index row = 0; row < w.rows(); ++row)
            w(row, col) = rs_coefficient(sources[static_cast<std::size_t>(col)],
                                         targets[static_cast<std::size_t>(row)], plane_normal,
                                         wavelength, area);
    return w;
}

/// True when layer l sits at the same offsets from layer l-1 as layer 2
/// does from layer 1; the propagation matrix is then identical. Grid
/// coordinates carry rounding at the last bit, so offsets are compared
/// with a tolerance far below any physical scale.
bool same_relative_layout(const std::vector<Vec3>& prev_ref, const std::vector<Vec3>& next_ref,
                          const std::vector<Vec3>& prev, const std::vector<Vec3>& next) {
    constexpr double eps = 1e-12;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const Vec3 step = next[i] - prev[i];
        const Vec3 step_ref = next_ref[i] - prev_ref[i];
        if ((step - step_ref).norm() > eps * (1.0 + step_ref.norm())) return false;
        const Vec3 offset = prev[i] - prev[0];
        const Vec3 offset_ref = prev_ref[i] - prev_ref[0];
        if ((offset - offset_ref).norm() > eps * (1.0 + offset_ref.norm())) return false;
    }
    return true;
}

} // namespace

PropagationSet build_propagation(const SceneGeometry& geometry) {
    const double lambda = geometry.wavelength();
    const double area = geometry.atom_area();
    const int layer_count = geometry.layer_count();

    Eigen::MatrixXcd bs_to_first =
        link_matrix(geometry.bs_positions(), geometry.layer(1), lambda, area);

    std::vector<Eigen::MatrixXcd> between;
    between.reserve(static_cast<std::size_t>(layer_count) - 1);
    for (int l = 2; l <= layer_count; ++l) {
        if (l > 2 && same_relative_layout(geometry.layer(1), geometry.layer(2),
                                          geometry.layer(l - 1), geometry.layer(l))) {
            between.push_back(between.front());
            continue;
        }
        between.push_back(link_matrix(geometry.layer(l - 1), geometry.layer(l), lambda, area));
    }

    return PropagationSet(std::move(bs_to_first), std::move(between),
                          geometry.propagation_fingerprint());
}

Eigen::MatrixXcd sim_response(const SimState& state, const PropagationSet& prop) {
    if (state.layer_count() != prop.layer_count() ||
        state.atoms_per_layer() != prop.atoms_per_layer())
        throw std::invalid_argument("sim_response: state and propagation dimensions differ");

    Eigen::MatrixXcd acc = prop.bs_to_first();
    acc = state.layer_diagonal(1).asDiagonal() * acc;
    for (int l = 2; l <= prop.layer_count(); ++l) {
        acc = prop.between_layers(l) * acc;
        acc = state.layer_diagonal(l).asDiagonal() * acc;
    }
    return acc;
}

} // namespace simfocus
