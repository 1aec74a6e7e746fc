#include "simfocus/channel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simfocus {

double path_loss(double distance_m, double wavelength_m, double alpha) {
    if (distance_m <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
    const double a = wavelength_m / (4.0 * std::numbers::pi);
    return a * a * std::pow(distance_m, -alpha);
}

namespace {

void normalize_columns(Eigen::MatrixXcd& h) {
    for (Eigen::Index k = 0; k < h.cols(); ++k) h.col(k) /= h.col(k).norm();
}

} // namespace

ChannelSet nearfield_channel(const SceneGeometry& geometry, GainMode mode,
                             double path_loss_alpha) {
    const auto& atoms = geometry.last_layer();
    const auto& ues = geometry.ue_positions();
    const double lambda = geometry.wavelength();
    const Vec3 center = geometry.layer_center(geometry.layer_count());
    const double k0 = 2.0 * std::numbers::pi / lambda;

    Eigen::MatrixXcd h(atoms.size(), ues.size());
    Eigen::VectorXd distances(ues.size());
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
        const Vec3& ue = ues[static_cast<std::size_t>(k)];
        const double center_distance = (ue - center).norm();
        distances[k] = center_distance;
        const double gain =
            std::sqrt(path_loss(center_distance, lambda, path_loss_alpha));
        for (Eigen::Index m = 0; m < h.rows(); ++m) {
            const double d = (ue - atoms[static_cast<std::size_t>(m)]).norm();
            if (d == 0.0) throw std::invalid_argument("nearfield_channel: user on a meta-atom");
            h(m, k) = std::polar(gain, -k0 * d);
        }
    }
    if (mode == GainMode::normalized) normalize_columns(h);
    return ChannelSet{std::move(h), mode, std::move(distances)};
}

ChannelSet farfield_channel(const SceneGeometry& geometry, double reference_distance_m,
                            GainMode mode, double path_loss_alpha) {
    if (reference_distance_m <= 0.0)
        throw std::invalid_argument("farfield_channel: reference distance must be positive");
    const auto& atoms = geometry.last_layer();
    const auto& ues = geometry.ue_positions();
    const double lambda = geometry.wavelength();
    const Vec3 center = geometry.layer_center(geometry.layer_count());
    const double k0 = 2.0 * std::numbers::pi / lambda;

    Eigen::MatrixXcd h(atoms.size(), ues.size());
    Eigen::VectorXd distances(ues.size());
    const double gain = std::sqrt(path_loss(reference_distance_m, lambda, path_loss_alpha));
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
        const Vec3 bearing = ues[static_cast<std::size_t>(k)] - center;
        const double range = bearing.norm();
        if (range == 0.0) throw std::invalid_argument("farfield_channel: zero-length bearing");
        const Vec3 u = bearing / range;
        distances[k] = reference_distance_m;
        for (Eigen::Index m = 0; m < h.rows(); ++m) {
            const Vec3 p = atoms[static_cast<std::size_t>(m)] - center;
            h(m, k) = std::polar(gain, k0 * u.dot(p));
        }
    }
    if (mode == GainMode::normalized) normalize_columns(h);
    return ChannelSet{std::move(h), mode, std::move(distances)};
}

ZfTarget zf_target(const Eigen::MatrixXcd& channel) {
    const Eigen::MatrixXcd gram = channel.adjoint() * channel;
    // conditioning gate before inverting
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[sv.size() - 1] <= 0.0 || sv[0] / sv[sv.size() - 1] > 1e12)
        throw std::runtime_error("zf_target: channel Gram matrix is ill-conditioned");
    Eigen::MatrixXcd precoder = channel * gram.inverse();
    Eigen::MatrixXcd target = channel.adjoint() * precoder;
    const double energy = target.squaredNorm();
    return ZfTarget{std::move(precoder), std::move(target), energy};
}

Eigen::MatrixXcd end_to_end(const Eigen::MatrixXcd& channel, const Eigen::MatrixXcd& response) {
    if (channel.rows() != response.rows())
        throw std::invalid_argument("end_to_end: dimension mismatch");
    return channel.adjoint() * response;
}

} // namespace simfocus
