#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "simfocus/channel.hpp"

using namespace simfocus;

namespace {

SceneGeometry seeded_scene(std::uint64_t seed, int users = 4) {
    SceneConfig cfg;
    cfg.layers = 2;
    cfg.atoms_per_side = 5;
    cfg.users = users;
    Rng rng(seed);
    return build_scene(cfg, rng);
}

/// One layer of explicitly placed atoms on y = 0.03 plus users on z = 0.
SceneGeometry custom_scene(const std::vector<Vec3>& atoms, const std::vector<Vec3>& ues,
                           double lambda = 0.03) {
    std::vector<Vec3> bs = {Vec3(0.0, 0.0, 0.0)};
    return SceneGeometry(lambda, bs, {atoms}, ues, lambda, lambda, 0.03, 0.0, Vec3(0, 0, 0),
                         1e6);
}

} // namespace

TEST_CASE("path loss") {
    // direct arithmetic: (0.03 / 4 pi)^2 and the alpha = 2.8 decade factor
    CHECK(path_loss(1.0, 0.03, 2.8) == doctest::Approx(5.6993165798814996e-6).epsilon(1e-12));
    CHECK(path_loss(10.0, 0.03, 2.8) == doctest::Approx(9.0328080491349447e-9).epsilon(1e-12));
    CHECK(path_loss(123.0, 0.03, 0.0) == doctest::Approx(5.6993165798814996e-6).epsilon(1e-12));
    CHECK_THROWS_AS(path_loss(0.0, 0.03, 2.8), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(-1.0, 0.03, 2.8), std::invalid_argument);
}

TEST_CASE("near-field channel structure") {
    const SceneGeometry scene = seeded_scene(1);

    const ChannelSet normalized = nearfield_channel(scene, GainMode::normalized);
    for (Eigen::Index k = 0; k < normalized.matrix.cols(); ++k)
        CHECK(normalized.matrix.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));

    const ChannelSet physical = nearfield_channel(scene, GainMode::physical);
    for (Eigen::Index k = 0; k < physical.matrix.cols(); ++k) {
        const double expected =
            std::sqrt(path_loss(physical.link_distances_m[k], scene.wavelength(), 2.8));
        for (Eigen::Index m = 0; m < physical.matrix.rows(); ++m)
            CHECK(std::abs(physical.matrix(m, k)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("near-field phases from exact distances") {
    // one atom exactly one wavelength from the user, a second in the same
    // plane offset so its distance is exactly half a wavelength longer
    const double offset = std::sqrt(0.045 * 0.045 - 0.03 * 0.03);
    const std::vector<Vec3> atoms = {Vec3(0.0, 0.03, 0.0), Vec3(offset, 0.03, 0.0)};
    const std::vector<Vec3> ues = {Vec3(0.0, 0.06, 0.0)};
    const SceneGeometry scene = custom_scene(atoms, ues);
    const ChannelSet ch = nearfield_channel(scene, GainMode::physical);

    CHECK(std::arg(ch.matrix(0, 0)) == doctest::Approx(0.0).epsilon(1e-9)); // e^{-j 2 pi}
    const cplx ratio = ch.matrix(1, 0) / ch.matrix(0, 0);
    CHECK(ratio.real() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(ratio.imag() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("user on a meta-atom is rejected") {
    const std::vector<Vec3> atoms = {Vec3(0.5, 0.03, 0.0)};
    // geometry validation allows an atom plane at z = 0; the channel must refuse
    const SceneGeometry scene = custom_scene(atoms, {Vec3(0.5, 0.03, 0.0)});
    CHECK_THROWS_AS(nearfield_channel(scene, GainMode::physical), std::invalid_argument);
}

TEST_CASE("far-field channel structure") {
    // boresight: users directly along the layer normal see equal phases
    std::vector<Vec3> atoms;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) atoms.emplace_back(0.03 * i, 0.03, 0.03 * j);
    const SceneGeometry scene = custom_scene(atoms, {Vec3(0.0, 5.0, 0.0)});
    const ChannelSet ch = farfield_channel(scene, 150.0, GainMode::normalized);
    for (Eigen::Index m = 1; m < ch.matrix.rows(); ++m)
        CHECK(std::abs(ch.matrix(m, 0) - ch.matrix(0, 0)) < 1e-12);
}

TEST_CASE("far-field phases are reference-distance free") {
    const SceneGeometry scene = seeded_scene(2);
    const ChannelSet a = farfield_channel(scene, 150.0, GainMode::normalized);
    const ChannelSet b = farfield_channel(scene, 5000.0, GainMode::normalized);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("far-field collapses co-directional users, near-field separates them") {
    // ground-level stack so two z = 0 users can share one exact bearing
    std::vector<Vec3> atoms;
    for (int i = -7; i <= 7; ++i)
        for (int j = -7; j <= 7; ++j) atoms.emplace_back(0.03 * i, 0.03, 0.03 * j);
    const SceneGeometry scene =
        custom_scene(atoms, {Vec3(0.0, 1.03, 0.0), Vec3(0.0, 2.03, 0.0)});

    auto ratio = [](const Eigen::MatrixXcd& h) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
        return svd.singularValues()[1] / svd.singularValues()[0];
    };
    const double near_ratio = ratio(nearfield_channel(scene, GainMode::normalized).matrix);
    const double far_ratio = ratio(farfield_channel(scene, 150.0, GainMode::normalized).matrix);
    // planar wavefronts cannot tell the two ranges apart: rank collapses
    CHECK(far_ratio < 1e-10);
    // spherical wavefronts resolve range
    CHECK(near_ratio > 0.05);
}

TEST_CASE("near-field converges to the far-field model at large range") {
    SceneConfig cfg;
    cfg.layers = 1;
    cfg.atoms_per_side = 15;
    cfg.users = 2;
    Rng rng(3);
    const SceneGeometry base = build_scene(cfg, rng);
    const double far_range = 1e4 * rayleigh_distance(base);
    const Vec3 center = base.layer_center(1);

    std::vector<Vec3> moved;
    for (const auto& ue : base.ue_positions()) {
        const Vec3 u = (ue - center).normalized();
        moved.push_back(center + far_range * u);
    }
    // the moved points leave the ground plane, so evaluate both wavefront
    // formulas directly instead of going through scene validation
    Eigen::MatrixXcd near(225, 2), far(225, 2);
    const double k0 = 2.0 * std::numbers::pi / base.wavelength();
    for (int k = 0; k < 2; ++k) {
        const Vec3 u = (moved[static_cast<std::size_t>(k)] - center).normalized();
        for (int m = 0; m < 225; ++m) {
            const Vec3 atom = base.layer(1)[static_cast<std::size_t>(m)];
            near(m, k) = std::polar(1.0, -k0 * (moved[static_cast<std::size_t>(k)] - atom).norm());
            far(m, k) = std::polar(1.0, k0 * u.dot(atom - center));
        }
        near.col(k).normalize();
        far.col(k).normalize();
        // common phase removed at the first atom; the rest must agree
        const cplx anchor = near(0, k) * std::conj(far(0, k));
        double worst = 0.0;
        for (int m = 0; m < 225; ++m) {
            const cplx rel = near(m, k) * std::conj(far(m, k)) * std::conj(anchor / std::abs(anchor));
            worst = std::max(worst, std::abs(std::arg(rel)));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("zero-forcing target") {
    const SceneGeometry scene = seeded_scene(4);
    const ChannelSet ch = nearfield_channel(scene, GainMode::normalized);
    const ZfTarget target = zf_target(ch.matrix);

    const Eigen::MatrixXcd residual =
        ch.matrix.adjoint() * target.precoder - Eigen::MatrixXcd::Identity(4, 4);
    CHECK(residual.norm() < 1e-10);
    CHECK(target.target_energy == doctest::Approx(4.0).epsilon(1e-10));

    // orthonormal columns: the precoder is the channel itself
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 2);
    h(0, 0) = 1.0;
    h(3, 1) = 1.0;
    const ZfTarget t2 = zf_target(h);
    CHECK((t2.precoder - h).norm() < 1e-14);
    CHECK((t2.target - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("duplicated users break the zero-forcing target") {
    SceneConfig cfg;
    cfg.layers = 1;
    cfg.atoms_per_side = 5;
    cfg.users = 2;
    const SceneGeometry scene = build_scene(cfg, {Vec3(3, 3, 0), Vec3(3, 3, 0)});
    const ChannelSet ch = nearfield_channel(scene, GainMode::normalized);
    CHECK_THROWS_AS(zf_target(ch.matrix), std::runtime_error);
}

TEST_CASE("end-to-end channel") {
    const SceneGeometry scene = seeded_scene(5);
    const ChannelSet ch = nearfield_channel(scene, GainMode::normalized);
    const ZfTarget target = zf_target(ch.matrix);

    const Eigen::MatrixXcd q = end_to_end(ch.matrix, target.precoder);
    CHECK((q - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);

    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(ch.matrix.rows(), 4);
    CHECK(end_to_end(ch.matrix, zero).norm() == 0.0);

    // naive double-loop inner products
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(ch.matrix.rows(), 3);
    const Eigen::MatrixXcd fast = end_to_end(ch.matrix, g);
    for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 3; ++s) {
            cplx acc{};
            for (Eigen::Index m = 0; m < ch.matrix.rows(); ++m)
                acc += std::conj(ch.matrix(m, k)) * g(m, s);
            CHECK(std::abs(fast(k, s) - acc) < 1e-12);
        }

    CHECK_THROWS_AS(end_to_end(ch.matrix, Eigen::MatrixXcd::Zero(3, 3)), std::invalid_argument);
}
