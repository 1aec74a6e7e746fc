#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "simfocus/propagation.hpp"

using namespace simfocus;

namespace {

Eigen::ArrayXXd random_phases(int layers, int atoms, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::ArrayXXd phases(layers, atoms);
    for (int l = 0; l < layers; ++l)
        for (int m = 0; m < atoms; ++m) phases(l, m) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return phases;
}

/// Two-atom layers at explicit positions; exercises non-square layouts.
SceneGeometry toy_scene(int layers) {
    const double lambda = 0.03;
    std::vector<Vec3> bs = {Vec3(-0.015, 0.0, 3.0), Vec3(0.015, 0.0, 3.0)};
    std::vector<std::vector<Vec3>> stack;
    for (int l = 1; l <= layers; ++l)
        stack.push_back({Vec3(-0.015, l * 0.036, 3.0), Vec3(0.015, l * 0.036, 3.0)});
    std::vector<Vec3> ues = {Vec3(3.0, 3.0, 0.0), Vec3(2.5, 3.5, 0.0)};
    return SceneGeometry(lambda, bs, stack, ues, lambda, lambda, 1.2 * lambda, 3.0,
                         Vec3(3.0, 3.0, 0.0), 3.0);
}

} // namespace

TEST_CASE("point-to-point coefficient: on-axis value") {
    // high-precision evaluation of the diffraction formula, lambda-free form
    const double lambda = 0.03;
    const cplx w = rs_coefficient(Vec3(0, 0, 0), Vec3(0, 1.2 * lambda, 0), Vec3(0, 1, 0), lambda,
                                  lambda * lambda);
    CHECK(w.real() == doctest::Approx(0.82670097340858166).epsilon(1e-12));
    CHECK(w.imag() == doctest::Approx(-0.15239933855680938).epsilon(1e-12));
    CHECK(std::abs(w) == doctest::Approx(0.84063074998910755).epsilon(1e-12));
    CHECK(std::arg(w) == doctest::Approx(-0.18229971019759372).epsilon(1e-12));
}

TEST_CASE("point-to-point coefficient: grazing and far limits") {
    const double lambda = 0.03;
    const cplx grazing =
        rs_coefficient(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), lambda, lambda * lambda);
    CHECK(std::abs(grazing) == doctest::Approx(0.0).epsilon(1e-15));

    const double r = 1e6 * lambda;
    const cplx far =
        rs_coefficient(Vec3(0, 0, 0), Vec3(0, r, 0), Vec3(0, 1, 0), lambda, lambda * lambda);
    CHECK(std::abs(far) == doctest::Approx(lambda * lambda / (lambda * r)).epsilon(1e-4));

    CHECK_THROWS_AS(
        rs_coefficient(Vec3(1, 2, 3), Vec3(1, 2, 3), Vec3(0, 1, 0), lambda, lambda * lambda),
        std::invalid_argument);
}

TEST_CASE("propagation set of the default scene") {
    SceneConfig cfg;
    Rng rng(1);
    const SceneGeometry scene = build_scene(cfg, rng);
    const PropagationSet prop = build_propagation(scene);

    CHECK(prop.bs_to_first().rows() == 225);
    CHECK(prop.bs_to_first().cols() == 4);
    CHECK(prop.between_layers(2).rows() == 225);
    CHECK(prop.between_layers(2).cols() == 225);
    // equally spaced isomorphic layers share one matrix
    CHECK(prop.between_layers(3) == prop.between_layers(2));
    CHECK(prop.between_layers(12) == prop.between_layers(2));
    CHECK(prop.fingerprint() == scene.propagation_fingerprint());
}

TEST_CASE("single-layer stack has no inter-layer matrices") {
    SceneConfig cfg;
    cfg.layers = 1;
    Rng rng(1);
    const PropagationSet prop = build_propagation(build_scene(cfg, rng));
    CHECK(prop.layer_count() == 1);
    CHECK_THROWS_AS(prop.between_layers(2), std::out_of_range);
}

TEST_CASE("toy scene matrices match the pointwise coefficient") {
    const SceneGeometry scene = toy_scene(3);
    const PropagationSet prop = build_propagation(scene);
    const Eigen::MatrixXcd w1 = oracles::link_matrix(scene, scene.bs_positions(), scene.layer(1));
    CHECK((prop.bs_to_first() - w1).cwiseAbs().maxCoeff() == 0.0);
    for (int l = 2; l <= 3; ++l) {
        const Eigen::MatrixXcd wl =
            oracles::link_matrix(scene, scene.layer(l - 1), scene.layer(l));
        // layers past the second may reuse the shared matrix, whose source
        // positions differ from l-th layer coordinates at the last bit
        CHECK((prop.between_layers(l) - wl).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("stack response with a single pass-through layer") {
    SceneConfig cfg;
    cfg.layers = 1;
    cfg.atoms_per_side = 3;
    Rng rng(4);
    const SceneGeometry scene = build_scene(cfg, rng);
    const PropagationSet prop = build_propagation(scene);
    const SimState state(1, 9, AmplitudeMode::ideal);
    CHECK((sim_response(state, prop) - prop.bs_to_first()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniform phase shifts scale the response multilinearly") {
    SceneConfig cfg;
    cfg.layers = 3;
    cfg.atoms_per_side = 2;
    Rng rng(5);
    const SceneGeometry scene = build_scene(cfg, rng);
    const PropagationSet prop = build_propagation(scene);

    const Eigen::ArrayXXd base = random_phases(3, 4, 11);
    const double delta = 0.7;
    const SimState s0(base, AmplitudeMode::ideal);
    const SimState s1(base + delta, AmplitudeMode::ideal);
    const Eigen::MatrixXcd expected =
        std::polar(1.0, 3 * delta) * sim_response(s0, prop); // one e^{j delta} per layer
    CHECK((sim_response(s1, prop) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stack response equals the naive chained product") {
    SceneConfig cfg;
    cfg.layers = 3;
    cfg.atoms_per_side = 2;
    cfg.users = 2;
    cfg.bs_active = 2;
    Rng rng(6);
    const SceneGeometry scene = build_scene(cfg, rng);
    const PropagationSet prop = build_propagation(scene);
    const SimState state(random_phases(3, 4, 21), AmplitudeMode::coupled);

    const Eigen::MatrixXcd fast = sim_response(state, prop);
    const Eigen::MatrixXcd naive = oracles::sim_response(state, prop);
    CHECK((fast - naive).cwiseAbs().maxCoeff() < 1e-12);

    // larger instance, exercises the shared inter-layer matrix path
    SceneConfig desk;
    desk.layers = 3;
    desk.atoms_per_side = 7;
    const SceneGeometry scene2 = build_scene(desk, rng);
    const PropagationSet prop2 = build_propagation(scene2);
    const SimState state2(random_phases(3, 49, 22), AmplitudeMode::coupled);
    CHECK((sim_response(state2, prop2) - oracles::sim_response(state2, prop2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("ideal-phase response obeys the operator norm bound") {
    SceneConfig cfg;
    cfg.layers = 3;
    cfg.atoms_per_side = 3;
    Rng rng(8);
    const SceneGeometry scene = build_scene(cfg, rng);
    const PropagationSet prop = build_propagation(scene);
    const SimState state(random_phases(3, 9, 31), AmplitudeMode::ideal);

    double bound = prop.bs_to_first().norm(); // Frobenius of W^1
    for (int l = 2; l <= 3; ++l) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prop.between_layers(l));
        bound *= svd.singularValues()[0];
    }
    CHECK(sim_response(state, prop).norm() <= bound * (1 + 1e-12));
}

TEST_CASE("dimension mismatches are rejected") {
    SceneConfig cfg;
    cfg.layers = 2;
    cfg.atoms_per_side = 2;
    Rng rng(9);
    const PropagationSet prop = build_propagation(build_scene(cfg, rng));
    const SimState wrong_layers(3, 4, AmplitudeMode::ideal);
    CHECK_THROWS_AS(sim_response(wrong_layers, prop), std::invalid_argument);
    const SimState wrong_atoms(2, 9, AmplitudeMode::ideal);
    CHECK_THROWS_AS(sim_response(wrong_atoms, prop), std::invalid_argument);
}
