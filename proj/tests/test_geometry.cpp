#include <doctest.h>

#include <cmath>

#include "simfocus/geometry.hpp"

using namespace simfocus;

namespace {
SceneConfig default_scene() { return SceneConfig{}; }
}

TEST_CASE("default scene layout") {
    SceneConfig cfg = default_scene();
    Rng rng(1);
    const SceneGeometry scene = build_scene(cfg, rng);

    CHECK(scene.layer_count() == 12);
    CHECK(scene.atoms_per_layer() == 225);
    CHECK(scene.antenna_count() == 4);
    CHECK(scene.user_count() == 4);

    const Vec3 first_center = scene.layer_center(1);
    CHECK(first_center.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(first_center.y() == doctest::Approx(0.036).epsilon(1e-12));
    CHECK(first_center.z() == doctest::Approx(3.0).epsilon(1e-12));

    Vec3 bs_center = Vec3::Zero();
    for (const auto& p : scene.bs_positions()) bs_center += p;
    bs_center /= 4.0;
    CHECK(bs_center.x() == doctest::Approx(0.0));
    CHECK(bs_center.y() == doctest::Approx(0.0));
    CHECK(bs_center.z() == doctest::Approx(3.0));

    for (const auto& ue : scene.ue_positions()) {
        CHECK(ue.z() == 0.0);
        CHECK((ue - Vec3(3.0, 3.0, 0.0)).norm() <= 3.0 + 1e-9);
    }
}

TEST_CASE("degenerate single-atom scene") {
    SceneConfig cfg = default_scene();
    cfg.layers = 1;
    cfg.atoms_per_side = 1;
    Rng rng(2);
    const SceneGeometry scene = build_scene(cfg, rng);
    CHECK(scene.atoms_per_layer() == 1);
    const Vec3 atom = scene.layer(1)[0];
    CHECK(atom.x() == doctest::Approx(0.0));
    CHECK(atom.y() == doctest::Approx(cfg.layer_spacing_m));
    CHECK(atom.z() == doctest::Approx(cfg.array_height_m));
}

TEST_CASE("scene construction is a pure function of config and seed") {
    SceneConfig cfg = default_scene();
    Rng a(42), b(42), c(43);
    const SceneGeometry sa = build_scene(cfg, a);
    const SceneGeometry sb = build_scene(cfg, b);
    const SceneGeometry sc = build_scene(cfg, c);
    for (int k = 0; k < 4; ++k) {
        CHECK(sa.ue_positions()[k] == sb.ue_positions()[k]);
    }
    CHECK(sa.ue_positions()[0] != sc.ue_positions()[0]);
}

TEST_CASE("active antenna subset") {
    SceneConfig cfg = default_scene();
    cfg.bs_active = 3;
    Rng rng(3);
    CHECK(build_scene(cfg, rng).antenna_count() == 3);
    cfg.bs_active = 5;
    CHECK_THROWS_AS(build_scene(cfg, rng), std::invalid_argument);
}

TEST_CASE("rayleigh distance") {
    SceneConfig cfg = default_scene();
    Rng rng(1);
    CHECK(rayleigh_distance(build_scene(cfg, rng)) == doctest::Approx(23.52).epsilon(1e-12));

    cfg.atoms_per_side = 1;
    cfg.layers = 1;
    CHECK(rayleigh_distance(build_scene(cfg, rng)) == 0.0);

    cfg.atoms_per_side = 2; // M = 4, direct arithmetic: 2 * (sqrt(2)*0.03)^2 / 0.03
    CHECK(rayleigh_distance(build_scene(cfg, rng)) == doctest::Approx(0.12).epsilon(1e-12));
}

TEST_CASE("rayleigh distance monotonicity") {
    SceneConfig cfg = default_scene();
    Rng rng(1);
    const double base = rayleigh_distance(build_scene(cfg, rng));

    SceneConfig more_atoms = cfg;
    more_atoms.atoms_per_side = 17;
    CHECK(rayleigh_distance(build_scene(more_atoms, rng)) > base);

    SceneConfig wider = cfg;
    wider.atom_spacing_m *= 1.5;
    CHECK(rayleigh_distance(build_scene(wider, rng)) > base);

    SceneConfig longer_wave = cfg;
    longer_wave.wavelength_m *= 2.0; // fixed aperture (spacings untouched)
    CHECK(rayleigh_distance(build_scene(longer_wave, rng)) < base);
}

TEST_CASE("every default user sits in the near field of the stack") {
    SceneConfig cfg = default_scene();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const SceneGeometry scene = build_scene(cfg, rng);
        const double limit = rayleigh_distance(scene);
        for (const auto& ue : scene.ue_positions())
            for (const auto& atom : scene.last_layer())
                CHECK(link_distance(ue, atom) < limit);
    }
}

TEST_CASE("link distance and angle") {
    CHECK(link_distance(Vec3(0, 0, 0), Vec3(3, 4, 0)) == doctest::Approx(5.0));
    CHECK(link_angle(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 1, 0)) == doctest::Approx(0.0));
    CHECK(link_angle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)) ==
          doctest::Approx(std::numbers::pi / 2));
    CHECK_THROWS_AS(link_angle(Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(0, 1, 0)),
                    std::invalid_argument);
}

TEST_CASE("invalid configurations are rejected") {
    Rng rng(1);
    SceneConfig cfg = default_scene();
    cfg.atom_spacing_m = 0.0;
    CHECK_THROWS_AS(build_scene(cfg, rng), std::invalid_argument);

    cfg = default_scene();
    cfg.layer_spacing_m = -1.0;
    CHECK_THROWS_AS(build_scene(cfg, rng), std::invalid_argument);

    cfg = default_scene();
    cfg.users = 0;
    CHECK_THROWS_AS(build_scene(cfg, rng), std::invalid_argument);
}

TEST_CASE("explicit user placement is validated against the disk") {
    SceneConfig cfg = default_scene();
    CHECK_NOTHROW(build_scene(cfg, {Vec3(3, 3, 0), Vec3(4, 4, 0)}));
    CHECK_THROWS_AS(build_scene(cfg, {Vec3(9, 9, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(build_scene(cfg, {Vec3(3, 3, 0.5)}), std::invalid_argument);
}

TEST_CASE("propagation fingerprint tracks the fixed geometry only") {
    SceneConfig cfg = default_scene();
    Rng a(1), b(2);
    const SceneGeometry sa = build_scene(cfg, a);
    const SceneGeometry sb = build_scene(cfg, b); // different users
    CHECK(sa.propagation_fingerprint() == sb.propagation_fingerprint());

    SceneConfig other = cfg;
    other.layer_spacing_m *= 1.01;
    Rng c(1);
    CHECK(build_scene(other, c).propagation_fingerprint() != sa.propagation_fingerprint());
}
