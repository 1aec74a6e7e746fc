#include "simfocus/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace simfocus {

namespace {

// per-trial sub-streams; fixed so the set of requested schemes never
// changes the draws of another scheme
constexpr std::uint64_t kUeStream = 1;
constexpr std::uint64_t kCodebookStream = 2;
constexpr std::uint64_t kRandomStream = 3;

/// Scene with exactly K active transmit antennas: data streams feed their
/// own antennas, so the array activates one element per user. Keeps the
/// configured grid when it already holds exactly K elements, otherwise
/// activates the first K of the smallest square grid that fits.
SceneConfig scene_for(const ExperimentConfig& config) {
    SceneConfig scene = config.scene_config();
    if (scene.bs_rows * scene.bs_cols != config.users) {
        const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(config.users))));
        scene.bs_rows = side;
        scene.bs_cols = side;
        scene.bs_active = config.users;
    }
    return scene;
}

Eigen::ArrayXXd uniform_phases(int layers, int atoms, Rng& rng) {
    Eigen::ArrayXXd phases(layers, atoms);
    for (int l = 0; l < layers; ++l)
        for (int m = 0; m < atoms; ++m) phases(l, m) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return phases;
}

/// Unit-norm spherical-wavefront column from a point on z = 0 to the last
/// layer; the sampling channel of the heatmap and of the per-user energies.
Eigen::VectorXcd sample_column(const SceneGeometry& geometry, const Vec3& point) {
    const auto& atoms = geometry.last_layer();
    const double k0 = 2.0 * std::numbers::pi / geometry.wavelength();
    Eigen::VectorXcd h(static_cast<Eigen::Index>(atoms.size()));
    for (Eigen::Index m = 0; m < h.size(); ++m) {
        const double d = (point - atoms[static_cast<std::size_t>(m)]).norm();
        if (d == 0.0) throw std::invalid_argument("sample point on a meta-atom");
        h[m] = std::polar(1.0, -k0 * d);
    }
    return h / h.norm();
}

struct SchemeOutcome {
    Eigen::MatrixXcd response;
    double nmse_value = 0.0;
    int iterations = 0;
};

/// Runs `count` trial jobs over a small thread pool; job i writes only its
/// own slot, so assembly order is independent of scheduling.
void run_indexed(int count, int workers, const std::function<void(int)>& job) {
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
        });
    for (auto& t : pool) t.join();
}

std::vector<TrialResult> run_trial_impl(const ExperimentConfig& config, int trial_index,
                                        const PropagationSet* shared_prop, bool farfield) {
    const std::uint64_t seed = trial_seed(config.master_seed, trial_index);
    Rng ue_rng(derive_seed(seed, kUeStream));
    const SceneGeometry scene = build_scene(scene_for(config), ue_rng);

    std::optional<PropagationSet> own_prop;
    const PropagationSet* prop = shared_prop;
    if (prop == nullptr) {
        own_prop.emplace(build_propagation(scene));
        prop = &*own_prop;
    } else if (prop->fingerprint() != scene.propagation_fingerprint()) {
        throw std::invalid_argument("run_trial: shared propagation set built for another scene");
    }

    std::vector<TrialResult> results;
    results.reserve(config.schemes.size());

    TrialResult base;
    base.trial = trial_index;
    base.users = scene.user_count();
    base.layers = scene.layer_count();
    base.atoms = scene.atoms_per_layer();

    // The stack is fitted against the normalized channel (the wavefront
    // structure); rates are then evaluated on the configured gain mode, so
    // path loss enters the link budget but not the fitting target.
    ChannelSet fit, metric;
    ZfTarget target;
    try {
        fit = farfield ? farfield_channel(scene, config.far_reference_distance_m,
                                          GainMode::normalized, config.path_loss_alpha)
                       : nearfield_channel(scene, GainMode::normalized, config.path_loss_alpha);
        if (config.gain_mode == GainMode::normalized)
            metric = fit;
        else
            metric = farfield ? farfield_channel(scene, config.far_reference_distance_m,
                                                 GainMode::physical, config.path_loss_alpha)
                              : nearfield_channel(scene, GainMode::physical, config.path_loss_alpha);
        target = zf_target(fit.matrix);
    } catch (const std::exception& e) {
        for (Scheme scheme : config.schemes) {
            TrialResult failed = base;
            failed.scheme = scheme;
            failed.failed = true;
            failed.error = e.what();
            results.push_back(std::move(failed));
        }
        return results;
    }

    const Eigen::VectorXd noise =
        Eigen::VectorXd::Constant(scene.user_count(), config.noise_power_w);

    // codebook selection shared between the codebook scheme and the
    // proposed scheme's initialization
    std::optional<CodebookSelection> selection;
    auto ensure_selection = [&]() -> const CodebookSelection& {
        if (!selection) {
            Rng rng(derive_seed(seed, kCodebookStream));
            selection = codebook_init(config.optimizer.codebook_size, rng, *prop, target,
                                      fit.matrix, config.amplitude_mode, config.amplitude_model);
        }
        return *selection;
    };

    for (Scheme scheme : config.schemes) {
        TrialResult row = base;
        row.scheme = scheme;
        try {
            SchemeOutcome outcome;
            switch (scheme) {
                case Scheme::zf_oracle: {
                    outcome.response = target.precoder;
                    outcome.nmse_value = nmse(end_to_end(fit.matrix, outcome.response), target);
                    break;
                }
                case Scheme::random_one: {
                    Rng rng(derive_seed(seed, kRandomStream));
                    SimState state(uniform_phases(scene.layer_count(), scene.atoms_per_layer(), rng),
                                   config.amplitude_mode, config.amplitude_model);
                    outcome.response = sim_response(state, *prop);
                    outcome.nmse_value = nmse(end_to_end(fit.matrix, outcome.response), target);
                    break;
                }
                case Scheme::codebook: {
                    const CodebookSelection& sel = ensure_selection();
                    outcome.response = sim_response(sel.state, *prop);
                    outcome.nmse_value = sel.nmse_value;
                    break;
                }
                case Scheme::proposed: {
                    OptimizerConfig opt = config.optimizer;
                    opt.seed = derive_seed(seed, kCodebookStream);
                    const OptimizerReport report =
                        optimize_from(opt, ensure_selection(), *prop, target, fit.matrix);
                    outcome.response = sim_response(report.best_state, *prop);
                    outcome.nmse_value = report.best_nmse;
                    outcome.iterations = report.iterations;
                    break;
                }
            }

            const Eigen::MatrixXcd q = end_to_end(metric.matrix, outcome.response);
            Eigen::VectorXd powers;
            if (config.uniform_power)
                powers = Eigen::VectorXd::Constant(scene.user_count(),
                                                   config.total_power_w / scene.user_count());
            else
                powers = water_filling(q, noise, config.total_power_w).powers;
            const Eigen::VectorXd gammas = sinr(q, powers, noise);

            row.nmse = outcome.nmse_value;
            row.iterations = outcome.iterations;
            row.sum_rate_bps_hz = sum_rate(gammas);
            row.min_sinr_db = 10.0 * std::log10(gammas.minCoeff());
            row.max_sinr_db = 10.0 * std::log10(gammas.maxCoeff());
            row.sinrs = gammas;
            row.powers = powers;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        results.push_back(std::move(row));
    }
    return results;
}

/// One sweep point: all trials in parallel, rows flattened in trial order.
std::vector<TrialResult> run_point(const ExperimentConfig& config, bool farfield) {
    Rng scratch(derive_seed(trial_seed(config.master_seed, 0), kUeStream));
    const SceneGeometry reference = build_scene(scene_for(config), scratch);
    const PropagationSet prop = build_propagation(reference);

    std::vector<std::vector<TrialResult>> per_trial(static_cast<std::size_t>(config.trials));
    run_indexed(config.trials, config.workers, [&](int i) {
        per_trial[static_cast<std::size_t>(i)] = run_trial_impl(config, i, &prop, farfield);
    });

    std::vector<TrialResult> rows;
    rows.reserve(per_trial.size() * config.schemes.size());
    for (auto& trial_rows : per_trial)
        for (auto& row : trial_rows) rows.push_back(std::move(row));
    return rows;
}

} // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

std::vector<TrialResult> run_trial(const ExperimentConfig& config, int trial_index,
                                   const PropagationSet* shared_prop) {
    return run_trial_impl(config, trial_index, shared_prop, false);
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows, bool sweep_over_users) {
    std::vector<SummaryRow> summary;
    auto cell = [&](Scheme scheme, int value) -> SummaryRow& {
        for (auto& row : summary)
            if (row.scheme == scheme && row.sweep_value == value) return row;
        summary.push_back(SummaryRow{scheme, value, 0, 0.0, 0.0, 0.0, 0.0});
        return summary.back();
    };
    // two passes: means, then population deviations
    for (const auto& row : rows) {
        if (row.failed) continue;
        auto& s = cell(row.scheme, sweep_over_users ? row.users : row.layers);
        s.trials += 1;
        s.nmse_mean += row.nmse;
        s.sum_rate_mean += row.sum_rate_bps_hz;
    }
    for (auto& s : summary) {
        if (s.trials == 0) continue;
        s.nmse_mean /= s.trials;
        s.sum_rate_mean /= s.trials;
    }
    for (const auto& row : rows) {
        if (row.failed) continue;
        auto& s = cell(row.scheme, sweep_over_users ? row.users : row.layers);
        const double dn = row.nmse - s.nmse_mean;
        const double dr = row.sum_rate_bps_hz - s.sum_rate_mean;
        s.nmse_std += dn * dn;
        s.sum_rate_std += dr * dr;
    }
    for (auto& s : summary) {
        if (s.trials == 0) continue;
        s.nmse_std = std::sqrt(s.nmse_std / s.trials);
        s.sum_rate_std = std::sqrt(s.sum_rate_std / s.trials);
    }
    return summary;
}

SweepResult sweep_layers(const ExperimentConfig& config) {
    SweepResult result;
    result.sweep_key = "L";
    for (int layers : config.layer_sweep) {
        ExperimentConfig point = config;
        point.layers = layers;
        auto rows = run_point(point, false);
        result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()),
                           std::make_move_iterator(rows.end()));
    }
    result.summary = summarize(result.rows, false);
    return result;
}

SweepResult sweep_users(const ExperimentConfig& config) {
    SweepResult result;
    result.sweep_key = "K";
    for (int users : config.user_sweep) {
        ExperimentConfig point = config;
        point.users = users;
        auto rows = run_point(point, false);
        result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()),
                           std::make_move_iterator(rows.end()));
    }
    result.summary = summarize(result.rows, true);
    return result;
}

CompareFieldResult compare_field(const ExperimentConfig& config) {
    ExperimentConfig forced = config;
    forced.gain_mode = GainMode::normalized; // isolate the wavefront geometry
    CompareFieldResult result;
    result.nearfield.sweep_key = "L";
    result.farfield.sweep_key = "L";
    for (int layers : forced.layer_sweep) {
        ExperimentConfig point = forced;
        point.layers = layers;
        auto near_rows = run_point(point, false);
        auto far_rows = run_point(point, true);
        result.nearfield.rows.insert(result.nearfield.rows.end(),
                                     std::make_move_iterator(near_rows.begin()),
                                     std::make_move_iterator(near_rows.end()));
        result.farfield.rows.insert(result.farfield.rows.end(),
                                    std::make_move_iterator(far_rows.begin()),
                                    std::make_move_iterator(far_rows.end()));
    }
    result.nearfield.summary = summarize(result.nearfield.rows, false);
    result.farfield.summary = summarize(result.farfield.rows, false);
    for (const auto& near : result.nearfield.summary) {
        if (near.scheme != Scheme::proposed) continue;
        for (const auto& far : result.farfield.summary)
            if (far.scheme == Scheme::proposed && far.sweep_value == near.sweep_value)
                result.ratio_by_layers.emplace_back(near.sweep_value,
                                                    near.sum_rate_mean / far.sum_rate_mean);
    }
    return result;
}

HeatmapResult run_heatmap(const ExperimentConfig& config) {
    if (config.users != 4)
        throw std::invalid_argument("run_heatmap: the beamfocusing layout uses exactly 4 users");
    const double spacing = config.heatmap_ue_spacing_m;
    if (spacing <= 0.0) throw std::invalid_argument("run_heatmap: spacing must be positive");

    HeatmapResult result;
    for (int k = 0; k < config.users; ++k)
        result.ue_positions.emplace_back(0.0, spacing * (k + 1), 0.0);

    auto arm_config = [&](int layers) {
        ExperimentConfig c = config;
        c.layers = layers;
        return c;
    };
    auto scene_with_ues = [&](const ExperimentConfig& c) {
        SceneConfig scene = scene_for(c);
        // users share one azimuth (the y-axis) and differ in range; the
        // placement disk just spans the line
        scene.ue_center_x_m = 0.0;
        scene.ue_center_y_m = spacing * (config.users + 1) / 2.0;
        scene.ue_radius_m = spacing * (config.users - 1) / 2.0;
        return build_scene(scene, result.ue_positions);
    };
    const HeatmapSpec grid_spec{-2.5, 2.5,  config.heatmap_nx,
                                0.0,  10.0, config.heatmap_ny,
                                config.heatmap_energy};

    auto finish_arm = [&](const SceneGeometry& scene, const Eigen::MatrixXcd& response,
                          HeatmapArm arm) {
        arm.grid = heatmap(scene, response, grid_spec);
        arm.ue_energy.resize(config.users, config.users);
        for (int j = 0; j < config.users; ++j) {
            const Eigen::VectorXcd h = sample_column(scene, result.ue_positions[j]);
            for (int k = 0; k < config.users; ++k)
                arm.ue_energy(j, k) = std::norm(h.dot(response.col(k)));
        }
        result.arms.push_back(std::move(arm));
    };

    for (int layers : config.heatmap_layers) {
        const ExperimentConfig c = arm_config(layers);
        const SceneGeometry scene = scene_with_ues(c);
        const PropagationSet prop = build_propagation(scene);
        const ChannelSet fit = nearfield_channel(scene, GainMode::normalized, c.path_loss_alpha);
        const ZfTarget target = zf_target(fit.matrix);
        OptimizerConfig opt = c.optimizer;
        opt.seed = derive_seed(config.master_seed, 100 + static_cast<std::uint64_t>(layers));
        const OptimizerReport report =
            optimize(opt, prop, target, fit.matrix, c.amplitude_mode, c.amplitude_model);
        HeatmapArm arm;
        arm.label = "L" + std::to_string(layers);
        arm.layers = layers;
        arm.nmse = report.best_nmse;
        arm.iterations = report.iterations;
        finish_arm(scene, sim_response(report.best_state, prop), std::move(arm));
    }

    // digital zero-forcing arm, evaluated at the deepest requested stack
    {
        const int layers = *std::max_element(config.heatmap_layers.begin(),
                                             config.heatmap_layers.end());
        const ExperimentConfig c = arm_config(layers);
        const SceneGeometry scene = scene_with_ues(c);
        const ChannelSet fit = nearfield_channel(scene, GainMode::normalized, c.path_loss_alpha);
        const ZfTarget target = zf_target(fit.matrix);
        HeatmapArm arm;
        arm.label = "zf";
        arm.layers = 0;
        arm.nmse = 0.0;
        arm.iterations = 0;
        finish_arm(scene, target.precoder, std::move(arm));
    }
    return result;
}

GradCheckReport gradcheck(const ExperimentConfig& config, bool corrupt, double tolerance) {
    ExperimentConfig small = config;
    small.users = 2;
    small.atoms_per_side = 2;
    small.layers = 2;

    const std::uint64_t seed = trial_seed(small.master_seed, 0);
    Rng ue_rng(derive_seed(seed, kUeStream));
    const SceneGeometry scene = build_scene(scene_for(small), ue_rng);
    const PropagationSet prop = build_propagation(scene);
    const ChannelSet fit = nearfield_channel(scene, GainMode::normalized, small.path_loss_alpha);
    const ZfTarget target = zf_target(fit.matrix);

    Rng state_rng(derive_seed(seed, kRandomStream));
    const SimState state(uniform_phases(scene.layer_count(), scene.atoms_per_layer(), state_rng),
                         small.amplitude_mode, small.amplitude_model);

    Eigen::ArrayXXd analytic = gradient(state, prop, target, fit.matrix);
    if (corrupt) analytic(0, 0) += 1e-3;
    const Eigen::ArrayXXd numeric = finite_difference_gradient(state, prop, target, fit.matrix);

    GradCheckReport report;
    report.layers = scene.layer_count();
    report.atoms = scene.atoms_per_layer();
    report.tolerance = tolerance;
    for (Eigen::Index l = 0; l < analytic.rows(); ++l)
        for (Eigen::Index m = 0; m < analytic.cols(); ++m) {
            const double a = analytic(l, m);
            const double n = numeric(l, m);
            const double denom = std::max({std::abs(a), std::abs(n), 1e-10});
            report.max_rel_error = std::max(report.max_rel_error, std::abs(a - n) / denom);
        }
    report.pass = report.max_rel_error < tolerance;
    return report;
}

} // namespace simfocus
