// Command-line front end: seeded Monte Carlo sweeps over the stacked
// metasurface simulator, CSV/grid emission, and the gradient self-check.

#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "simfocus/experiment.hpp"
#include "simfocus/io.hpp"
#include "simfocus/optimizer.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string profile = "paper";
    std::string out_dir;
    std::uint64_t seed = 0;
    int trials = 0;
    int workers = -1;
    bool uniform_power = false;
    bool seed_given = false;
    bool trials_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--profile", args.profile, "parameter profile")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--seed", args.seed, "master seed")->each([&](const std::string&) {
        args.seed_given = true;
    });
    cmd->add_option("--trials", args.trials, "trials per sweep point")
        ->each([&](const std::string&) { args.trials_given = true; });
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)");
    cmd->add_flag("--uniform-power", args.uniform_power,
                  "split the budget evenly instead of water-filling");
}

// precedence: profile defaults, subcommand defaults, config file, flags
simfocus::ExperimentConfig resolve(const CommonArgs& args,
                                   const std::function<void(simfocus::ExperimentConfig&)>& tweak =
                                       nullptr) {
    using namespace simfocus;
    ExperimentConfig config =
        default_config(args.profile == "desk" ? Profile::desk : Profile::paper);
    if (tweak) tweak(config);
    if (!args.config_path.empty()) config = apply_config_file(config, args.config_path);
    if (args.seed_given) config.master_seed = args.seed;
    if (args.trials_given) config.trials = args.trials;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (args.workers >= 0) config.workers = args.workers;
    if (args.uniform_power) config.uniform_power = true;
    return config;
}

std::string out_path(const simfocus::ExperimentConfig& config, const std::string& name) {
    return config.out_dir + "/" + name;
}

void print_summary(const std::vector<simfocus::SummaryRow>& summary, const std::string& key) {
    std::printf("%-10s %3s %7s %12s %14s\n", "scheme", key.c_str(), "trials", "nmse", "sum_rate");
    for (const auto& row : summary)
        std::printf("%-10s %3d %7d %12.4g %14.4f\n", simfocus::scheme_label(row.scheme).c_str(),
                    row.sweep_value, row.trials, row.nmse_mean, row.sum_rate_mean);
}

int run_sweep_layers(const CommonArgs& args) {
    using namespace simfocus;
    const ExperimentConfig config = resolve(args);
    const int atoms = config.atoms_per_side * config.atoms_per_side;
    for (int layers : config.layer_sweep) {
        const auto ops = gda_flops(static_cast<std::uint64_t>(config.optimizer.max_iterations),
                                   static_cast<std::uint64_t>(layers),
                                   static_cast<std::uint64_t>(atoms),
                                   static_cast<std::uint64_t>(config.users),
                                   static_cast<std::uint64_t>(config.users));
        std::printf("L=%-2d descent budget <= %llu real ops\n", layers,
                    static_cast<unsigned long long>(ops.total));
    }
    const SweepResult result = sweep_layers(config);
    write_file(out_path(config, "sweep_layers_results.csv"), trial_csv(result.rows));
    write_file(out_path(config, "sweep_layers_summary.csv"),
               summary_csv(result.summary, result.sweep_key));
    print_summary(result.summary, result.sweep_key);
    std::printf("wrote %s\n", out_path(config, "sweep_layers_results.csv").c_str());
    return 0;
}

int run_sweep_users(const CommonArgs& args) {
    using namespace simfocus;
    const ExperimentConfig config = resolve(args);
    const SweepResult result = sweep_users(config);
    write_file(out_path(config, "sweep_users_results.csv"), trial_csv(result.rows));
    write_file(out_path(config, "sweep_users_summary.csv"),
               summary_csv(result.summary, result.sweep_key));
    print_summary(result.summary, result.sweep_key);
    std::printf("wrote %s\n", out_path(config, "sweep_users_results.csv").c_str());
    return 0;
}

int run_compare_field(const CommonArgs& args) {
    using namespace simfocus;
    // the field comparison runs at a -40 dBm budget unless the config says otherwise
    const ExperimentConfig config = resolve(args, [](ExperimentConfig& c) {
        c.p_t_dbm = -40.0;
        c.total_power_w = dbm_to_watts(c.p_t_dbm);
    });
    const CompareFieldResult result = compare_field(config);
    write_file(out_path(config, "compare_field_near_results.csv"), trial_csv(result.nearfield.rows));
    write_file(out_path(config, "compare_field_far_results.csv"), trial_csv(result.farfield.rows));
    write_file(out_path(config, "compare_field_near_summary.csv"),
               summary_csv(result.nearfield.summary, "L"));
    write_file(out_path(config, "compare_field_far_summary.csv"),
               summary_csv(result.farfield.summary, "L"));
    std::string ratio = "L,near_over_far_sum_rate\n";
    for (const auto& [layers, value] : result.ratio_by_layers)
        ratio += std::to_string(layers) + "," + format_double(value) + "\n";
    write_file(out_path(config, "compare_field_ratio.csv"), ratio);
    std::printf("near field:\n");
    print_summary(result.nearfield.summary, "L");
    std::printf("far field (reference %.0f m):\n", config.far_reference_distance_m);
    print_summary(result.farfield.summary, "L");
    for (const auto& [layers, value] : result.ratio_by_layers)
        std::printf("L=%-2d near/far sum-rate ratio %.4f\n", layers, value);
    return 0;
}

int run_heatmap_cmd(const CommonArgs& args) {
    using namespace simfocus;
    const ExperimentConfig config = resolve(args);
    const HeatmapResult result = run_heatmap(config);
    std::string ues = "user,x_m,y_m\n";
    for (std::size_t k = 0; k < result.ue_positions.size(); ++k)
        ues += std::to_string(k) + "," + format_double(result.ue_positions[k].x()) + "," +
               format_double(result.ue_positions[k].y()) + "\n";
    write_file(out_path(config, "heatmap_ues.csv"), ues);
    for (const auto& arm : result.arms) {
        write_file(out_path(config, "heatmap_" + arm.label + ".dat"), heatmap_text(arm.grid));
        std::printf("arm %-3s nmse %.4g iterations %d -> %s\n", arm.label.c_str(), arm.nmse,
                    arm.iterations, out_path(config, "heatmap_" + arm.label + ".dat").c_str());
    }
    return 0;
}

int run_gradcheck(const CommonArgs& args, bool corrupt, double tolerance) {
    using namespace simfocus;
    const ExperimentConfig config = resolve(args);
    const GradCheckReport report = gradcheck(config, corrupt, tolerance);
    std::printf("gradient check on L=%d M=%d: max relative error %.3e (tolerance %.1e) -> %s\n",
                report.layers, report.atoms, report.max_rel_error, report.tolerance,
                report.pass ? "ok" : "FAILED");
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stacked-metasurface wave-domain beamfocusing simulator"};
    app.require_subcommand(1);

    CommonArgs sweep_layers_args, sweep_users_args, compare_args, heatmap_args, gradcheck_args;
    bool corrupt = false;
    double gradcheck_tolerance = 1e-5;

    auto* cmd_layers =
        app.add_subcommand("sweep-layers", "sum rate and fitting error vs layer count");
    add_common(cmd_layers, sweep_layers_args);

    auto* cmd_users = app.add_subcommand("sweep-users", "sum rate and fitting error vs user count");
    add_common(cmd_users, sweep_users_args);

    auto* cmd_compare =
        app.add_subcommand("compare-field", "paired near- vs far-field channel comparison");
    add_common(cmd_compare, compare_args);

    auto* cmd_heatmap = app.add_subcommand("heatmap", "beamfocusing energy maps");
    add_common(cmd_heatmap, heatmap_args);

    auto* cmd_gradcheck = app.add_subcommand("gradcheck", "analytic vs finite-difference gradient");
    add_common(cmd_gradcheck, gradcheck_args);
    cmd_gradcheck->add_flag("--corrupt", corrupt, "perturb the analytic gradient (negative control)")
        ->group("");
    cmd_gradcheck->add_option("--tolerance", gradcheck_tolerance, "max relative error to pass");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_layers->parsed()) return run_sweep_layers(sweep_layers_args);
        if (cmd_users->parsed()) return run_sweep_users(sweep_users_args);
        if (cmd_compare->parsed()) return run_compare_field(compare_args);
        if (cmd_heatmap->parsed()) return run_heatmap_cmd(heatmap_args);
        if (cmd_gradcheck->parsed()) return run_gradcheck(gradcheck_args, corrupt, gradcheck_tolerance);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
