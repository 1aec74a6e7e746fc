#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simfocus/allocation.hpp"
#include "simfocus/channel.hpp"
#include "simfocus/geometry.hpp"
#include "simfocus/metasurface.hpp"
#include "simfocus/optimizer.hpp"

namespace simfocus {

/// Transmit schemes evaluated per trial.
enum class Scheme {
    proposed,   ///< codebook initialization + gradient descent
    codebook,   ///< best of T random candidates only
    random_one, ///< a single random configuration
    zf_oracle   ///< fully digital zero-forcing response, upper reference
};

std::string scheme_label(Scheme s);           ///< "proposed" / "codebook" / "random" / "zf-oracle"
Scheme scheme_from_label(const std::string&); ///< throws std::invalid_argument on unknown label

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Built-in parameter profiles: the full-scale setup and a desk-scale one
/// sized for fast runs.
enum class Profile { paper, desk };

/// Everything one experiment needs. Spacings are stored as multiples of
/// the wavelength; dBm inputs are converted to watts once, at ingestion.
struct ExperimentConfig {
    // scene
    double wavelength_m = 0.03;
    double frequency_hz = 1e10;     ///< drives the meta-atom circuit model
    int bs_rows = 2;
    int bs_cols = 2;
    int layers = 12;                ///< L
    int atoms_per_side = 15;        ///< M = side^2
    int users = 4;                  ///< K; S = K is enforced per trial
    double d_s_factor = 1.0;        ///< antenna spacing / wavelength
    double d_m_factor = 1.0;        ///< atom spacing / wavelength
    double d_l_factor = 1.2;        ///< layer spacing / wavelength
    double height_m = 3.0;
    double ue_center_x_m = 3.0;
    double ue_center_y_m = 3.0;
    double ue_radius_m = 3.0;

    // meta-atom response
    AmplitudeModel amplitude_model;
    AmplitudeMode amplitude_mode = AmplitudeMode::coupled;

    // optimizer
    OptimizerConfig optimizer;

    // link budget
    double p_t_dbm = 5.0;
    double noise_dbm = -120.0;
    double total_power_w = dbm_to_watts(5.0);
    double noise_power_w = dbm_to_watts(-120.0);
    double path_loss_alpha = 2.8;
    GainMode gain_mode = GainMode::physical;

    // orchestration
    int trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<Scheme> schemes = {Scheme::proposed, Scheme::codebook, Scheme::random_one,
                                   Scheme::zf_oracle};
    std::vector<int> layer_sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<int> user_sweep = {1, 2, 3, 4, 5, 6};
    double far_reference_distance_m = 150.0;
    bool uniform_power = false;     ///< skip water-filling, use P_T / K per user
    int workers = 0;                ///< 0 = hardware concurrency
    std::string out_dir = "out";

    // heatmap experiment
    double heatmap_ue_spacing_m = 1.5;
    int heatmap_nx = 50;
    int heatmap_ny = 100;
    EnergyMode heatmap_energy = EnergyMode::incoherent;
    std::vector<int> heatmap_layers = {1, 2, 4};

    /// Scene parameters for the current (layers, users) point.
    SceneConfig scene_config() const;
    /// Circuit constants used by diagnostics.
    MetaAtomCircuit circuit() const { return MetaAtomCircuit{}; }
};

/// Profile defaults: paper -> 15x15 atoms, 12 layers, 100 trials;
/// desk -> 7x7 atoms, 6 layers, 20 trials.
ExperimentConfig default_config(Profile profile);

/// Parses a flat key-value file ("key = value", '#' comments) and applies
/// it over `base`. Unknown keys and malformed values throw
/// std::invalid_argument with the offending line. dBm entries are
/// converted to watts here.
ExperimentConfig apply_config_file(const ExperimentConfig& base, const std::string& path);

/// Applies a single "key = value" assignment (same keys as the file).
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

} // namespace simfocus
