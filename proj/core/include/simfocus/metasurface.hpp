#pragma once

#include <Eigen/Core>
#include <complex>
#include <numbers>
#include <vector>

namespace simfocus {

using cplx = std::complex<double>;

/// Equivalent RLC circuit of one varactor-tuned meta-atom: a bottom
/// inductance in parallel with the series branch (top inductance,
/// capacitance, resistance).
struct MetaAtomCircuit {
    double capacitance_f = 2.35e-12;
    double resistance_ohm = 2.5;
    double inductance_bottom_h = 2.5e-9;
    double inductance_top_h = 0.7e-9;
    double free_space_impedance_ohm = 376.73;
};

/// Circuit impedance at frequency f:
///   Z = jwL1 * B / (jwL1 + B),  B = jwL2 + 1/(jwC) + R,  w = 2*pi*f.
/// Throws std::domain_error at the parallel resonance jwL1 + B = 0 and
/// std::invalid_argument for non-positive f or C.
cplx impedance(const MetaAtomCircuit& circuit, double frequency_hz);

/// Complex diffraction coefficient Gamma = (Z - Z0) / (Z + Z0).
/// |Gamma| <= 1 for any passive circuit (R >= 0).
cplx diffraction_coefficient(const MetaAtomCircuit& circuit, double frequency_hz);

/// Smooth coupled amplitude-phase response of a meta-atom:
///   a(theta) = (1 - a_min) * ((sin(theta - offset) + 1) / 2)^curvature + a_min
/// mapping any phase to an amplitude in [a_min, 1].
struct AmplitudeModel {
    double min_amplitude = 0.2;                        ///< a_min
    double phase_offset_rad = 0.43 * std::numbers::pi;
    double curvature = 1.6;
};

/// Evaluates the coupled amplitude model; result in [a_min, 1].
double amplitude_of_phase(const AmplitudeModel& model, double theta);

/// Exact derivative d a / d theta of amplitude_of_phase:
///   (1 - a_min) * (curvature / 2) * cos(theta - offset)
///     * ((sin(theta - offset) + 1) / 2)^(curvature - 1).
/// Defined everywhere for curvature >= 1.
double amplitude_phase_derivative(const AmplitudeModel& model, double theta);

/// Whether meta-atom amplitudes follow the coupled model or are pinned to 1.
enum class AmplitudeMode { coupled, ideal };

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double theta);

/// The per-atom phase configuration of the whole stack: an L x M matrix of
/// phases in [0, 2*pi), plus the amplitude model that turns each phase into
/// a complex diffraction coefficient a(theta) * e^{j theta}.
///
/// A SimState is a value: the optimizer owns and mutates its copy; copies
/// may be evaluated concurrently.
class SimState {
  public:
    SimState(int layers, int atoms_per_layer, AmplitudeMode mode, AmplitudeModel model = {});

    /// Builds from explicit phases (wrapped into [0, 2*pi) on ingestion).
    SimState(Eigen::ArrayXXd phases, AmplitudeMode mode, AmplitudeModel model = {});

    int layer_count() const { return static_cast<int>(phases_.rows()); }
    int atoms_per_layer() const { return static_cast<int>(phases_.cols()); }
    AmplitudeMode mode() const { return mode_; }
    const AmplitudeModel& model() const { return model_; }

    const Eigen::ArrayXXd& phases() const { return phases_; }
    /// Replaces all phases, wrapping each into [0, 2*pi).
    void set_phases(const Eigen::ArrayXXd& phases);

    /// Diagonal of the layer response matrix Phi^l (1-based l): entries
    /// a(theta) e^{j theta} in coupled mode, e^{j theta} in ideal mode.
    /// Throws std::out_of_range for l outside [1, L].
    Eigen::VectorXcd layer_diagonal(int l) const;

    /// Amplitudes of layer l, in [a_min, 1] (coupled) or exactly 1 (ideal).
    Eigen::ArrayXd layer_amplitudes(int l) const;

  private:
    Eigen::ArrayXXd phases_; ///< L x M, each entry in [0, 2*pi)
    AmplitudeMode mode_;
    AmplitudeModel model_;
};

/// One sample of the achievable response of the tunable circuit.
struct AmplitudePhaseSample {
    double capacitance_f;
    double amplitude;   ///< |Gamma|
    double phase_rad;   ///< arg Gamma wrapped into [0, 2*pi)
};

/// Sweeps the capacitance grid and records the achievable (amplitude,
/// phase) pairs of the circuit at frequency f. Diagnostic utility for
/// comparing the circuit response with the smooth amplitude model.
std::vector<AmplitudePhaseSample>
sweep_capacitance(const MetaAtomCircuit& base, const std::vector<double>& capacitance_grid_f,
                  double frequency_hz);

/// Max absolute deviation between the swept circuit amplitudes and the
/// amplitude model evaluated at the matching circuit phases.
double amplitude_model_deviation(const std::vector<AmplitudePhaseSample>& sweep,
                                 const AmplitudeModel& model);

} // namespace simfocus
