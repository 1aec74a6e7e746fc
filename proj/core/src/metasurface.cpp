#include "simfocus/metasurface.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simfocus {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double wrap_two_pi(double theta) {
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0; // fmod rounding can land exactly on 2*pi
    return w;
}

cplx impedance(const MetaAtomCircuit& c, double frequency_hz) {
    if (frequency_hz <= 0.0) throw std::invalid_argument("impedance: frequency must be positive");
    if (c.capacitance_f <= 0.0) throw std::invalid_argument("impedance: capacitance must be positive");
    const double w = two_pi * frequency_hz;
    const cplx jwl1(0.0, w * c.inductance_bottom_h);
    // series branch: top inductance, capacitance, resistance
    const cplx branch(c.resistance_ohm, w * c.inductance_top_h - 1.0 / (w * c.capacitance_f));
    const cplx denom = jwl1 + branch;
    if (std::abs(denom) < 1e-9 * std::max(std::abs(jwl1), std::abs(branch)))
        throw std::domain_error("impedance: parallel resonance");
    return jwl1 * branch / denom;
}

cplx diffraction_coefficient(const MetaAtomCircuit& c, double frequency_hz) {
    const cplx z = impedance(c, frequency_hz);
    const cplx denom = z + c.free_space_impedance_ohm;
    if (std::abs(denom) == 0.0) throw std::domain_error("diffraction_coefficient: Z = -Z0");
    return (z - c.free_space_impedance_ohm) / denom;
}

double amplitude_of_phase(const AmplitudeModel& m, double theta) {
    const double s = 0.5 * (std::sin(theta - m.phase_offset_rad) + 1.0);
    return (1.0 - m.min_amplitude) * std::pow(s, m.curvature) + m.min_amplitude;
}

double amplitude_phase_derivative(const AmplitudeModel& m, double theta) {
    const double delta = theta - m.phase_offset_rad;
    const double s = 0.5 * (std::sin(delta) + 1.0);
    return (1.0 - m.min_amplitude) * 0.5 * m.curvature * std::cos(delta)
           * std::pow(s, m.curvature - 1.0);
}

SimState::SimState(int layers, int atoms_per_layer, AmplitudeMode mode, AmplitudeModel model)
    : phases_(Eigen::ArrayXXd::Zero(layers, atoms_per_layer)), mode_(mode), model_(model) {
    if (layers < 1 || atoms_per_layer < 1)
        throw std::invalid_argument("SimState: dimensions must be >= 1");
}

SimState::SimState(Eigen::ArrayXXd phases, AmplitudeMode mode, AmplitudeModel model)
    : phases_(std::move(phases)), mode_(mode), model_(model) {
    if (phases_.rows() < 1 || phases_.cols() < 1)
        throw std::invalid_argument("SimState: dimensions must be >= 1");
    phases_ = phases_.unaryExpr([](double t) { return wrap_two_pi(t); });
}

void SimState::set_phases(const Eigen::ArrayXXd& phases) {
    if (phases.rows() != phases_.rows() || phases.cols() != phases_.cols())
        throw std::invalid_argument("SimState: phase matrix shape mismatch");
    phases_ = phases.unaryExpr([](double t) { return wrap_two_pi(t); });
}

Eigen::VectorXcd SimState::layer_diagonal(int l) const {
    if (l < 1 || l > layer_count()) throw std::out_of_range("layer index out of range");
    const auto row = phases_.row(l - 1);
    Eigen::VectorXcd diag(atoms_per_layer());
    if (mode_ == AmplitudeMode::ideal) {
        for (Eigen::Index m = 0; m < diag.size(); ++m)
            diag[m] = std::polar(1.0, row[m]);
    } else {
        for (Eigen::Index m = 0; m < diag.size(); ++m)
            diag[m] = std::polar(amplitude_of_phase(model_, row[m]), row[m]);
    }
    return diag;
}

Eigen::ArrayXd SimState::layer_amplitudes(int l) const {
    if (l < 1 || l > layer_count()) throw std::out_of_range("layer index out of range");
    if (mode_ == AmplitudeMode::ideal) return Eigen::ArrayXd::Ones(atoms_per_layer());
    return phases_.row(l - 1)
        .unaryExpr([this](double t) { return amplitude_of_phase(model_, t); })
        .transpose();
}

std::vector<AmplitudePhaseSample> sweep_capacitance(const MetaAtomCircuit& base,
                                                    const std::vector<double>& capacitance_grid_f,
                                                    double frequency_hz) {
    std::vector<AmplitudePhaseSample> sweep;
    sweep.reserve(capacitance_grid_f.size());
    MetaAtomCircuit c = base;
    for (double cap : capacitance_grid_f) {
        c.capacitance_f = cap;
        const cplx g = diffraction_coefficient(c, frequency_hz);
        sweep.push_back({cap, std::abs(g), wrap_two_pi(std::arg(g))});
    }
    return sweep;
}

double amplitude_model_deviation(const std::vector<AmplitudePhaseSample>& sweep,
                                 const AmplitudeModel& model) {
    double dev = 0.0;
    for (const auto& s : sweep)
        dev = std::max(dev, std::abs(s.amplitude - amplitude_of_phase(model, s.phase_rad)));
    return dev;
}

} // namespace simfocus
