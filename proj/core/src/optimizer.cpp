#include "simfocus/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simfocus {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Shared evaluation state for one (propagation, target, channel) triple.
/// Caches the per-layer pre-diagonal partial products
///   T^l = W^l Phi^{l-1} W^{l-1} ... Phi^1 W^1   (T^1 = W^1, M x S)
/// of the forward sweep, and the per-layer diagonal data of the loaded
/// state, so the backward sweep can assemble the full gradient in
/// O(M K^2) per layer instead of re-chaining products per atom.
class FitEngine {
  public:
    FitEngine(const PropagationSet& prop, const ZfTarget& target, const Eigen::MatrixXcd& channel)
        : prop_(prop), target_(target), channel_(channel) {
        if (channel_.rows() != prop_.atoms_per_layer())
            throw std::invalid_argument("optimizer: channel and propagation dimensions differ");
        if (target_.target_energy <= 0.0)
            throw std::domain_error("optimizer: target energy must be positive");
        const int layers = prop_.layer_count();
        pre_diag_.resize(static_cast<std::size_t>(layers));
        phase_unit_.resize(static_cast<std::size_t>(layers));
        amplitude_.resize(static_cast<std::size_t>(layers));
        amp_deriv_.resize(static_cast<std::size_t>(layers));
        diagonal_.resize(static_cast<std::size_t>(layers));
    }

    /// Refreshes the cached diagonal data from the state's phases.
    void load(const SimState& state) {
        if (state.layer_count() != prop_.layer_count() ||
            state.atoms_per_layer() != prop_.atoms_per_layer())
            throw std::invalid_argument("optimizer: state and propagation dimensions differ");
        const auto& model = state.model();
        const bool coupled = state.mode() == AmplitudeMode::coupled;
        const int atoms = prop_.atoms_per_layer();
        for (int l = 0; l < prop_.layer_count(); ++l) {
            auto& unit = phase_unit_[static_cast<std::size_t>(l)];
            auto& amp = amplitude_[static_cast<std::size_t>(l)];
            auto& deriv = amp_deriv_[static_cast<std::size_t>(l)];
            auto& diag = diagonal_[static_cast<std::size_t>(l)];
            unit.resize(atoms);
            amp.resize(atoms);
            deriv.resize(atoms);
            diag.resize(atoms);
            for (int m = 0; m < atoms; ++m) {
                const double theta = state.phases()(l, m);
                unit[m] = std::polar(1.0, theta);
                if (coupled) {
                    amp[m] = amplitude_of_phase(model, theta);
                    deriv[m] = amplitude_phase_derivative(model, theta);
                } else {
                    amp[m] = 1.0;
                    deriv[m] = 0.0;
                }
                diag[m] = amp[m] * unit[m];
            }
        }
    }

    /// Forward sweep; returns the fitting error at the loaded state.
    double forward() {
        const int layers = prop_.layer_count();
        pre_diag_[0] = prop_.bs_to_first();
        current_ = diagonal_[0].asDiagonal() * pre_diag_[0];
        for (int l = 2; l <= layers; ++l) {
            auto& pre = pre_diag_[static_cast<std::size_t>(l - 1)];
            pre.noalias() = prop_.between_layers(l) * current_;
            current_ = diagonal_[static_cast<std::size_t>(l - 1)].asDiagonal() * pre;
        }
        q_.noalias() = channel_.adjoint() * current_;
        error_ = q_ - target_.target;
        return error_.squaredNorm() / target_.target_energy;
    }

    /// Backward sweep over the partials of the last forward() call.
    Eigen::ArrayXXd backward() {
        const int layers = prop_.layer_count();
        const int atoms = prop_.atoms_per_layer();
        const double scale = 2.0 / target_.target_energy;
        Eigen::ArrayXXd grad(layers, atoms);
        Eigen::MatrixXcd left = channel_.adjoint(); // K x M partial, layer diagonal removed
        Eigen::MatrixXcd weighted;                  // error folded with the right partial
        for (int l = layers; l >= 1; --l) {
            const auto& pre = pre_diag_[static_cast<std::size_t>(l - 1)];
            weighted.noalias() = error_ * pre.adjoint(); // K x M
            const Eigen::RowVectorXcd sensitivity =
                left.conjugate().cwiseProduct(weighted).colwise().sum();
            const auto& unit = phase_unit_[static_cast<std::size_t>(l - 1)];
            for (int m = 0; m < atoms; ++m) {
                const cplx c = std::conj(unit[m]) * sensitivity[m];
                grad(l - 1, m) = scale * (amplitude_[static_cast<std::size_t>(l - 1)][m] * c.imag()
                                          + amp_deriv_[static_cast<std::size_t>(l - 1)][m] * c.real());
            }
            if (l > 1) {
                left = left * diagonal_[static_cast<std::size_t>(l - 1)].asDiagonal();
                left = left * prop_.between_layers(l);
            }
        }
        return grad;
    }

    /// Left partial H^H Phi^L W^L ... Phi^{l+1} W^{l+1} (K x M).
    Eigen::MatrixXcd left_partial(int l) const {
        Eigen::MatrixXcd left = channel_.adjoint();
        for (int j = prop_.layer_count(); j > l; --j) {
            left = left * diagonal_[static_cast<std::size_t>(j - 1)].asDiagonal();
            left = left * prop_.between_layers(j);
        }
        return left;
    }

    const Eigen::MatrixXcd& pre_diag(int l) const {
        return pre_diag_[static_cast<std::size_t>(l - 1)];
    }
    const Eigen::MatrixXcd& response() const { return current_; }
    const Eigen::MatrixXcd& q() const { return q_; }

  private:
    const PropagationSet& prop_;
    const ZfTarget& target_;
    const Eigen::MatrixXcd& channel_;
    std::vector<Eigen::MatrixXcd> pre_diag_;
    std::vector<Eigen::VectorXcd> phase_unit_;
    std::vector<Eigen::ArrayXd> amplitude_;
    std::vector<Eigen::ArrayXd> amp_deriv_;
    std::vector<Eigen::VectorXcd> diagonal_;
    Eigen::MatrixXcd current_;
    Eigen::MatrixXcd q_;
    Eigen::MatrixXcd error_;
};

Eigen::ArrayXXd draw_uniform_phases(int layers, int atoms, Rng& rng) {
    Eigen::ArrayXXd phases(layers, atoms);
    for (int l = 0; l < layers; ++l)
        for (int m = 0; m < atoms; ++m) phases(l, m) = rng.uniform(0.0, two_pi);
    return phases;
}

} // namespace

double nmse(const Eigen::MatrixXcd& end_to_end_channel, const ZfTarget& target) {
    if (target.target_energy <= 0.0) throw std::domain_error("nmse: target energy must be positive");
    if (end_to_end_channel.rows() != target.target.rows() ||
        end_to_end_channel.cols() != target.target.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    return (end_to_end_channel - target.target).squaredNorm() / target.target_energy;
}

Eigen::MatrixXcd cascaded_channel(const SimState& state, const PropagationSet& prop,
                                  const Eigen::MatrixXcd& channel, int l, int m) {
    if (l < 1 || l > prop.layer_count()) throw std::out_of_range("cascaded_channel: layer index");
    if (m < 1 || m > prop.atoms_per_layer()) throw std::out_of_range("cascaded_channel: atom index");
    ZfTarget dummy;
    dummy.target = Eigen::MatrixXcd::Zero(channel.cols(), prop.antenna_count());
    dummy.target_energy = 1.0;
    FitEngine engine(prop, dummy, channel);
    engine.load(state);
    engine.forward();
    const Eigen::MatrixXcd left = engine.left_partial(l);
    return left.col(m - 1) * engine.pre_diag(l).row(m - 1);
}

Eigen::ArrayXXd gradient(const SimState& state, const PropagationSet& prop, const ZfTarget& target,
                         const Eigen::MatrixXcd& channel) {
    FitEngine engine(prop, target, channel);
    engine.load(state);
    engine.forward();
    return engine.backward();
}

Eigen::ArrayXXd finite_difference_gradient(const SimState& state, const PropagationSet& prop,
                                           const ZfTarget& target, const Eigen::MatrixXcd& channel,
                                           double step) {
    FitEngine engine(prop, target, channel);
    Eigen::ArrayXXd grad(state.layer_count(), state.atoms_per_layer());
    SimState probe = state;
    Eigen::ArrayXXd phases = state.phases();
    for (int l = 0; l < state.layer_count(); ++l) {
        for (int m = 0; m < state.atoms_per_layer(); ++m) {
            const double original = phases(l, m);
            phases(l, m) = original + step;
            probe.set_phases(phases);
            engine.load(probe);
            const double up = engine.forward();
            phases(l, m) = original - step;
            probe.set_phases(phases);
            engine.load(probe);
            const double down = engine.forward();
            phases(l, m) = original;
            grad(l, m) = (up - down) / (2.0 * step);
        }
    }
    return grad;
}

Eigen::ArrayXXd normalize_gradient(const Eigen::ArrayXXd& grad, double floor) {
    Eigen::ArrayXXd out = grad;
    for (Eigen::Index l = 0; l < out.rows(); ++l) {
        const double sensitivity = out.row(l).abs().maxCoeff();
        if (sensitivity >= floor) out.row(l) *= std::numbers::pi / sensitivity;
    }
    return out;
}

CodebookSelection codebook_init(int size, Rng& rng, const PropagationSet& prop,
                                const ZfTarget& target, const Eigen::MatrixXcd& channel,
                                AmplitudeMode mode, AmplitudeModel model) {
    if (size < 1) throw std::invalid_argument("codebook_init: size must be >= 1");
    const int layers = prop.layer_count();
    const int atoms = prop.atoms_per_layer();
    FitEngine engine(prop, target, channel);
    SimState candidate(draw_uniform_phases(layers, atoms, rng), mode, model);
    engine.load(candidate);
    SimState best = candidate;
    double best_nmse = engine.forward();
    for (int t = 1; t < size; ++t) {
        candidate.set_phases(draw_uniform_phases(layers, atoms, rng));
        engine.load(candidate);
        const double value = engine.forward();
        if (value < best_nmse) {
            best_nmse = value;
            best = candidate;
        }
    }
    return CodebookSelection{std::move(best), best_nmse};
}

OptimizerReport optimize(const OptimizerConfig& config, const PropagationSet& prop,
                         const ZfTarget& target, const Eigen::MatrixXcd& channel,
                         AmplitudeMode mode, AmplitudeModel model) {
    Rng rng(config.seed);
    CodebookSelection init =
        codebook_init(config.codebook_size, rng, prop, target, channel, mode, model);
    return optimize_from(config, init, prop, target, channel);
}

OptimizerReport optimize_from(const OptimizerConfig& config, const CodebookSelection& init,
                              const PropagationSet& prop, const ZfTarget& target,
                              const Eigen::MatrixXcd& channel) {
    if (config.initial_learning_rate <= 0.0 || config.initial_learning_rate >= 1.0)
        throw std::invalid_argument("optimize: learning rate must lie in (0, 1)");
    if (config.decay_rate <= 0.0 || config.decay_rate >= 1.0)
        throw std::invalid_argument("optimize: decay rate must lie in (0, 1)");
    if (config.max_iterations < 0) throw std::invalid_argument("optimize: negative iteration cap");

    const auto start = std::chrono::steady_clock::now();
    OptimizerReport report{.nmse_trace = {init.nmse_value},
                           .best_nmse = init.nmse_value,
                           .best_state = init.state,
                           .iterations = 0,
                           .initial_nmse = init.nmse_value,
                           .wall_time_s = 0.0};

    FitEngine engine(prop, target, channel);
    SimState state = init.state;
    engine.load(state);
    engine.forward();

    double learning_rate = config.initial_learning_rate;
    double previous = init.nmse_value;
    int stalled = 0;
    for (int t = 1; t <= config.max_iterations; ++t) {
        const Eigen::ArrayXXd step =
            normalize_gradient(engine.backward(), config.gradient_floor);
        state.set_phases(state.phases() - learning_rate * step);
        learning_rate *= config.decay_rate;

        engine.load(state);
        const double value = engine.forward();
        report.nmse_trace.push_back(value);
        report.iterations = t;
        if (value < report.best_nmse) {
            report.best_nmse = value;
            report.best_state = state;
        }
        stalled = std::abs(value - previous) < config.stop_tolerance ? stalled + 1 : 0;
        if (stalled >= config.stop_patience) break;
        previous = value;
    }

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

FlopsBreakdown gda_flops(std::uint64_t iterations, std::uint64_t layers, std::uint64_t atoms,
                         std::uint64_t users, std::uint64_t antennas) {
    const std::uint64_t m3 = atoms * atoms * atoms;
    const std::uint64_t k2 = users * users;
    const std::uint64_t chain = (2 * layers - 2) * m3;
    FlopsBreakdown ops;
    ops.total = 4 * iterations * (chain + atoms * layers * k2);
    ops.forward = 4 * (chain + 2 * k2 * (atoms + 1) + atoms * atoms * antennas);
    ops.gradient = 4 * atoms * layers * k2;
    ops.regularization = 4 * atoms * layers;
    ops.update = atoms * layers;
    ops.learning_rate = 1;
    return ops;
}

} // namespace simfocus
