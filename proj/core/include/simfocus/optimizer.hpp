#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "simfocus/channel.hpp"
#include "simfocus/metasurface.hpp"
#include "simfocus/propagation.hpp"
#include "simfocus/rng.hpp"

namespace simfocus {

struct OptimizerConfig {
    double initial_learning_rate = 0.99; ///< eta_0 in (0, 1)
    double decay_rate = 0.9;             ///< rho in (0, 1)
    int max_iterations = 200;
    double stop_tolerance = 1e-6;        ///< on |nmse_t - nmse_{t-1}|
    /// consecutive below-tolerance changes required to stop; early iterates
    /// oscillate, and a single coincidental small change is not convergence
    int stop_patience = 5;
    int codebook_size = 200;             ///< T
    std::uint64_t seed = 0;
    double gradient_floor = 1e-12;       ///< skip normalizing layers below this
};

struct OptimizerReport {
    std::vector<double> nmse_trace;  ///< initialization value followed by one entry per iteration
    double best_nmse = 0.0;
    SimState best_state;
    int iterations = 0;              ///< gradient steps executed
    double initial_nmse = 0.0;       ///< codebook selection value
    double wall_time_s = 0.0;
};

/// Normalized fitting error between the realized end-to-end channel and
/// the zero-forcing target: |Q - Lambda|_F^2 / tau. Throws std::domain_error
/// when the target energy is zero.
double nmse(const Eigen::MatrixXcd& end_to_end_channel, const ZfTarget& target);

/// Cascaded channel with layer l's diagonal removed at atom m: the K x S
/// matrix V with V[k, s] = (left partial row k at atom m) * (right partial
/// at atom m, antenna s). Re-inserting the diagonal reconstructs the
/// end-to-end channel: sum_m phi_m^l V_m = Q for every l.
Eigen::MatrixXcd cascaded_channel(const SimState& state, const PropagationSet& prop,
                                  const Eigen::MatrixXcd& channel, int l, int m);

/// Exact gradient of nmse(end_to_end(H, sim_response(state)), target) with
/// respect to every phase, using d(a e^{j theta})/d theta =
/// (da/dtheta + j a) e^{j theta}. In ideal amplitude mode the da/dtheta
/// term vanishes. Returns an L x M real matrix.
Eigen::ArrayXXd gradient(const SimState& state, const PropagationSet& prop,
                         const ZfTarget& target, const Eigen::MatrixXcd& channel);

/// Central finite-difference approximation of the same gradient (step h on
/// each phase, forward evaluations only). Independent of the analytic
/// gradient path; used by the gradient check.
Eigen::ArrayXXd finite_difference_gradient(const SimState& state, const PropagationSet& prop,
                                           const ZfTarget& target, const Eigen::MatrixXcd& channel,
                                           double step = 1e-6);

/// Per-layer gradient normalization: each row is scaled by pi / mu_l with
/// mu_l = max_m |grad[l, m]|, capping the largest per-layer step at pi.
/// Rows with mu_l below the floor are left unscaled.
Eigen::ArrayXXd normalize_gradient(const Eigen::ArrayXXd& grad, double floor = 1e-12);

struct CodebookSelection {
    SimState state;
    double nmse_value;
};

/// Draws `size` candidate states with i.i.d. uniform phases in [0, 2*pi)
/// and returns the one with the lowest fitting error. Deterministic given
/// the rng state.
CodebookSelection codebook_init(int size, Rng& rng, const PropagationSet& prop,
                                const ZfTarget& target, const Eigen::MatrixXcd& channel,
                                AmplitudeMode mode, AmplitudeModel model = {});

/// Gradient descent on the meta-atom phases: codebook initialization, then
/// iterate (gradient, per-layer normalization, step of size eta, phase
/// wrap, amplitude refresh, eta *= rho) until the fitting error stalls or
/// the iteration cap is reached. The best state seen is tracked and
/// returned; the raw per-iteration trace need not be monotone.
OptimizerReport optimize(const OptimizerConfig& config, const PropagationSet& prop,
                         const ZfTarget& target, const Eigen::MatrixXcd& channel,
                         AmplitudeMode mode, AmplitudeModel model = {});

/// Same descent from an already selected initialization. optimize() is
/// exactly codebook_init followed by this.
OptimizerReport optimize_from(const OptimizerConfig& config, const CodebookSelection& init,
                              const PropagationSet& prop, const ZfTarget& target,
                              const Eigen::MatrixXcd& channel);

/// Real-operation estimate of one optimization run, with the per-phase
/// breakdown of a single iteration.
struct FlopsBreakdown {
    std::uint64_t total;          ///< 4 I [(2L-2) M^3 + M L K^2]
    std::uint64_t forward;        ///< 4 [(2L-2) M^3 + 2 K^2 (M+1) + M^2 S]
    std::uint64_t gradient;       ///< 4 M L K^2
    std::uint64_t regularization; ///< 4 M L
    std::uint64_t update;         ///< M L
    std::uint64_t learning_rate;  ///< 1
};

FlopsBreakdown gda_flops(std::uint64_t iterations, std::uint64_t layers, std::uint64_t atoms,
                         std::uint64_t users, std::uint64_t antennas);

} // namespace simfocus
