#include "simfocus/allocation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simfocus {

Eigen::VectorXd sinr(const Eigen::MatrixXcd& q, const Eigen::VectorXd& powers,
                     const Eigen::VectorXd& noise_powers) {
    const Eigen::Index users = q.rows();
    if (q.cols() != users || powers.size() != users || noise_powers.size() != users)
        throw std::invalid_argument("sinr: shape mismatch");
    Eigen::VectorXd gammas(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        double interference = 0.0;
        for (Eigen::Index j = 0; j < users; ++j)
            if (j != k) interference += powers[j] * std::norm(q(k, j));
        gammas[k] = powers[k] * std::norm(q(k, k)) / (interference + noise_powers[k]);
    }
    return gammas;
}

double sum_rate(const Eigen::VectorXd& sinrs) {
    double rate = 0.0;
    for (Eigen::Index k = 0; k < sinrs.size(); ++k) rate += std::log2(1.0 + sinrs[k]);
    return rate;
}

namespace {

/// Water level kappa with sum_k (kappa - e_k)^+ = budget, by bisection.
double find_water_level(const Eigen::VectorXd& inverse_gains, double budget) {
    double lo = inverse_gains.minCoeff();
    double hi = inverse_gains.maxCoeff() + budget;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double poured = (mid - inverse_gains.array()).max(0.0).sum();
        if (poured < budget)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 0.0) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

PowerAllocation water_filling(const Eigen::MatrixXcd& q, const Eigen::VectorXd& noise_powers,
                              double total_power, int max_rounds, double tolerance) {
    const Eigen::Index users = q.rows();
    if (q.cols() != users || noise_powers.size() != users)
        throw std::invalid_argument("water_filling: shape mismatch");
    if (total_power <= 0.0) throw std::invalid_argument("water_filling: budget must be positive");
    for (Eigen::Index k = 0; k < users; ++k)
        if (std::norm(q(k, k)) == 0.0)
            throw std::invalid_argument("water_filling: zero diagonal gain");

    PowerAllocation alloc;
    alloc.total_power = total_power;
    alloc.powers = Eigen::VectorXd::Constant(users, total_power / static_cast<double>(users));
    alloc.converged = false;

    Eigen::VectorXd inverse_gains(users);
    for (int round = 1; round <= max_rounds; ++round) {
        // interference frozen at the previous iterate
        for (Eigen::Index k = 0; k < users; ++k) {
            double interference = 0.0;
            for (Eigen::Index j = 0; j < users; ++j)
                if (j != k) interference += alloc.powers[j] * std::norm(q(k, j));
            inverse_gains[k] = (interference + noise_powers[k]) / std::norm(q(k, k));
        }
        const double level = find_water_level(inverse_gains, total_power);
        Eigen::VectorXd next = (level - inverse_gains.array()).max(0.0);
        // exact budget despite bisection roundoff
        next *= total_power / next.sum();
        const double change = (next - alloc.powers).cwiseAbs().maxCoeff();
        alloc.powers = std::move(next);
        alloc.water_level = level;
        alloc.rounds = round;
        if (change < tolerance) {
            alloc.converged = true;
            break;
        }
    }
    return alloc;
}

HeatmapGrid heatmap(const SceneGeometry& geometry, const Eigen::MatrixXcd& response,
                    const HeatmapSpec& spec) {
    if (spec.nx < 1 || spec.ny < 1) throw std::invalid_argument("heatmap: grid must be non-empty");
    if (response.rows() != geometry.atoms_per_layer())
        throw std::invalid_argument("heatmap: response rows must match atom count");

    const auto& atoms = geometry.last_layer();
    const double k0 = 2.0 * std::numbers::pi / geometry.wavelength();

    HeatmapGrid grid{spec.x_min, spec.x_max, spec.nx, spec.y_min, spec.y_max, spec.ny, {}};
    grid.energy.resize(static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny));

    Eigen::VectorXcd sample_channel(response.rows());
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.ny == 1 ? spec.y_min
                                      : spec.y_min + (spec.y_max - spec.y_min) * iy / (spec.ny - 1);
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double x = spec.nx == 1
                                 ? spec.x_min
                                 : spec.x_min + (spec.x_max - spec.x_min) * ix / (spec.nx - 1);
            const Vec3 sample(x, y, 0.0);
            for (Eigen::Index m = 0; m < sample_channel.size(); ++m) {
                const double d = (sample - atoms[static_cast<std::size_t>(m)]).norm();
                if (d == 0.0) throw std::invalid_argument("heatmap: sample on a meta-atom");
                sample_channel[m] = std::polar(1.0, -k0 * d);
            }
            sample_channel /= sample_channel.norm();
            const Eigen::RowVectorXcd projected = sample_channel.adjoint() * response;
            double energy = 0.0;
            if (spec.mode == EnergyMode::incoherent)
                energy = projected.squaredNorm();
            else
                energy = std::norm(projected.sum());
            grid.energy[static_cast<std::size_t>(iy) * spec.nx + ix] = energy;
        }
    }
    return grid;
}

} // namespace simfocus
