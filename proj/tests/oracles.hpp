#pragma once

// Independent reference implementations used to check the library: plain
// loops over std::vector, no shared code with the production path.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "simfocus/geometry.hpp"
#include "simfocus/metasurface.hpp"
#include "simfocus/propagation.hpp"

namespace oracles {

using cplx = std::complex<double>;
using cmatrix = std::vector<std::vector<cplx>>;

inline cmatrix from_eigen(const Eigen::MatrixXcd& m) {
    cmatrix out(static_cast<std::size_t>(m.rows()),
                std::vector<cplx>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
    return out;
}

inline Eigen::MatrixXcd to_eigen(const cmatrix& m) {
    Eigen::MatrixXcd out(m.size(), m[0].size());
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m[0].size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    return out;
}

inline cmatrix multiply(const cmatrix& a, const cmatrix& b) {
    const std::size_t rows = a.size(), inner = b.size(), cols = b[0].size();
    cmatrix out(rows, std::vector<cplx>(cols, cplx{}));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t i = 0; i < inner; ++i) out[r][c] += a[r][i] * b[i][c];
    return out;
}

inline cmatrix diagonal(const std::vector<cplx>& entries) {
    cmatrix out(entries.size(), std::vector<cplx>(entries.size(), cplx{}));
    for (std::size_t i = 0; i < entries.size(); ++i) out[i][i] = entries[i];
    return out;
}

inline std::vector<cplx> diag_entries(const simfocus::SimState& state, int l) {
    const Eigen::VectorXcd d = state.layer_diagonal(l);
    return {d.data(), d.data() + d.size()};
}

/// Full left-to-right chain Phi^L W^L ... Phi^1 W^1, dense diagonals, naive
/// products throughout.
inline Eigen::MatrixXcd sim_response(const simfocus::SimState& state,
                                     const simfocus::PropagationSet& prop) {
    cmatrix acc = diagonal(diag_entries(state, prop.layer_count()));
    for (int l = prop.layer_count(); l >= 2; --l) {
        acc = multiply(acc, from_eigen(prop.between_layers(l)));
        acc = multiply(acc, diagonal(diag_entries(state, l - 1)));
    }
    return to_eigen(multiply(acc, from_eigen(prop.bs_to_first())));
}

/// Inter-layer matrices rebuilt element by element straight from the
/// point-to-point coefficient, no sharing.
inline Eigen::MatrixXcd link_matrix(const simfocus::SceneGeometry& geometry,
                                    const std::vector<simfocus::Vec3>& sources,
                                    const std::vector<simfocus::Vec3>& targets) {
    Eigen::MatrixXcd w(targets.size(), sources.size());
    const simfocus::Vec3 normal(0.0, 1.0, 0.0);
    for (std::size_t c = 0; c < sources.size(); ++c)
        for (std::size_t r = 0; r < targets.size(); ++r)
            w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                simfocus::rs_coefficient(sources[c], targets[r], normal, geometry.wavelength(),
                                         geometry.atom_area());
    return w;
}

/// Cascaded channel element by element: left chain down to layer l+1, the
/// m-th column/row split, right chain up from the transmit array.
inline Eigen::MatrixXcd cascaded_channel(const simfocus::SimState& state,
                                         const simfocus::PropagationSet& prop,
                                         const Eigen::MatrixXcd& channel, int l, int m) {
    const std::size_t atoms = static_cast<std::size_t>(prop.atoms_per_layer());
    cmatrix left(1, std::vector<cplx>(atoms));
    // start from an identity row selection; build Phi^L W^L ... Phi^{l+1} W^{l+1}
    cmatrix chain = diagonal(std::vector<cplx>(atoms, cplx{1.0, 0.0}));
    for (int j = prop.layer_count(); j > l; --j) {
        chain = multiply(chain, diagonal(diag_entries(state, j)));
        chain = multiply(chain, from_eigen(prop.between_layers(j)));
    }
    cmatrix right = from_eigen(prop.bs_to_first());
    for (int j = 2; j <= l; ++j) {
        cmatrix w = from_eigen(prop.between_layers(j));
        cmatrix phi = diagonal(diag_entries(state, j - 1));
        right = multiply(w, multiply(phi, right));
    }
    const std::size_t users = static_cast<std::size_t>(channel.cols());
    const std::size_t antennas = right[0].size();
    Eigen::MatrixXcd v(users, antennas);
    for (std::size_t k = 0; k < users; ++k)
        for (std::size_t s = 0; s < antennas; ++s) {
            cplx left_part{};
            for (std::size_t i = 0; i < atoms; ++i)
                left_part += std::conj(channel(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(k))) *
                             chain[i][static_cast<std::size_t>(m - 1)];
            v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) =
                left_part * right[static_cast<std::size_t>(m - 1)][s];
        }
    return v;
}

/// Best two-user split of a unit budget over interference-free gains, by
/// exhaustive grid search on the sum rate.
inline std::pair<double, double> two_user_grid_search(double gain0, double gain1, double budget,
                                                      int points) {
    double best_rate = -1.0, best_p0 = 0.0;
    for (int i = 0; i <= points; ++i) {
        const double p0 = budget * i / points;
        const double rate =
            std::log2(1.0 + p0 * gain0) + std::log2(1.0 + (budget - p0) * gain1);
        if (rate > best_rate) {
            best_rate = rate;
            best_p0 = p0;
        }
    }
    return {best_p0, budget - best_p0};
}

} // namespace oracles
