#pragma once

// Von Neumann / conditional entropies (bits) and the quantum-memory entropic
// uncertainty U_L = H(S_x|B) + H(S_z|B) with its Berta lower bound
// log2(1/c) + H(A|B).

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "dephasing_evolution.hpp"
#include "qutrit_core.hpp"

namespace qutrit_eur {

inline constexpr double kShannonCutoff = 1e-15;

inline double log2_3() { return std::log2(3.0); }

// -sum p log2 p; entries at or below 1e-15 contribute nothing.
inline double shannon_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > kShannonCutoff) h -= p * std::log2(p);
    return h;
}

template <typename Derived>
double von_neumann(const Eigen::MatrixBase<Derived>& rho) {
    const double herm = hermitian_defect(rho);
    if (herm > kHermitianTol) throw invalid_state("Hermiticity defect " + std::to_string(herm));
    const double tr_err = std::abs(rho.trace() - cplx(1.0));
    if (tr_err > kTraceTol) throw invalid_state("trace deviates from 1 by " + std::to_string(tr_err));
    auto ev = hermitian_eigenvalues(rho);
    for (double& x : ev) {
        if (x < kPsdFloor) throw invalid_state("negative eigenvalue " + std::to_string(x));
        if (x < 0.0) x = 0.0;
    }
    return shannon_bits(ev);
}

inline double von_neumann(const BipartiteState& rho) { return von_neumann(rho.matrix()); }
inline double von_neumann(const Operator3& rho) { return von_neumann(rho.matrix()); }

// H(X|B) = H(rho_XB) - H(rho_B), with X the measurement of A in `basis`.
inline double conditional_entropy(const BipartiteState& rho, const Basis3& basis) {
    return von_neumann(measure_dephase(rho, basis)) - von_neumann(partial_trace_A(rho));
}

// H(A|B) = H(rho_AB) - H(rho_B)
inline double conditional_entropy_AB(const BipartiteState& rho) {
    return von_neumann(rho) - von_neumann(partial_trace_A(rho));
}

// Closed-form spectrum of the S_z-measured evolved maximally entangled state.
inline std::array<double, 9> measured_spectrum(const DephasingFactors& f) {
    const double a = f.alpha;
    const double b = f.beta;
    if (!(std::abs(a) <= 1.0 + 1e-12) || !(std::abs(b) <= 1.0 + 1e-12))
        throw spectrum_invalid("factors outside [-1, 1]");
    const double root = std::sqrt(16.0 * a * a + (b - 1.0) * (b - 1.0));
    const double lo = (-root + b + 3.0) / 24.0;
    const double hi = (root + b + 3.0) / 24.0;
    std::array<double, 9> ev{0.0,
                             (1.0 - b) / 6.0,
                             (1.0 + b) / 6.0,
                             (1.0 - b) / 12.0,
                             (1.0 - b) / 12.0,
                             lo,
                             lo,
                             hi,
                             hi};
    double sum = 0.0;
    for (double& x : ev) {
        if (x < -1e-9)
            throw spectrum_invalid("eigenvalue " + std::to_string(x) + " at alpha=" + std::to_string(a) +
                                   ", beta=" + std::to_string(b));
        if (x < 0.0 && x >= -1e-12) x = 0.0;
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw spectrum_invalid("eigenvalues sum to " + std::to_string(sum));
    return ev;
}

// U_L = H(rho_{S_z B}) - H(rho_B) with H(S_x|B) = 0 and H(rho_B) = log2 3.
// Adding log2 3 instead would put U_L(0) at 2 log2 3.
inline double uncertainty_fast(const DephasingFactors& f) {
    const auto ev = measured_spectrum(f);
    return shannon_bits(ev) - log2_3();
}

inline double uncertainty_general(const BipartiteState& rho, const Basis3& x, const Basis3& z) {
    return conditional_entropy(rho, x) + conditional_entropy(rho, z);
}

inline double berta_rhs(const BipartiteState& rho, const Basis3& x, const Basis3& z) {
    return std::log2(1.0 / max_overlap_c(x, z)) + conditional_entropy_AB(rho);
}

inline const Basis3& sx_basis() {
    static const Basis3 b = eigenbasis(spin1_x());
    return b;
}

inline const Basis3& sz_basis() {
    static const Basis3 b = eigenbasis(spin1_z());
    return b;
}

struct UncertaintyPoint {
    double t_dimensionless;
    double h_x_cond;
    double h_z_cond;
    double u_l;
    double berta_rhs;
    double alpha;
    double beta;
};

// Closed-form point for the maximally entangled input. H(S_x|B) vanishes
// identically on this family; the bound still needs the evolved joint state.
inline UncertaintyPoint uncertainty_point_fast(double t, const DephasingChannel& channel) {
    const DephasingFactors f = factors(t, channel.params(), channel.topology());
    UncertaintyPoint pt{};
    pt.t_dimensionless = channel.params().to_dimensionless(t);
    pt.alpha = f.alpha;
    pt.beta = f.beta;
    pt.h_x_cond = 0.0;
    pt.h_z_cond = uncertainty_fast(f);
    pt.u_l = pt.h_x_cond + pt.h_z_cond;
    pt.berta_rhs = berta_rhs(channel.apply(max_entangled_state(), t), sx_basis(), sz_basis());
    return pt;
}

// Everything from the evolved density matrix, no closed forms.
inline UncertaintyPoint uncertainty_point_general(double t, const DephasingChannel& channel) {
    const DephasingFactors f = factors(t, channel.params(), channel.topology());
    const BipartiteState rho = channel.apply(max_entangled_state(), t);
    UncertaintyPoint pt{};
    pt.t_dimensionless = channel.params().to_dimensionless(t);
    pt.alpha = f.alpha;
    pt.beta = f.beta;
    pt.h_x_cond = conditional_entropy(rho, sx_basis());
    pt.h_z_cond = conditional_entropy(rho, sz_basis());
    pt.u_l = pt.h_x_cond + pt.h_z_cond;
    pt.berta_rhs = berta_rhs(rho, sx_basis(), sz_basis());
    return pt;
}

} // namespace qutrit_eur
