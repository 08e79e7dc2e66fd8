#pragma once

// Noise-averaged two-qutrit evolution under random telegraph noise.
//
// Each qutrit couples through gamma chi_k(t) S_x, so in the S_x (x) S_x
// eigenbasis with labels (m_a, m_b) the averaged channel only rescales
// matrix elements:
//
//   Independent:  rho[(m_a,m_b),(m_a',m_b')] *= D_{|m_a-m_a'|}(t) D_{|m_b-m_b'|}(t)
//   Common:       rho[(m_a,m_b),(m_a',m_b')] *= D_{|m_a-m_a'+m_b-m_b'|}(t)
//
// with D_0 = 1. The free term omega0 I only contributes a global phase.

#include <array>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "qutrit_core.hpp"
#include "rtn_kernel.hpp"

namespace qutrit_eur {

enum class Topology { Independent, Common };

inline std::string_view to_string(Topology t) {
    return t == Topology::Independent ? "independent" : "common";
}

struct DephasingFactors {
    double alpha;
    double beta;
};

// Independent: (D1^2, D2^2). Common: (D2, D4).
inline DephasingFactors factors(double t, const RtnParams& p, Topology topo) {
    if (topo == Topology::Independent) {
        const double d1 = kernel_d(1, t, p);
        const double d2 = kernel_d(2, t, p);
        return {d1 * d1, d2 * d2};
    }
    return {kernel_d(2, t, p), kernel_d(4, t, p)};
}

// Harmonics whose kernels enter the (alpha, beta) pair of a topology.
inline std::array<int, 2> harmonics_used(Topology topo) {
    return topo == Topology::Independent ? std::array<int, 2>{1, 2} : std::array<int, 2>{2, 4};
}

// Markovian iff every harmonic the topology uses is OverDamped.
inline bool is_markovian(const RtnParams& p, Topology topo) {
    for (int n : harmonics_used(topo))
        if (regime(n, p) != HarmonicRegime::OverDamped) return false;
    return true;
}

namespace detail {

struct SxFrame {
    Mat3 local;                    // columns: S_x eigenvectors for m = +1, 0, -1
    Mat9 pair;                     // local (x) local
    std::array<int, 3> labels{1, 0, -1};
};

inline const SxFrame& sx_frame() {
    static const SxFrame frame = [] {
        SxFrame f;
        f.local = eigenbasis(spin1_x()).vectors();
        f.pair = kron(f.local, f.local);
        return f;
    }();
    return frame;
}

} // namespace detail

// Averaged channel for one parameter set; the S_x frame is built once and
// shared, so sweeping a time grid only recomputes the damping mask.
class DephasingChannel {
public:
    DephasingChannel(const RtnParams& params, Topology topo) : params_(params), topo_(topo) {}

    const RtnParams& params() const { return params_; }
    Topology topology() const { return topo_; }

    // Multiplier for element ((m_a,m_b),(m_a',m_b')) in the S_x (x) S_x frame.
    Eigen::Matrix<double, 9, 9> damping(double t) const {
        std::array<double, 5> d{};
        for (int n = 0; n <= 4; ++n) d[n] = kernel_or_one(n, t, params_);
        const auto& lab = detail::sx_frame().labels;
        Eigen::Matrix<double, 9, 9> mask;
        for (int p = 0; p < 9; ++p) {
            for (int q = 0; q < 9; ++q) {
                const int da = lab[p / 3] - lab[q / 3];
                const int db = lab[p % 3] - lab[q % 3];
                mask(p, q) = topo_ == Topology::Independent ? d[std::abs(da)] * d[std::abs(db)]
                                                            : d[std::abs(da + db)];
            }
        }
        return mask;
    }

    BipartiteState apply(const BipartiteState& rho0, double t) const {
        const Mat9& w = detail::sx_frame().pair;
        Mat9 in_frame = w.adjoint() * rho0.matrix() * w;
        in_frame = in_frame.cwiseProduct(damping(t).cast<cplx>());
        Mat9 out = w * in_frame * w.adjoint();
        out = (out + out.adjoint()).eval() * 0.5;
        return BipartiteState(out);
    }

private:
    RtnParams params_;
    Topology topo_;
};

inline BipartiteState evolve(const BipartiteState& rho0, double t, const RtnParams& p, Topology topo) {
    return DephasingChannel(p, topo).apply(rho0, t);
}

// Single-qutrit version of the independent channel: (m, m') element scaled by D_{|m-m'|}.
inline Operator3 local_dephasing(const Operator3& rho, double t, const RtnParams& p) {
    const auto& f = detail::sx_frame();
    Mat3 in_frame = f.local.adjoint() * rho.matrix() * f.local;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) in_frame(i, j) *= kernel_or_one(std::abs(f.labels[i] - f.labels[j]), t, p);
    return Operator3(f.local * in_frame * f.local.adjoint());
}

// Literal closed-form 9x9 state for the maximally entangled input, kept
// as written (prefactor 1/24, entries A..F) together with its defects. It is
// not trace preserving: tr = (28 + 2 alpha - 4 beta) / 24.
struct LiteralFormDiagnostic {
    Mat9 matrix;
    double A, B, C, D, E, F;
    double alpha, beta;
    double trace;
    double trace_times_24;        // 2A + 2D + F - 8B, exact at the anchors
    double hermiticity_defect;
    double min_eigenvalue;
    double distance_to_evolve;     // max entrywise |literal - evolve(psi)|
};

inline LiteralFormDiagnostic literal_closed_form(double t, const RtnParams& p, Topology topo) {
    const DephasingFactors f = factors(t, p, topo);
    LiteralFormDiagnostic out{};
    out.alpha = f.alpha;
    out.beta = f.beta;
    out.A = 3.0 + 4.0 * f.alpha + f.beta;
    out.B = -1.0 + f.beta;
    out.C = 2.0 * (1.0 + 2.0 * f.alpha + f.beta);
    out.D = 3.0 - 4.0 * f.alpha + f.beta;
    out.E = 2.0 * (1.0 - 2.0 * f.alpha + f.beta);
    out.F = 8.0 + 2.0 * f.alpha;

    // even rows/columns carry the 5x5 pattern, odd-odd entries are -2B
    const double even[5][5] = {{out.A, out.B, out.C, out.B, out.A},
                               {out.B, out.D, out.E, out.D, out.B},
                               {out.C, out.E, out.F, out.E, out.C},
                               {out.B, out.D, out.E, out.D, out.B},
                               {out.A, out.B, out.C, out.B, out.A}};
    Mat9 m = Mat9::Zero();
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            if (i % 2 == 0 && j % 2 == 0) m(i, j) = even[i / 2][j / 2] / 24.0;
            else if (i % 2 == 1 && j % 2 == 1) m(i, j) = -2.0 * out.B / 24.0;
        }
    }
    out.matrix = m;
    out.trace = m.trace().real();
    out.trace_times_24 = 2.0 * out.A + 2.0 * out.D + out.F - 8.0 * out.B;
    out.hermiticity_defect = hermitian_defect(m);
    out.min_eigenvalue = min_eigenvalue(m);
    out.distance_to_evolve = (m - evolve(max_entangled_state(), t, p, topo).matrix()).cwiseAbs().maxCoeff();
    return out;
}

} // namespace qutrit_eur
