#pragma once

// Spin-1 observables, bases and the two-qutrit state container.
//
// Index convention shared by the whole library: the product state |a b>
// (a, b in {0,1,2}, S_z computational basis) maps to row 3a + b.

#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace qutrit_eur {

class Operator3 {
public:
    Operator3() : m_(Mat3::Zero()) {}
    explicit Operator3(const Mat3& m) : m_(m) {}

    const Mat3& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }
    bool is_hermitian(double tol = kHermitianTol) const { return hermitian_defect(m_) <= tol; }
    cplx trace() const { return m_.trace(); }

private:
    Mat3 m_;
};

// Orthonormal eigenbasis of an observable; column i of vectors() belongs to
// eigenvalues()[i], sorted descending.
class Basis3 {
public:
    Basis3(const Mat3& vectors, const std::array<double, 3>& eigenvalues)
        : vectors_(vectors), eigenvalues_(eigenvalues) {
        const double defect = (vectors_.adjoint() * vectors_ - Mat3::Identity()).cwiseAbs().maxCoeff();
        if (defect > kHermitianTol)
            throw error("basis vectors are not orthonormal (defect " + std::to_string(defect) + ")");
    }

    const Mat3& vectors() const { return vectors_; }
    Vec3 vector(int i) const { return vectors_.col(i); }
    const std::array<double, 3>& eigenvalues() const { return eigenvalues_; }

    Mat3 projector(int i) const { return vectors_.col(i) * vectors_.col(i).adjoint(); }

private:
    Mat3 vectors_;
    std::array<double, 3> eigenvalues_;
};

class BipartiteState {
public:
    // Validates Hermiticity, unit trace and positivity; throws invalid_state.
    explicit BipartiteState(const Mat9& m) : m_(m) {
        const double herm = hermitian_defect(m_);
        if (herm > kHermitianTol)
            throw invalid_state("Hermiticity defect " + std::to_string(herm));
        const double tr_err = std::abs(m_.trace() - cplx(1.0));
        if (tr_err > kTraceTol)
            throw invalid_state("trace deviates from 1 by " + std::to_string(tr_err));
        const double lo = min_eigenvalue(m_);
        if (lo < kPsdFloor)
            throw invalid_state("negative eigenvalue " + std::to_string(lo));
    }

    const Mat9& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    static constexpr int index(int a, int b) { return 3 * a + b; }

private:
    Mat9 m_;
};

inline Operator3 identity3() { return Operator3(Mat3::Identity()); }

inline Operator3 spin1_x() {
    const double s = 1.0 / std::sqrt(2.0);
    Mat3 m = Mat3::Zero();
    m(0, 1) = m(1, 0) = s;
    m(1, 2) = m(2, 1) = s;
    return Operator3(m);
}

inline Operator3 spin1_z() {
    Mat3 m = Mat3::Zero();
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    return Operator3(m);
}

inline Mat3 commutator(const Operator3& a, const Operator3& b) {
    return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

namespace detail {

// Largest-magnitude component made real positive; ties go to the lowest index.
inline Vec3 fix_phase(const Vec3& v) {
    const double top = v.cwiseAbs().maxCoeff();
    int k = 0;
    while (std::abs(v(k)) < top - 1e-12) ++k;
    return v * (std::abs(v(k)) / v(k));
}

} // namespace detail

// Eigenbasis with eigenvalues sorted descending. Degenerate eigenspaces are
// spanned by Gram-Schmidt over the projected computational vectors e0, e1, e2
// (in that order), so e.g. the identity yields the computational basis.
inline Basis3 eigenbasis(const Operator3& op) {
    const double herm = hermitian_defect(op.matrix());
    if (herm > kHermitianTol)
        throw non_hermitian_input("Hermiticity defect " + std::to_string(herm));

    const Mat3 h = (op.matrix() + op.matrix().adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Mat3> solver(h);
    const Eigen::Vector3d asc = solver.eigenvalues();
    const Mat3 vec_asc = solver.eigenvectors();

    std::array<double, 3> values{asc(2), asc(1), asc(0)};
    Mat3 raw;
    for (int i = 0; i < 3; ++i) raw.col(i) = vec_asc.col(2 - i);

    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double degenerate_tol = 1e-9 * scale;

    Mat3 out;
    int start = 0;
    while (start < 3) {
        int stop = start + 1;
        while (stop < 3 && std::abs(values[stop - 1] - values[stop]) <= degenerate_tol) ++stop;
        const int k = stop - start;
        if (k == 1) {
            out.col(start) = detail::fix_phase(raw.col(start).normalized());
        } else {
            Mat3 proj = Mat3::Zero();
            for (int i = start; i < stop; ++i) proj += raw.col(i) * raw.col(i).adjoint();
            int filled = 0;
            for (int e = 0; e < 3 && filled < k; ++e) {
                Vec3 w = proj.col(e);
                for (int pass = 0; pass < 2; ++pass)
                    for (int j = start; j < start + filled; ++j)
                        w -= out.col(j) * out.col(j).dot(w);
                if (w.norm() > 1e-8) {
                    out.col(start + filled) = detail::fix_phase(w.normalized());
                    ++filled;
                }
            }
        }
        start = stop;
    }
    return Basis3(out, values);
}

inline BipartiteState max_entangled_state() {
    Vec9 psi = Vec9::Zero();
    for (int a = 0; a < 3; ++a) psi(BipartiteState::index(a, a)) = 1.0 / std::sqrt(3.0);
    Mat9 rho = psi * psi.adjoint();
    // exact 1/3 entries
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            if (std::abs(rho(i, j)) > 0.0) rho(i, j) = 1.0 / 3.0;
    return BipartiteState(rho);
}

inline BipartiteState product_state(const Operator3& rho_a, const Operator3& rho_b) {
    return BipartiteState(kron(rho_a.matrix(), rho_b.matrix()));
}

// rho_B = Tr_A rho
inline Operator3 partial_trace_A(const BipartiteState& rho) {
    Mat3 out = Mat3::Zero();
    for (int a = 0; a < 3; ++a) out += rho.matrix().block<3, 3>(3 * a, 3 * a);
    return Operator3(out);
}

// rho_A = Tr_B rho
inline Operator3 partial_trace_B(const BipartiteState& rho) {
    Mat3 out;
    for (int a = 0; a < 3; ++a)
        for (int ap = 0; ap < 3; ++ap) out(a, ap) = rho.matrix().block<3, 3>(3 * a, 3 * ap).trace();
    return Operator3(out);
}

// sum_i (|psi_i><psi_i| (x) I) rho (|psi_i><psi_i| (x) I), measuring subsystem A.
inline BipartiteState measure_dephase(const BipartiteState& rho, const Basis3& basis) {
    Mat9 out = Mat9::Zero();
    for (int i = 0; i < 3; ++i) {
        const Mat9 p = kron(basis.projector(i), Mat3::Identity());
        out += p * rho.matrix() * p;
    }
    // projector products leave rounding-level anti-Hermitian residue
    out = (out + out.adjoint()).eval() * 0.5;
    return BipartiteState(out);
}

// c = max_ij |<x_i|z_j>|^2
inline double max_overlap_c(const Basis3& x, const Basis3& z) {
    return (x.vectors().adjoint() * z.vectors()).cwiseAbs2().maxCoeff();
}

} // namespace qutrit_eur
