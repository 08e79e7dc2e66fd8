#pragma once

// Small fixed-size complex linear algebra shared by every module.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qutrit_eur {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix<cplx, 3, 3>;
using Vec3 = Eigen::Matrix<cplx, 3, 1>;
using Mat9 = Eigen::Matrix<cplx, 9, 9>;
using Vec9 = Eigen::Matrix<cplx, 9, 1>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;

// max_ij |M_ij - conj(M_ji)|
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Eigenvalues of the Hermitian part of m, ascending.
template <typename Derived>
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
    using Plain = typename Derived::PlainObject;
    const Plain h = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Plain> solver(h, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
    const auto ev = hermitian_eigenvalues(m);
    return *std::min_element(ev.begin(), ev.end());
}

inline Mat9 kron(const Mat3& a, const Mat3& b) {
    Mat9 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    return out;
}

} // namespace qutrit_eur
