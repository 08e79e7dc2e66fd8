#pragma once

// Dephasing kernel of random telegraph noise.
//
// A fluctuator chi(t) = +-1 flips at Poisson rate lambda and drives the phase
// xi(t) = -gamma * int_0^t chi. Its harmonics average to
//
//   D_n(t) = <cos(n xi(t))> = e^{-lambda t} [cosh(dt) + (lambda/d) sinh(dt)]   lambda > n gamma
//                           = e^{-lambda t} [cos(dt)  + (lambda/d) sin(dt)]    lambda < n gamma
//                           = e^{-lambda t} (1 + lambda t)                     lambda = n gamma
//
// with d = sqrt|lambda^2 - (n gamma)^2|, and <sin(n xi(t))> = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace qutrit_eur {

class RtnParams {
public:
    RtnParams(double gamma, double lambda, double omega0 = 0.0)
        : gamma_(gamma), lambda_(lambda), omega0_(omega0) {
        if (!(gamma >= 0.0) || !(lambda >= 0.0))
            throw std::invalid_argument("RtnParams: gamma and lambda must be non-negative");
        if (gamma == 0.0 && lambda == 0.0)
            throw std::invalid_argument("RtnParams: gamma and lambda cannot both be zero");
    }

    // lambda = 1, gamma = g: the dimensionless parametrisation used for sweeps.
    static RtnParams from_relative(double g, double lambda = 1.0) { return {g * lambda, lambda}; }

    double gamma() const { return gamma_; }
    double lambda() const { return lambda_; }
    double omega0() const { return omega0_; }

    // gamma / lambda; +infinity for static noise.
    double g() const {
        return lambda_ == 0.0 ? std::numeric_limits<double>::infinity() : gamma_ / lambda_;
    }

    // The externally reported time: lambda t, or gamma t when lambda = 0.
    double time_scale() const { return lambda_ == 0.0 ? gamma_ : lambda_; }
    double to_dimensionless(double t) const { return t * time_scale(); }
    double from_dimensionless(double tau) const { return tau / time_scale(); }

private:
    double gamma_;
    double lambda_;
    double omega0_;
};

enum class HarmonicRegime { OverDamped, UnderDamped, Critical };

inline std::string_view to_string(HarmonicRegime r) {
    switch (r) {
    case HarmonicRegime::OverDamped: return "overdamped";
    case HarmonicRegime::UnderDamped: return "underdamped";
    case HarmonicRegime::Critical: return "critical";
    }
    return "?";
}

inline constexpr double kCriticalRelTol = 1e-12;

inline HarmonicRegime regime(int n, const RtnParams& p) {
    if (n < 1) throw std::invalid_argument("regime: harmonic index must be >= 1");
    const double lam = p.lambda();
    const double ng = n * p.gamma();
    if (std::abs(lam - ng) <= kCriticalRelTol * std::max(lam, ng)) return HarmonicRegime::Critical;
    return lam > ng ? HarmonicRegime::OverDamped : HarmonicRegime::UnderDamped;
}

inline double kernel_d(int n, double t, const RtnParams& p) {
    if (n < 1) throw std::invalid_argument("kernel_d: harmonic index must be >= 1");
    if (!(t >= 0.0)) throw std::invalid_argument("kernel_d: time must be non-negative");
    if (t == 0.0) return 1.0;

    const double lam = p.lambda();
    const double ng = n * p.gamma();
    const double envelope = std::exp(-lam * t);
    switch (regime(n, p)) {
    case HarmonicRegime::Critical:
        return envelope * (1.0 + lam * t);
    case HarmonicRegime::OverDamped: {
        const double d = std::sqrt((lam - ng) * (lam + ng));
        // cosh and sinh overflow long before the product does
        if (d * t > 600.0) {
            const double grow = 0.5 * std::exp((d - lam) * t);
            return grow * (1.0 + lam / d);
        }
        return envelope * (std::cosh(d * t) + (lam / d) * std::sinh(d * t));
    }
    case HarmonicRegime::UnderDamped: {
        const double d = std::sqrt((ng - lam) * (ng + lam));
        return envelope * (std::cos(d * t) + (lam / d) * std::sin(d * t));
    }
    }
    return 0.0;
}

// <sin(n xi(t))>; identically zero because chi(0) = +-1 equiprobably makes xi symmetric.
inline double kernel_sin(int n, double t, const RtnParams&) {
    if (n < 1) throw std::invalid_argument("kernel_sin: harmonic index must be >= 1");
    if (!(t >= 0.0)) throw std::invalid_argument("kernel_sin: time must be non-negative");
    return 0.0;
}

// D_n with the convention D_0 = 1.
inline double kernel_or_one(int n, double t, const RtnParams& p) {
    return n == 0 ? 1.0 : kernel_d(n, t, p);
}

} // namespace qutrit_eur
