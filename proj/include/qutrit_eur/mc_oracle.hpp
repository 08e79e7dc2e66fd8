#pragma once

// Monte Carlo trajectory oracle for the telegraph-noise averages.
//
// Paths are sampled event by event (exponential waiting times), phases are
// integrated exactly over the piecewise-constant chi, and each trajectory
// gets its own unitary exp(i xi S_x). Nothing here reuses the S_x eigenbasis
// or the kernel formulas, so the estimates are an independent check of
// rtn_kernel and dephasing_evolution.
//
// Reproducibility: every trajectory draws from a stateless counter-based
// stream keyed by (master_seed, trajectory index, stream id). Trajectories
// are reduced in fixed blocks of kBlockSize whose partial sums are combined
// in block order, so results are bit-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "dephasing_evolution.hpp"
#include "errors.hpp"
#include "qutrit_core.hpp"
#include "rtn_kernel.hpp"

namespace qutrit_eur {

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finaliser
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
    return mix64(mix64(master) + mix64(2 * index + stream + 1) * kGolden);
}

// Stateless counter generator: draw k is mix64(key + k * golden).
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace rng

struct TelegraphPath {
    int initial_sign = 1;
    std::vector<double> flip_times;
    double t_max = 0.0;

    bool valid() const {
        if (initial_sign != 1 && initial_sign != -1) return false;
        for (std::size_t i = 0; i < flip_times.size(); ++i) {
            if (flip_times[i] < 0.0 || flip_times[i] > t_max) return false;
            if (i > 0 && !(flip_times[i] > flip_times[i - 1])) return false;
        }
        return true;
    }

    int value_at(double t) const {
        const auto flips = std::upper_bound(flip_times.begin(), flip_times.end(), t) - flip_times.begin();
        return (flips % 2 == 0) ? initial_sign : -initial_sign;
    }
};

inline TelegraphPath sample_path(const RtnParams& params, double t_max, std::uint64_t seed) {
    if (!(t_max > 0.0)) throw std::invalid_argument("sample_path: t_max must be positive");
    rng::CounterStream stream(seed);
    TelegraphPath path;
    path.t_max = t_max;
    path.initial_sign = (stream.next_u64() >> 63) ? 1 : -1;
    if (params.lambda() > 0.0) {
        double t = stream.exponential(params.lambda());
        while (t <= t_max) {
            path.flip_times.push_back(t);
            t += stream.exponential(params.lambda());
        }
    }
    return path;
}

// int_0^t chi, summed segment by segment.
inline double signed_time(const TelegraphPath& path, double t) {
    if (t > path.t_max)
        throw horizon_exceeded("t=" + std::to_string(t) + " beyond path horizon " + std::to_string(path.t_max));
    double acc = 0.0;
    double last = 0.0;
    int sign = path.initial_sign;
    for (double flip : path.flip_times) {
        if (flip >= t) break;
        acc += sign * (flip - last);
        last = flip;
        sign = -sign;
    }
    return acc + sign * (t - last);
}

// xi(t) = -gamma int_0^t chi
inline double phase(const TelegraphPath& path, double t, const RtnParams& params) {
    return -params.gamma() * signed_time(path, t);
}

// Phases at every point of an ascending grid in one sweep.
inline std::vector<double> phases_on_grid(const TelegraphPath& path, const std::vector<double>& grid,
                                          const RtnParams& params) {
    if (!grid.empty() && grid.back() > path.t_max)
        throw horizon_exceeded("grid extends beyond path horizon");
    std::vector<double> out;
    out.reserve(grid.size());
    double acc = 0.0;
    double last = 0.0;
    int sign = path.initial_sign;
    std::size_t k = 0;
    for (double t : grid) {
        while (k < path.flip_times.size() && path.flip_times[k] < t) {
            acc += sign * (path.flip_times[k] - last);
            last = path.flip_times[k];
            sign = -sign;
            ++k;
        }
        out.push_back(-params.gamma() * (acc + sign * (t - last)));
    }
    return out;
}

struct EnsembleConfig {
    std::size_t n_traj = 100000;
    std::uint64_t master_seed = 0;
    std::vector<double> t_grid;

    void validate() const {
        if (n_traj < 100) throw std::invalid_argument("EnsembleConfig: n_traj must be >= 100");
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            if (!(t_grid[i] >= 0.0)) throw std::invalid_argument("EnsembleConfig: negative time in grid");
            if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
                throw std::invalid_argument("EnsembleConfig: t_grid must be strictly ascending");
        }
    }
};

struct EnsembleEstimate {
    std::vector<double> mean;
    std::vector<double> std_err;
    std::size_t n = 0;
};

struct KernelEstimate {
    EnsembleEstimate cos;     // <cos(n xi)>
    EnsembleEstimate sin;     // <sin(n xi)>, zero in expectation
};

namespace detail {

inline constexpr std::size_t kBlockSize = 1024;

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
        else comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Sums of shifted samples and their squares for a fixed number of channels.
struct MomentBlock {
    std::vector<CompensatedSum> s1;
    std::vector<CompensatedSum> s2;

    explicit MomentBlock(std::size_t channels) : s1(channels), s2(channels) {}

    void add(std::size_t ch, double dev) {
        s1[ch].add(dev);
        s2[ch].add(dev * dev);
    }
};

inline unsigned worker_count() {
    if (const char* env = std::getenv("QEUR_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fill(block, first, last) for every block of trajectories, possibly in
// parallel, and reduces the blocks in index order. `shift` is subtracted
// from samples before accumulation (taken from trajectory 0 by callers), so
// ensembles of identical samples give exact means and zero variance.
inline EnsembleEstimate reduce_moments(
    std::size_t n_traj, const std::vector<double>& shift,
    const std::function<void(MomentBlock&, std::size_t, std::size_t)>& fill) {
    const std::size_t channels = shift.size();
    const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
    std::vector<MomentBlock> blocks(n_blocks, MomentBlock(channels));

    const unsigned workers = std::min<std::size_t>(worker_count(), n_blocks);
    auto run = [&](unsigned w) {
        for (std::size_t b = w; b < n_blocks; b += workers)
            fill(blocks[b], b * kBlockSize, std::min(n_traj, (b + 1) * kBlockSize));
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    EnsembleEstimate est;
    est.n = n_traj;
    est.mean.resize(channels);
    est.std_err.resize(channels);
    const double n = static_cast<double>(n_traj);
    for (std::size_t ch = 0; ch < channels; ++ch) {
        CompensatedSum s1, s2;
        for (const auto& blk : blocks) {
            s1.add(blk.s1[ch].sum);
            s1.add(blk.s1[ch].comp);
            s2.add(blk.s2[ch].sum);
            s2.add(blk.s2[ch].comp);
        }
        const double mean_dev = s1.value() / n;
        const double var = std::max(0.0, (s2.value() - n * mean_dev * mean_dev) / (n - 1.0));
        est.mean[ch] = shift[ch] + mean_dev;
        est.std_err[ch] = std::sqrt(var / n);
    }
    return est;
}

// exp(i theta S_x) for spin 1, using S_x^3 = S_x:
// I + i sin(theta) S_x + (cos(theta) - 1) S_x^2
inline Mat3 spin1_x_rotation(double theta) {
    static const Mat3 sx = spin1_x().matrix();
    static const Mat3 sx2 = sx * sx;
    return Mat3::Identity() + cplx(0.0, std::sin(theta)) * sx + (std::cos(theta) - 1.0) * sx2;
}

} // namespace detail

inline KernelEstimate estimate_kernel(int n, const EnsembleConfig& cfg, const RtnParams& params) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("estimate_kernel: harmonic index must be >= 1");
    const auto& grid = cfg.t_grid;
    const std::size_t points = grid.size();
    const double horizon = grid.empty() ? 1.0 : std::max(grid.back(), 1e-300);

    auto samples = [&](std::size_t traj, std::vector<double>& cs, std::vector<double>& sn) {
        const auto path = sample_path(params, horizon, rng::derive_seed(cfg.master_seed, traj, 0));
        const auto xi = phases_on_grid(path, grid, params);
        for (std::size_t i = 0; i < points; ++i) {
            cs[i] = std::cos(n * xi[i]);
            sn[i] = std::sin(n * xi[i]);
        }
    };

    std::vector<double> shift(2 * points);
    {
        std::vector<double> cs(points), sn(points);
        samples(0, cs, sn);
        std::copy(cs.begin(), cs.end(), shift.begin());
        std::copy(sn.begin(), sn.end(), shift.begin() + points);
    }

    const auto est = detail::reduce_moments(cfg.n_traj, shift, [&](detail::MomentBlock& blk, std::size_t lo,
                                                                    std::size_t hi) {
        std::vector<double> cs(points), sn(points);
        for (std::size_t tr = lo; tr < hi; ++tr) {
            samples(tr, cs, sn);
            for (std::size_t i = 0; i < points; ++i) {
                blk.add(i, cs[i] - shift[i]);
                blk.add(points + i, sn[i] - shift[points + i]);
            }
        }
    });

    KernelEstimate out;
    out.cos.n = out.sin.n = est.n;
    out.cos.mean.assign(est.mean.begin(), est.mean.begin() + points);
    out.cos.std_err.assign(est.std_err.begin(), est.std_err.begin() + points);
    out.sin.mean.assign(est.mean.begin() + points, est.mean.end());
    out.sin.std_err.assign(est.std_err.begin() + points, est.std_err.end());
    return out;
}

struct MonteCarloState {
    BipartiteState state;                     // Hermitized, trace-renormalised mean
    Eigen::Matrix<double, 9, 9> std_err_re;
    Eigen::Matrix<double, 9, 9> std_err_im;
    double hermiticity_correction = 0.0;      // max |M - (M + M^dag)/2| of the raw mean
    double trace_correction = 0.0;            // |tr M - 1| of the raw mean
    std::size_t n = 0;
};

// Average of (U_a (x) U_b) rho0 (U_a (x) U_b)^dag with U_k = exp(i xi_k S_x).
// Independent draws two paths per trajectory, Common reuses one for both.
inline MonteCarloState mc_state(const BipartiteState& rho0, double t, Topology topo, const EnsembleConfig& cfg,
                                const RtnParams& params) {
    cfg.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("mc_state: time must be non-negative");

    auto conjugated = [&](std::size_t traj) -> Mat9 {
        if (t == 0.0) return rho0.matrix();
        const auto pa = sample_path(params, t, rng::derive_seed(cfg.master_seed, traj, 0));
        const double xa = phase(pa, t, params);
        double xb = xa;
        if (topo == Topology::Independent) {
            const auto pb = sample_path(params, t, rng::derive_seed(cfg.master_seed, traj, 1));
            xb = phase(pb, t, params);
        }
        const Mat9 u = kron(detail::spin1_x_rotation(xa), detail::spin1_x_rotation(xb));
        return u * rho0.matrix() * u.adjoint();
    };

    // channel 2k is Re(entry k), 2k+1 is Im(entry k), entries column-major
    const Mat9 first = conjugated(0);
    std::vector<double> shift(162);
    for (int k = 0; k < 81; ++k) {
        shift[2 * k] = first(k).real();
        shift[2 * k + 1] = first(k).imag();
    }

    const auto est = detail::reduce_moments(cfg.n_traj, shift, [&](detail::MomentBlock& blk, std::size_t lo,
                                                                   std::size_t hi) {
        for (std::size_t tr = lo; tr < hi; ++tr) {
            const Mat9 m = conjugated(tr);
            for (int k = 0; k < 81; ++k) {
                blk.add(2 * k, m(k).real() - shift[2 * k]);
                blk.add(2 * k + 1, m(k).imag() - shift[2 * k + 1]);
            }
        }
    });

    Mat9 mean;
    Eigen::Matrix<double, 9, 9> se_re, se_im;
    for (int k = 0; k < 81; ++k) {
        mean(k) = cplx(est.mean[2 * k], est.mean[2 * k + 1]);
        se_re(k) = est.std_err[2 * k];
        se_im(k) = est.std_err[2 * k + 1];
    }

    const Mat9 herm = (mean + mean.adjoint()) * 0.5;
    const double herm_corr = (mean - herm).cwiseAbs().maxCoeff();
    const cplx tr = herm.trace();
    const double tr_corr = std::abs(tr - cplx(1.0));
    return MonteCarloState{BipartiteState(herm / tr.real()), se_re, se_im, herm_corr, tr_corr, est.n};
}

} // namespace qutrit_eur
