#pragma once

// Sweep driver behind the `qeur` command line tool: run configuration,
// figure presets, CSV emission and the four subcommands. Every runner writes
// to a caller-supplied stream and returns the process exit code.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "dephasing_evolution.hpp"
#include "entropy_uncertainty.hpp"
#include "mc_oracle.hpp"
#include "rtn_kernel.hpp"

namespace qutrit_eur::scan {

enum ExitCode : int { kOk = 0, kUsage = 2, kCrossValidation = 3, kOracleFailure = 4 };

enum class Command { Kernel, Uncertainty, Oracle, Diagnose };

enum class TopologySelection { Independent, Common, Both };

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "t_lambda,g,topology,alpha,beta,h_x_cond,h_z_cond,u_l,berta_rhs";

// Shortest representation that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct RunConfig {
    std::vector<double> g_list{0.1};
    double lambda = 1.0;
    TopologySelection topology = TopologySelection::Both;
    double t_max = 30.0;          // dimensionless lambda t
    int n_points = 301;
    std::vector<int> harmonics{1, 2, 3, 4};
    std::uint64_t seed = 0;
    std::size_t n_traj = 100000;
    std::vector<double> state_times{0.5, 2.0, 5.0};
    std::string output_path;      // empty: standard output
    std::string preset;

    std::vector<Topology> topologies() const {
        switch (topology) {
        case TopologySelection::Independent: return {Topology::Independent};
        case TopologySelection::Common: return {Topology::Common};
        case TopologySelection::Both: break;
        }
        return {Topology::Independent, Topology::Common};
    }

    RtnParams params_for(double g) const {
        // static noise: lambda = 0 with gamma taken directly from g
        return lambda == 0.0 ? RtnParams(g, 0.0) : RtnParams(g * lambda, lambda);
    }

    void validate() const {
        if (n_points < 2) throw config_error("points must be >= 2");
        if (!(t_max > 0.0)) throw config_error("tmax must be > 0");
        if (g_list.empty()) throw config_error("g list must be non-empty");
        for (double g : g_list)
            if (!(g >= 0.0) || !std::isfinite(g)) throw config_error("g values must be finite and >= 0");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw config_error("lambda must be finite and >= 0");
        if (lambda == 0.0)
            for (double g : g_list)
                if (g == 0.0) throw config_error("g = 0 with lambda = 0 leaves no time scale");
        if (harmonics.empty()) throw config_error("harmonic list must be non-empty");
        for (int n : harmonics)
            if (n < 1) throw config_error("harmonics must be >= 1");
        if (n_traj < 100) throw config_error("trajectories must be >= 100");
        for (double t : state_times)
            if (!(t >= 0.0)) throw config_error("state times must be >= 0");
    }
};

inline RunConfig defaults_for(Command cmd) {
    RunConfig cfg;
    switch (cmd) {
    case Command::Kernel:
        cfg.t_max = 10.0;
        cfg.n_points = 201;
        break;
    case Command::Uncertainty:
        break;
    case Command::Oracle:
        cfg.g_list = {0.5};
        cfg.harmonics = {1, 2, 4};
        cfg.t_max = 5.0;
        cfg.n_points = 21;
        break;
    case Command::Diagnose:
        cfg.g_list = {2.0};
        cfg.t_max = 60.0;
        cfg.n_points = 61;
        break;
    }
    return cfg;
}

// Figure presets. The g values are representative picks for each regime:
// fig2 keeps lambda > 4 gamma so every harmonic in use is OverDamped.
inline void apply_preset(RunConfig& cfg, const std::string& name) {
    if (name == "fig2") {
        cfg.g_list = {0.05, 0.1, 0.2};
        cfg.t_max = 30.0;
        cfg.n_points = 301;
    } else if (name == "fig3") {
        cfg.g_list = {2.0, 5.0, 10.0};
        cfg.t_max = 10.0;
        cfg.n_points = 2001;
    } else {
        throw config_error("unknown preset '" + name + "' (expected fig2 or fig3)");
    }
    cfg.topology = TopologySelection::Both;
    cfg.preset = name;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw config_error("invalid value for " + key + ": '" + text + "'");
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw config_error("empty list for " + key);
    return out;
}

inline TopologySelection parse_topology(const std::string& text) {
    const std::string s = trim(text);
    if (s == "independent") return TopologySelection::Independent;
    if (s == "common") return TopologySelection::Common;
    if (s == "both") return TopologySelection::Both;
    throw config_error("invalid topology '" + text + "' (expected independent, common or both)");
}

} // namespace detail

// Flat key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_list;
    using detail::parse_number;
    if (key == "g") cfg.g_list = parse_list<double>(key, value);
    else if (key == "lambda") cfg.lambda = parse_number<double>(key, value);
    else if (key == "topology") cfg.topology = detail::parse_topology(value);
    else if (key == "tmax") cfg.t_max = parse_number<double>(key, value);
    else if (key == "points") cfg.n_points = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "n") cfg.harmonics = parse_list<int>(key, value);
    else if (key == "trajectories") cfg.n_traj = parse_number<std::size_t>(key, value);
    else if (key == "state_times") cfg.state_times = parse_list<double>(key, value);
    else if (key == "out") cfg.output_path = value;
    else if (key == "preset") apply_preset(cfg, detail::trim(value));
    else throw config_error("unknown setting '" + key + "'");
}

// Command defaults, then the preset (if any), then every other setting.
// `settings` is the config file merged with command-line overrides.
inline RunConfig build_config(Command cmd, const std::map<std::string, std::string>& settings) {
    RunConfig cfg = defaults_for(cmd);
    if (auto it = settings.find("preset"); it != settings.end()) apply_setting(cfg, "preset", it->second);
    for (const auto& [key, value] : settings)
        if (key != "preset") apply_setting(cfg, key, value);
    cfg.validate();
    return cfg;
}

inline std::vector<double> time_grid(double t_max, int n_points) {
    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i) grid[i] = t_max * i / (n_points - 1);
    grid.back() = t_max;
    return grid;
}

// D_n(lambda t) for each requested harmonic.
inline int run_kernel(const RunConfig& cfg, std::ostream& out) {
    out << "t_lambda,g";
    for (int n : cfg.harmonics) out << ",D" << n;
    out << '\n';
    for (double g : cfg.g_list) {
        const RtnParams p = cfg.params_for(g);
        for (double tau : time_grid(cfg.t_max, cfg.n_points)) {
            const double t = p.from_dimensionless(tau);
            out << format_double(tau) << ',' << format_double(p.g());
            for (int n : cfg.harmonics) out << ',' << format_double(kernel_d(n, t, p));
            out << '\n';
        }
    }
    return kOk;
}

inline void write_row(std::ostream& out, double g, Topology topo, const UncertaintyPoint& pt) {
    out << format_double(pt.t_dimensionless) << ',' << format_double(g) << ',' << to_string(topo) << ','
        << format_double(pt.alpha) << ',' << format_double(pt.beta) << ',' << format_double(pt.h_x_cond) << ','
        << format_double(pt.h_z_cond) << ',' << format_double(pt.u_l) << ',' << format_double(pt.berta_rhs)
        << '\n';
}

inline constexpr int kSpotChecks = 5;
inline constexpr double kSpotCheckTol = 1e-9;

// Closed-form sweep over (topology, g, t). Five grid points chosen from the
// seed are recomputed from the evolved density matrix; disagreement beyond
// 1e-9, or a row breaking the uncertainty relation, aborts with exit 3.
inline int run_uncertainty(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto grid = time_grid(cfg.t_max, cfg.n_points);
    const auto topos = cfg.topologies();
    const std::size_t series = topos.size() * cfg.g_list.size();
    const std::size_t total = series * grid.size();

    std::vector<std::size_t> spot;
    rng::CounterStream pick(rng::derive_seed(cfg.seed, 0, 7));
    for (int i = 0; i < kSpotChecks; ++i) spot.push_back(pick.next_u64() % total);

    std::ostringstream body;
    body << kCsvHeader << '\n';
    std::size_t flat = 0;
    for (Topology topo : topos) {
        for (double g : cfg.g_list) {
            const RtnParams p = cfg.params_for(g);
            const DephasingChannel channel(p, topo);
            err << "# series g=" << format_double(p.g()) << " topology=" << to_string(topo) << ": "
                << (is_markovian(p, topo) ? "markovian" : "non-markovian") << '\n';
            for (double tau : grid) {
                const double t = p.from_dimensionless(tau);
                const UncertaintyPoint pt = uncertainty_point_fast(t, channel);
                if (pt.u_l < pt.berta_rhs - 1e-9) {
                    err << "error: uncertainty relation violated at t_lambda=" << format_double(tau)
                        << " g=" << format_double(g) << '\n';
                    return kCrossValidation;
                }
                if (std::find(spot.begin(), spot.end(), flat) != spot.end()) {
                    const UncertaintyPoint ref = uncertainty_point_general(t, channel);
                    if (std::abs(ref.u_l - pt.u_l) > kSpotCheckTol ||
                        std::abs(ref.berta_rhs - pt.berta_rhs) > kSpotCheckTol) {
                        err << "error: closed-form U_L " << format_double(pt.u_l)
                            << " disagrees with density-matrix U_L " << format_double(ref.u_l)
                            << " at t_lambda=" << format_double(tau) << " g=" << format_double(g)
                            << " topology=" << to_string(topo) << '\n';
                        return kCrossValidation;
                    }
                }
                write_row(body, p.g(), topo, pt);
                ++flat;
            }
        }
    }
    out << body.str();
    return kOk;
}

inline constexpr double kZLimit = 5.0;
inline constexpr double kAbsFloor = 1e-3;
inline constexpr std::size_t kSmallEnsemble = 10000;

// z-score against the acceptance radius max(5 se, 1e-3).
inline double z_score(double analytic, double mc, double se) {
    return (mc - analytic) / std::max(se, kAbsFloor / kZLimit);
}

struct OracleRow {
    std::string quantity;
    double g;
    std::string topology;
    double t_lambda;
    double analytic;
    double mc_mean;
    double std_err;
    double z;
    bool pass() const { return std::abs(z) <= kZLimit; }
};

inline std::vector<OracleRow> oracle_rows(const RunConfig& cfg) {
    std::vector<OracleRow> rows;
    const auto grid = time_grid(cfg.t_max, cfg.n_points);
    for (double g : cfg.g_list) {
        const RtnParams p = cfg.params_for(g);
        EnsembleConfig ens{cfg.n_traj, cfg.seed, {}};
        for (double tau : grid) ens.t_grid.push_back(p.from_dimensionless(tau));

        for (int n : cfg.harmonics) {
            const KernelEstimate est = estimate_kernel(n, ens, p);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double d = kernel_d(n, ens.t_grid[i], p);
                rows.push_back({"cos_n" + std::to_string(n), p.g(), "-", grid[i], d, est.cos.mean[i],
                                est.cos.std_err[i], z_score(d, est.cos.mean[i], est.cos.std_err[i])});
                const double s = kernel_sin(n, ens.t_grid[i], p);
                rows.push_back({"sin_n" + std::to_string(n), p.g(), "-", grid[i], s, est.sin.mean[i],
                                est.sin.std_err[i], z_score(s, est.sin.mean[i], est.sin.std_err[i])});
            }
        }

        const BipartiteState psi = max_entangled_state();
        for (Topology topo : cfg.topologies()) {
            for (double tau : cfg.state_times) {
                const double t = p.from_dimensionless(tau);
                const MonteCarloState mc = mc_state(psi, t, topo, ens, p);
                const Mat9 ref = evolve(psi, t, p, topo).matrix();
                OracleRow worst{"state_entry", p.g(), std::string(to_string(topo)), tau, 0, 0, 0, 0};
                for (int k = 0; k < 81; ++k) {
                    const double parts[2][3] = {{ref(k).real(), mc.state.matrix()(k).real(), mc.std_err_re(k)},
                                                {ref(k).imag(), mc.state.matrix()(k).imag(), mc.std_err_im(k)}};
                    for (const auto& part : parts) {
                        const double z = z_score(part[0], part[1], part[2]);
                        if (std::abs(z) >= std::abs(worst.z)) {
                            worst.analytic = part[0];
                            worst.mc_mean = part[1];
                            worst.std_err = part[2];
                            worst.z = z;
                        }
                    }
                }
                rows.push_back(worst);
                const double se_max = std::max(mc.std_err_re.maxCoeff(), mc.std_err_im.maxCoeff());
                rows.push_back({"state_herm_corr", p.g(), std::string(to_string(topo)), tau, 0.0,
                                mc.hermiticity_correction, se_max, z_score(0.0, mc.hermiticity_correction, se_max)});
                rows.push_back({"state_trace_corr", p.g(), std::string(to_string(topo)), tau, 0.0,
                                mc.trace_correction, se_max, z_score(0.0, mc.trace_correction, se_max)});
            }
        }
    }
    return rows;
}

// Analytic-vs-Monte-Carlo table; exit 4 if any |z| > 5.
inline int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.n_traj < kSmallEnsemble)
        err << "warning: " << cfg.n_traj << " trajectories give inflated standard errors; "
            << "use >= " << kSmallEnsemble << " for a meaningful comparison\n";
    const auto rows = oracle_rows(cfg);
    std::size_t failures = 0;
    out << "quantity,g,topology,t_lambda,analytic,mc_mean,std_err,z,pass\n";
    for (const auto& r : rows) {
        out << r.quantity << ',' << format_double(r.g) << ',' << r.topology << ',' << format_double(r.t_lambda)
            << ',' << format_double(r.analytic) << ',' << format_double(r.mc_mean) << ','
            << format_double(r.std_err) << ',' << format_double(r.z) << ',' << (r.pass() ? "pass" : "FAIL")
            << '\n';
        if (!r.pass()) ++failures;
    }
    if (failures > 0) {
        err << "oracle: " << failures << " of " << rows.size() << " comparisons exceed |z| = 5\n";
        return kOracleFailure;
    }
    return kOk;
}

// Defects of the literal closed-form state over the grid.
inline int run_diagnose(const RunConfig& cfg, std::ostream& out) {
    out << "t_lambda,g,topology,A,B,C,D,E,F,trace,trace_times_24,hermiticity_defect,min_eigenvalue,"
           "distance_to_evolve\n";
    for (Topology topo : cfg.topologies()) {
        for (double g : cfg.g_list) {
            const RtnParams p = cfg.params_for(g);
            for (double tau : time_grid(cfg.t_max, cfg.n_points)) {
                const auto d = literal_closed_form(p.from_dimensionless(tau), p, topo);
                out << format_double(tau) << ',' << format_double(p.g()) << ',' << to_string(topo) << ','
                    << format_double(d.A) << ',' << format_double(d.B) << ',' << format_double(d.C) << ','
                    << format_double(d.D) << ',' << format_double(d.E) << ',' << format_double(d.F) << ','
                    << format_double(d.trace) << ',' << format_double(d.trace_times_24) << ','
                    << format_double(d.hermiticity_defect) << ',' << format_double(d.min_eigenvalue) << ','
                    << format_double(d.distance_to_evolve) << '\n';
            }
        }
    }
    return kOk;
}

inline int run(Command cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cmd) {
    case Command::Kernel: return run_kernel(cfg, out);
    case Command::Uncertainty: return run_uncertainty(cfg, out, err);
    case Command::Oracle: return run_oracle(cfg, out, err);
    case Command::Diagnose: return run_diagnose(cfg, out);
    }
    return kUsage;
}

} // namespace qutrit_eur::scan
