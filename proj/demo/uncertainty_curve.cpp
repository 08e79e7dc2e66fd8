// Prints U_L(lambda t) for one coupling in both environments, closed form
// next to the value recomputed from the evolved density matrix.

#include <cstdio>
#include <cstdlib>

#include "qutrit_eur/qutrit_eur.hpp"

using namespace qutrit_eur;

int main(int argc, char** argv) {
    const double g = argc > 1 ? std::atof(argv[1]) : 2.0;
    const RtnParams params = RtnParams::from_relative(g);
    const DephasingChannel indep(params, Topology::Independent);
    const DephasingChannel common(params, Topology::Common);

    std::printf("# g = %g (%s / %s)\n", g, is_markovian(params, Topology::Independent) ? "markovian" : "non-markovian",
                is_markovian(params, Topology::Common) ? "markovian" : "non-markovian");
    std::printf("%8s %12s %12s %12s %12s\n", "lambda_t", "U_indep", "U_indep_rho", "U_common", "bound_common");
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.25 * i;
        const auto a = uncertainty_point_fast(t, indep);
        const auto b = uncertainty_point_general(t, indep);
        const auto c = uncertainty_point_fast(t, common);
        std::printf("%8.2f %12.8f %12.8f %12.8f %12.8f\n", t, a.u_l, b.u_l, c.u_l, c.berta_rhs);
    }
}
