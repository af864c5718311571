#ifndef NSVAC_PICARD_HPP_
#define NSVAC_PICARD_HPP_

#include "nsvac/solver.hpp"

namespace nsvac {

/// Linearized fixed-point iteration on a short horizon: iterate k+1 solves
/// the transport/quasi-symmetric system with the advecting field, stretch
/// coefficient and stress argument frozen at iterate k, using the same
/// discretization as the direct solver on a fixed time grid. Iterate 0 is
/// the seed problem: (varphi0, phi0) transported by the background flow
/// alone, w0 = 0 identically.
struct PicardResult {
    std::vector<double> gamma;   // contraction functional per iterate, k >= 1
    std::vector<double> ratios;  // gamma[k+1]/gamma[k]
    ReformState final_state;     // last iterate at the horizon
    double dt = 0;
    int steps = 0;
    int iterates = 0;
};

/// Throws NoContraction when the functional grows for two consecutive
/// iterates before k_max.
PicardResult picard_solve(const ReformInit& init, const BurgersFlow& flow, const Params& params,
                          const SolverConfig& config, int k_max);

} // namespace nsvac

#endif
