#ifndef NSVAC_RUN_SETUP_HPP_
#define NSVAC_RUN_SETUP_HPP_

// Wiring between the key-value run configuration and the module objects;
// shared by the command-line tool and the acceptance suite so both run the
// exact same experiment definitions.

#include <optional>

#include "nsvac/config.hpp"
#include "nsvac/diagnostics.hpp"
#include "nsvac/init_data.hpp"
#include "nsvac/ode_bound.hpp"
#include "nsvac/picard.hpp"
#include "nsvac/regime.hpp"
#include "nsvac/solver.hpp"

namespace nsvac {

struct RunSetup {
    Params params;
    Grid grid{1, 64, 4.0};
    DensityFamily density;
    double cutoff_radius = 0;  // <= 0: no cutoff
    VelocityFamily velocity;
    SolverConfig solver;
    double n = 2.5, m = 3.0;   // time-weight offsets
    double fit_t0 = 1.0, fit_t1 = 100.0;
    double D0 = 0;             // <= 0: use the ODE-threshold proxy
    int picard_kmax = 4;
    long seed = 0;
};

RunSetup load_setup(const KeyValueConfig& cfg);
KeyValueConfig to_config(const RunSetup& rs);

struct BuiltRun {
    Field rho0;
    ReformInit init;
    VelocityData velocity;
    BurgersFlow flow;
};

BuiltRun build_run(const RunSetup& rs);

/// The scalar comparison ODE attached to the active decay path:
///   P0/P1: dZ/dt + (1-nu*)b*/(1+t) Z = C1 (1+t)^{1+eps*} Z^3 + C2 (1+t)^{-1-eps*} Z
///   P2/P3: dY/dt + (r+n)/(1+t) Y = C1 (1+t)^{2 iota n - 3 iota - 1 + (2 iota - 1) eta} Y^{2 iota + 1}
///          + C2 (1+t)^{-1-eta} Y
/// with unit prefactors (the theory never quantifies them).
OdeSpec regime_ode_spec(const RegimeReport& rep, double eta = 0);

/// Smallness budget proxy: the ODE threshold of the active path's comparison
/// equation with unit prefactors; 0 when no path is active or the threshold
/// hypotheses fail.
double default_D0(const RegimeReport& rep);

} // namespace nsvac

#endif
