#ifndef NSVAC_ODE_BOUND_HPP_
#define NSVAC_ODE_BOUND_HPP_

#include <string>
#include <vector>

#include "nsvac/errors.hpp"

namespace nsvac {

/// dZ/dt + b/(1+t) Z = C1 (1+t)^D1 Z^a + C2 (1+t)^D2 Z, Z(0) = Z0.
struct OdeSpec {
    double a = 2;
    double b = 0;
    double C1 = 0, C2 = 0;
    double D1 = 0, D2 = -2;
    double Z0 = 1;

    bool global_hypotheses_hold() const {
        return a > 1 && (D1 - (a - 1) * b < -1) && (D2 < -1);
    }
};

struct OdeValue {
    double value = 0;
    bool blowup = false;
    double t_blow = 0;
    bool extrapolated = false;  // D2 = -1 logarithmic case
};

/// Explicit solution by integrating factor + Bernoulli substitution;
/// quadrature of the denominator integral is adaptive Simpson.
OdeValue closed_form(const OdeSpec& spec, double t, double quad_tol = 1e-12);

/// First root of the closed-form denominator (monotone in t when C1 > 0), or
/// blowup=false when the solution is global up to t_max.
OdeValue blowup_time(const OdeSpec& spec, double t_max = 1e12, double quad_tol = 1e-12);

struct Threshold {
    double lambda = 0;       // Z0 < lambda guarantees a global solution
    double J_inf = 0;        // the improper integral
    double error_estimate = 0;
    bool infinite = false;   // C1 = 0: linear equation, always global
};

/// Lambda = ((a-1) C1 J_inf)^{-1/(a-1)}; throws HypothesesViolated naming the
/// failing inequality of the global-existence hypothesis set.
Threshold threshold_lambda(const OdeSpec& spec, double quad_tol = 1e-10);

struct OdeTrajectory {
    std::vector<double> t;
    std::vector<double> z;
    bool blowup = false;
    double t_blow = 0;
    std::string halt;  // empty, "blowup", or "step_underflow"
};

/// Adaptive embedded Dormand-Prince 5(4) integration; stops and reports
/// blow-up when Z exceeds 1e6 * max(1, Z0) / rtol.
OdeTrajectory integrate(const OdeSpec& spec, double t_end, double rtol,
                        const std::vector<double>* sample_times = nullptr);

enum class EnvelopeVerdict { bounded_by, violated_at, not_applicable };

struct EnvelopeResult {
    EnvelopeVerdict verdict = EnvelopeVerdict::bounded_by;
    double t_violate = 0;
    double fitted_C1 = 0, fitted_C2 = 0;
    double slack_used = 0;
};

/// Fits the two prefactors (nonnegative least squares) on the first 10% of
/// the series, integrates the resulting ODE from the series start, and checks
/// the remainder stays below the solution times (1 + slack).
EnvelopeResult envelope_check(const std::vector<double>& t, const std::vector<double>& value,
                              OdeSpec spec, double slack = 0.1);

} // namespace nsvac

#endif
