#ifndef NSVAC_DIAGNOSTICS_HPP_
#define NSVAC_DIAGNOSTICS_HPP_

#include <array>
#include <deque>
#include <string>
#include <vector>

#include "nsvac/regime.hpp"
#include "nsvac/solver.hpp"

namespace nsvac {

struct ConservedQuantities {
    double mass = 0;
    Vec momentum{};
    double kinetic = 0;
};

/// Rectangle sums of rho, rho u, rho |u|^2 / 2. Also asserts the quadrature
/// Cauchy-Schwarz chain |P| <= sqrt(2 m E_k), which is an algebraic identity
/// of the sums.
ConservedQuantities conserved(const Solver::Physical& phys);

struct KineticBoundVerdict {
    bool applicable = false;  // needs |P(0)| > 0
    bool ok = true;
    double t_fail = 0;
    double margin = 0;  // min over samples of Ek(t) - bound
};

/// Time-weighted energies with offsets gamma_k = k - n, delta_k = k - m.
struct WeightedEnergy {
    std::array<double, 4> Yk{}, Uk{};
    double Y = 0, U = 0, Z = 0;
    double lemma51_ratio = 0;  // |W|_inf / ((1+t)^{(2n-3)/2} Y)
};

WeightedEnergy weighted_energy(const ReformState& s, double n, double m, int stencil_order = 2);

/// Least squares of log(value) on log(1+t) restricted to [t0, t1]; needs at
/// least 20 positive samples in the window (FitDegenerate otherwise).
std::pair<double, double> fit_decay(const std::vector<double>& t,
                                    const std::vector<double>& value, double t0, double t1);

/// One diagnostics row per output stride.
struct DiagRow {
    double t = 0;
    double mass = 0;
    Vec momentum{};
    double kinetic = 0;
    double u_linf = 0;
    double grad_u_linf = 0;
    std::array<double, 4> Yk{}, Uk{};
    double Y = 0, U = 0, Z = 0;
    double lemma51_ratio = 0;
    double vacuum_residual = 0;
    double support_radius = 0;
    double support_envelope = 0;
    double clamped_step = 0;
    double clamped_total = 0;
    double dual_gap = 0;
    double dt = 0;
};

class DiagnosticsSeries {
public:
    void add(const DiagRow& row);
    const std::vector<DiagRow>& rows() const { return rows_; }
    std::vector<double> times() const;
    /// Column by name: mass, momentum0.., kinetic, u_linf, grad_u_linf,
    /// Y, U, Z, Y0..Y3, U0..U3, vacuum_residual, support_radius, ...
    std::vector<double> column(const std::string& name) const;
    std::string csv() const;

private:
    std::vector<DiagRow> rows_;
};

KineticBoundVerdict kinetic_lower_bound(const DiagnosticsSeries& series, double tol = 1e-3);

struct BlowupEvent {
    double t = 0;
    std::string kind;  // "grad_threshold" or "dt_collapse"
    double value = 0;
};

std::vector<BlowupEvent> blowup_monitor(const DiagnosticsSeries& series, double grad_threshold,
                                        double dt_floor);

struct SupportStatus {
    double radius = 0;
    double envelope = 0;
    bool ok = true;
};

/// Wrap-around guard for a snapshot against the box half-width.
SupportStatus support_tracker(const Snapshot& snap, double extent, double spacing);

/// Stride observer that fills a DiagnosticsSeries: conserved quantities,
/// weighted energies at the report offsets (n, m), sup norms, vacuum
/// residual from 2nd-order backward differencing of the last three stored
/// snapshots, support radius/envelope and clamp accounting.
class Recorder {
public:
    Recorder(DiagnosticsSeries& out, double n, double m, double vacuum_floor);
    void operator()(const Solver& solver, const Snapshot& snap);
    Observer observer();

private:
    DiagnosticsSeries* out_;
    double n_, m_, floor_;
    std::deque<std::pair<double, Field>> w_hist_;
};

} // namespace nsvac

#endif
