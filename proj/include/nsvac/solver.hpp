#ifndef NSVAC_SOLVER_HPP_
#define NSVAC_SOLVER_HPP_

#include <functional>
#include <string>
#include <vector>

#include "nsvac/burgers.hpp"
#include "nsvac/field.hpp"
#include "nsvac/init_data.hpp"
#include "nsvac/params.hpp"

namespace nsvac {

/// Solver state: varphi = rho^{(delta-1)/2}, phi the scaled rho^{(gamma-1)/2},
/// w = u - ubar with ubar the exact background flow.
struct ReformState {
    double t = 0;
    Field varphi, phi, w;

    static ReformState zero(const Grid& g);
    static ReformState from_init(const ReformInit& init);
    bool all_finite() const;
};

enum class SolverMode { direct, picard };
enum class AdvectionScheme { central_filtered, upwind1 };

struct SolverConfig {
    SolverMode mode = SolverMode::direct;
    double cfl = 0.45;
    AdvectionScheme advection = AdvectionScheme::central_filtered;
    double dt_viscous_safety = 0.9;
    double end_time = 1.0;
    double output_stride = 0.01;
    double vacuum_floor = 1e-12;
    int stencil_order = 2;
    double filter_eps = 1.0;        // 4th-difference filter strength in (0,1]
    double grad_threshold = 200.0;  // |grad u|_inf blow-up monitor
    double picard_eta = 0.0;        // extra uniform ellipticity in picard mode
    double initial_support_radius = 0.0;  // 0: measured from the data
};

/// One rate vector for (varphi, phi, w).
struct StateRate {
    Field varphi, phi, w;
    static StateRate zero(const Grid& g);
    void add(const StateRate& o, double s = 1.0);
};

/// Named pieces of the right-hand side; their sum is the full rate.
///   transport_phi: the varphi transport row
///   hyperbolic_W:  self-advection + acoustic coupling of (phi, w)
///   elliptic_W:    -varphi^2 L w
///   source_HQ:     grad(varphi^2) . Q(w + ubar)
///   source_G:      every background-flow coupling term
struct RhsDecomposition {
    StateRate transport_phi, hyperbolic_W, elliptic_W, source_HQ, source_G;
    StateRate total() const;
};

class Solver;

/// Structured halt record.
struct HaltReason {
    enum Code {
        completed,
        gradient_threshold,
        zero_dt,
        negativity_breach,
        non_finite,
        support_wraparound
    } code = completed;
    double t = 0;
    std::string detail;
    bool is_blowup() const { return code != completed; }
    std::string text() const;
};

struct Snapshot {
    ReformState state;
    double dt_last = 0;
    double clamped_mass_step = 0;   // clamp added in the last step
    double clamped_mass_total = 0;
    double support_radius = 0;
    double support_envelope = 0;
};

using Observer = std::function<void(const Solver&, const Snapshot&)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Snapshot> snapshots;  // kept only when keep_snapshots
    HaltReason halt;
    std::vector<std::pair<double, double>> dt_log;  // (t, dt)
};

class Solver {
public:
    Solver(const ReformInit& init, const BurgersFlow& flow, const Params& params,
           const SolverConfig& config);

    const Params& params() const { return params_; }
    const SolverConfig& config() const { return config_; }
    const BurgersFlow& flow() const { return flow_; }
    const Grid& grid() const { return grid_; }
    const ReformState& state() const { return state_; }

    /// Background flow sampled on the grid at time t. Velocity, gradient and
    /// the Lame term are all evaluated analytically along characteristics, so
    /// the periodic seam never differentiates the affine growth of ubar.
    struct BackgroundSample {
        Field u;       // vector
        Field grad;    // matrix, d_j ubar_i at i*d+j
        Field lame_u;  // vector, L(ubar) from Hessian samples
        double grad_linf = 0;
    };
    BackgroundSample sample_background(double t) const;

    RhsDecomposition rhs(const ReformState& s) const;

    double stable_dt(const ReformState& s) const;

    /// One SSP-RK3 step of size dt; applies the filter (central_filtered
    /// scheme) and the nonnegativity clamp, and accounts the clamped mass.
    void step(double dt);

    /// Advances to config.end_time, invoking observers every output stride.
    Trajectory run(const std::vector<Observer>& observers = {}, bool keep_snapshots = false);

    /// Physical variables: rho from phi (with the scaling constant), u = w +
    /// ubar; also the dual density from varphi and their max relative gap on
    /// {rho > vacuum_floor}.
    struct Physical {
        Field rho, u;
        Field rho_dual;
        double dual_gap = 0;
    };
    Physical to_physical() const { return to_physical(state_); }
    Physical to_physical(const ReformState& s) const;

    double clamped_mass_total() const { return clamp_total_; }
    double clamped_mass_last_step() const { return clamp_last_; }
    double support_radius(const ReformState& s) const;
    double support_envelope() const { return envelope_; }

private:
    Grid grid_;
    Params params_;
    SolverConfig config_;
    const BurgersFlow& flow_;
    ReformState state_;
    double clamp_total_ = 0;
    double clamp_last_ = 0;
    double envelope_ = 0;        // (zhengVC)-style radius bound, integrated in time
    double mass_scale_ = 0;      // reference sum(phi) h^d at t=0

    void apply_filter(ReformState& s) const;
    double clamp_negative(ReformState& s);
    void advance_envelope(double dt, const BackgroundSample& bg, const ReformState& s);
};

/// rho = ((gamma-1)^2/(4 A gamma))^{1/(gamma-1)} phi^{2/(gamma-1)}.
double phi_to_rho_prefactor(const Params& p);

/// sum_a vel_a d_a f with the configured advection discretization.
Field advect(const Field& f, const Field& vel, AdvectionScheme scheme, int stencil_order);

} // namespace nsvac

#endif
