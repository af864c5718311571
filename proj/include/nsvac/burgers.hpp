#ifndef NSVAC_BURGERS_HPP_
#define NSVAC_BURGERS_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nsvac/field.hpp"
#include "nsvac/linalg.hpp"

namespace nsvac {

/// Analytic initial velocity: evaluators for u0 and its Jacobian, optionally
/// the Hessian (third index pair) for decay studies. Data are expected in
/// Galilean-normalized form, u0(0) = 0.
struct InitialVelocity {
    int dim = 3;
    std::function<Vec(const Vec&)> u0;
    std::function<Mat(const Vec&)> grad_u0;
    // hess(x)[i](j,k) = d_j d_k u0_i; empty when not available
    std::function<std::array<Mat, 3>(const Vec&)> hess_u0;
    double kappa_claimed = 0;

    // Affine background u0 = A x (+ compact perturbation); lets decay studies
    // subtract the curvature-free part before differencing, and gives the
    // support-spread estimate for the sampling boxes.
    bool has_affine = false;
    Mat A{};
    double pert_radius = 0;  // support radius of grad^2 u0 around pert_center
    Vec pert_center{};
    double pert_max = 0;     // sup |u0 - A x|

    static InitialVelocity affine(int dim, const Mat& A);

    /// Finite-difference probe of grad_u0 against u0 at sample points.
    double grad_consistency_error(const std::vector<Vec>& samples, double h = 1e-5) const;
};

/// Exact solution of u_t + u.grad u = 0 by characteristics:
///   X(t;x0) = x0 + t u0(x0),  u(t, X(t;x0)) = u0(x0),
///   grad u(t, X) = (I + t grad u0)^{-1} grad u0.
class BurgersFlow {
public:
    explicit BurgersFlow(InitialVelocity init);

    int dim() const { return init_.dim; }
    const InitialVelocity& init() const { return init_; }

    Vec forward(double t, const Vec& x0) const;

    /// (I + t G0)^{-1} G0 at the characteristic footpoint. Throws
    /// SingularJacobian when |det(I + t G0)| < 1e-12 (characteristic crossing).
    Mat grad_along(double t, const Vec& x0) const;

    /// K(t,x0) = (1+t)^2 (I + t G0)^{-1} G0 - (1+t) I, the bounded correction
    /// in grad u = I/(1+t) + K/(1+t)^2.
    Mat k_matrix(double t, const Vec& x0) const;

    /// Hessian of u(t,.) at x = X(t;x0); needs hess_u0.
    std::array<Mat, 3> hess_along(double t, const Vec& x0) const;
    bool has_hess() const { return static_cast<bool>(init_.hess_u0); }

    struct Eval {
        Vec u;
        Mat grad;
        Vec x0;
        int iters = 0;
    };

    /// Inverts x = X(t;x0) by damped Newton (tolerance 1e-12 on the map
    /// residual, bisection fallback in 1-D) and returns u, grad u at (t,x).
    Eval eval(double t, const Vec& x) const;

private:
    InitialVelocity init_;
};

/// Distance of the spectrum of G to the closed half-line {Re <= 0, Im = 0}:
/// min over eigenvalues z of (|z| if Re z > 0 else |Im z|).
double kappa_distance(const Mat& G);

/// min over sampled Jacobians of min{-1/lambda : lambda real negative
/// eigenvalue}; +infinity when no such eigenvalue exists.
double singular_time(const std::vector<Mat>& vacuum_grads);

/// One row of the background-flow decay study.
struct DecayRow {
    double t = 0;
    std::string quantity;  // "grad<l>_l2" or "grad2_linf"
    double value = 0;
    double predicted_exponent = 0;
};

struct DecaySlope {
    std::string quantity;
    double predicted = 0;
    double fitted = 0;
    double stderr_ = 0;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    std::vector<DecaySlope> slopes;
    std::string csv() const;
};

/// Samples u(t,.) on grids that track the support spread, takes discrete
/// Sobolev norms of the curvature part (the affine background carries no
/// grad^l for l >= 2), and fits log-log slopes over the given window. The
/// sup-norm of grad^2 u is evaluated along characteristics. Asserts the
/// linear-growth bound |u(t,x)| <= |grad u|_inf |x| at every sample.
DecayReport decay_report(const BurgersFlow& flow, int l_min, int l_max,
                         const std::vector<double>& t_grid, const Grid& grid,
                         double fit_t0 = 1.0, double fit_t1 = 100.0);

/// Least squares of log(value) against log(1+t): slope and its standard error.
std::pair<double, double> fit_loglog(const std::vector<double>& t,
                                     const std::vector<double>& value);

} // namespace nsvac

#endif
