#ifndef NSVAC_INIT_DATA_HPP_
#define NSVAC_INIT_DATA_HPP_

#include <optional>
#include <string>

#include "nsvac/burgers.hpp"
#include "nsvac/field.hpp"
#include "nsvac/params.hpp"

namespace nsvac {

enum class DensityKind { inverse_power, bump_power, gaussian, anisotropic_power };

std::string to_string(DensityKind k);
DensityKind density_kind_from_string(const std::string& s);

/// Admissible density profiles:
///   inverse_power:     eps1 / (1+|x|)^{2 sigma}
///   bump_power:        eps1 * g(|x|/width)^{2 sigma},  g a C^inf bump
///   gaussian:          eps1 * exp(-|x - center|^2 / width^2)
///   anisotropic_power: eps1 |x| / (1+|x|)^{2 sigma}
/// The exponent constraints tie sigma to (gamma, delta); construction rejects
/// profiles outside them.
struct DensityFamily {
    DensityKind kind = DensityKind::gaussian;
    double eps1 = 1e-2;
    double sigma = 3.0;
    double width = 1.0;
    Vec center{};
};

double density_at(const DensityFamily& f, const Vec& x);
Field build_density(const DensityFamily& f, const Grid& g, const Params& p);

enum class PerturbKind { none, gaussian_bump, slope_well };

std::string to_string(PerturbKind k);
PerturbKind perturb_kind_from_string(const std::string& s);

/// u0 = A x + b + eps2 f(x). Construction Galilean-normalizes so u0(0) = 0
/// (the shift is returned), checks the eigenvalues of A against 2*kappa and
/// the sampled spectrum-gap condition; set enforce_gap = false to build
/// deliberately singular data for blow-up studies.
struct VelocityFamily {
    Mat A = Mat::identity(3);
    Vec b{};
    double eps2 = 0;
    PerturbKind pert = PerturbKind::none;
    double pert_width = 1.0;
    Vec pert_center{};
    double kappa = 0.25;
    bool enforce_gap = true;
};

struct VelocityData {
    Field u0_grid;             // sampled on the grid
    InitialVelocity analytic;  // evaluators for the characteristic machinery
    Vec galilean_shift;        // u0_raw(0), subtracted off
    double min_kappa_distance = 0;
};

VelocityData build_velocity(const VelocityFamily& f, const Grid& g, const Params& p);

/// Smooth radial cutoff profile: 1 on s <= 1, 0 on s >= 2,
/// g(2-s)/(g(2-s)+g(s-1)) with g(s) = exp(-1/s) in between.
double cutoff_profile(double s);

/// Multiplies by the transition rescaled to [R, 2R]. Throws SupportExceedsBox
/// unless 2R fits strictly inside the grid box.
Field cutoff(const Field& f, double R);

/// Reformulated initial data: varphi0 = rho0^{(delta-1)/2},
/// phi0 = sqrt(4 A gamma/(gamma-1)^2) rho0^{(gamma-1)/2}, w0 = 0.
struct ReformInit {
    Field varphi0, phi0, w0;
};

ReformInit to_reform(const Field& rho0, const Params& p);

struct SmallnessReport {
    double phi_h3 = 0;
    double varphi_h3 = 0;
    double total = 0;
    double D0 = 0;
    bool within = false;
    bool varphi_nonbinding = false;  // P2 removes the varphi0 smallness
};

SmallnessReport smallness_report(const ReformInit& init, double D0, bool holds_P2);

} // namespace nsvac

#endif
