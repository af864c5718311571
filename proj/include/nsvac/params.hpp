#ifndef NSVAC_PARAMS_HPP_
#define NSVAC_PARAMS_HPP_

#include <string>
#include <vector>

#include "nsvac/errors.hpp"

namespace nsvac {

/// Which constitutive form the viscous stress takes.
///   standard:       T = rho^delta (alpha(grad u + grad u^T) + beta div u I)
///   gradient_form:  T = rho^delta (2 alpha grad u + beta div u I)
///   laplacian_only: div T = alpha rho^delta lap u  (no first-order source)
enum class ViscosityModel { standard, gradient_form, laplacian_only };

std::string to_string(ViscosityModel m);
ViscosityModel viscosity_model_from_string(const std::string& s);

struct Params {
    double gamma = 2.0;  // adiabatic exponent, > 1
    double delta = 2.0;  // viscosity exponent, > 1
    double alpha = 1.0;  // shear viscosity coefficient, > 0
    double beta = 0.0;   // second viscosity coefficient, 2*alpha + 3*beta >= 0
    double A = 1.0;      // entropy constant, > 0
    double kappa = 0.25; // spectrum gap, > 0
    int dim = 3;
    ViscosityModel model = ViscosityModel::standard;
};

/// Base admissibility inequalities. Violations are data, not failures.
std::vector<std::string> validate(const Params& p);

/// Throws ConstraintViolated if validate() reports anything.
void require_valid(const Params& p);

} // namespace nsvac

#endif
