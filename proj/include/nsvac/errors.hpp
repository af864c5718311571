#ifndef NSVAC_ERRORS_HPP_
#define NSVAC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nsvac {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankMismatch : Error { using Error::Error; };

struct SingularJacobian : Error {
    double det;
    explicit SingularJacobian(double d)
        : Error("characteristic Jacobian singular, |det| = " + std::to_string(d)), det(d) {}
};

struct NewtonDiverged : Error {
    double residual;
    int iters;
    NewtonDiverged(double r, int it)
        : Error("characteristic inversion did not converge, residual " + std::to_string(r)),
          residual(r), iters(it) {}
};

struct EigSolverFailure : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };

struct HypothesesViolated : Error {
    std::string which;
    explicit HypothesesViolated(const std::string& w)
        : Error("growth-bound hypotheses violated: " + w), which(w) {}
};

struct StepSizeUnderflow : Error {
    double t;
    explicit StepSizeUnderflow(double tt)
        : Error("step size underflow at t = " + std::to_string(tt)), t(tt) {}
};

struct FitDegenerate : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct SupportExceedsBox : Error { using Error::Error; };
struct NegativeDensity : Error { using Error::Error; };
struct NegativePhi : Error { using Error::Error; };

struct NonFinite : Error {
    std::string term;
    explicit NonFinite(const std::string& t)
        : Error("non-finite value produced by term: " + t), term(t) {}
};

struct ZeroDt : Error { using Error::Error; };
struct NegativityBreach : Error { using Error::Error; };
struct NoContraction : Error { using Error::Error; };
struct NoActiveRegime : Error { using Error::Error; };
struct BoundViolated : Error {
    double t_fail;
    explicit BoundViolated(double t)
        : Error("lower bound violated at t = " + std::to_string(t)), t_fail(t) {}
};
struct ConfigError : Error { using Error::Error; };

} // namespace nsvac

#endif
