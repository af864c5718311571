#ifndef NSVAC_REGIME_HPP_
#define NSVAC_REGIME_HPP_

#include <array>
#include <string>

#include "nsvac/params.hpp"

namespace nsvac {

enum class DecayPath { none, p0, p1, p23 };

std::string to_string(DecayPath p);

/// Everything the small-density global theory derives from (gamma, delta,
/// alpha, beta): the parameter conditions P0..P3, the time-weight offsets,
/// and the decay exponents the energy bounds predict. Pure function of
/// Params + weight offsets (n, m); division_degenerate marks 2*alpha+beta=0,
/// where the M-constants are undefined (P0 not applicable, never silent NaN).
struct RegimeReport {
    // inputs echoed
    double gamma = 0, delta = 0, alpha = 0, beta = 0;
    double n = 2.5, m = 3.0;

    bool holds_P0 = false, holds_P1 = false, holds_P2 = false, holds_P3 = false;
    bool division_degenerate = false;  // 2*alpha + beta == 0

    double M1 = 0, M2 = 0, M3 = 0, M4 = 0;
    double r = 0;
    std::array<double, 4> A_k{}, B_k{};
    double b_m = 0;
    double d_star = 0;  // 3*delta/2 - 3 + m - M3/4
    double eps_star = 0, nu_star = 0, b_star = 0;
    double iota = 0;  // (delta-1)/(gamma-1)

    DecayPath path() const;
};

/// Decay exponent tables: value(t) <~ (1+t)^exponent.
struct DecayPrediction {
    DecayPath path = DecayPath::none;
    std::array<double, 4> y_exp{};  // |grad^k W|_2
    std::array<double, 4> u_exp{};  // |grad^k varphi|_2
    bool u_exp_valid = false;       // P2/P3 path gives it only for iota >= 2
    double z_exp = 0;               // aggregate weighted energy
    double eta = 0;                 // smallness parameter used on P2/P3 path
    double K_a_iota_eta = 0;        // must be < -1 on the P2/P3 path
    bool smallness_ok = true;
};

/// Populates booleans + constants with the default weights n=2.5, m=3.
RegimeReport classify(const Params& p);

/// Same with caller-chosen weight offsets.
RegimeReport derived_constants(const Params& p, double n, double m);

/// Per-k exponent tables for the active path. Throws NoActiveRegime if no
/// condition holds. eta <= 0 picks the default
/// min(0.5 * 3*iota*(gamma-1)/(2*iota-1), 0.01).
DecayPrediction predicted_decay(const RegimeReport& rep, double eta = 0);

/// Remark-style helper: F(x) = x + delta^2 M1^2 / x + 2 M1 delta - 6 delta + 4.
double regime_F(double x, double delta, double M1);

/// Flat key-value text block of a report.
std::string report_text(const RegimeReport& rep);

/// CSV header/row (one column per constant).
std::string report_csv_header();
std::string report_csv_row(const RegimeReport& rep);

} // namespace nsvac

#endif
