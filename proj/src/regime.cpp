#include "nsvac/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nsvac {

std::string to_string(ViscosityModel m) {
    switch (m) {
        case ViscosityModel::standard: return "standard";
        case ViscosityModel::gradient_form: return "gradient_form";
        case ViscosityModel::laplacian_only: return "laplacian_only";
    }
    return "standard";
}

ViscosityModel viscosity_model_from_string(const std::string& s) {
    if (s == "standard") return ViscosityModel::standard;
    if (s == "gradient_form") return ViscosityModel::gradient_form;
    if (s == "laplacian_only") return ViscosityModel::laplacian_only;
    throw ConfigError("unknown viscosity model: " + s);
}

std::string to_string(DecayPath p) {
    switch (p) {
        case DecayPath::none: return "none";
        case DecayPath::p0: return "P0";
        case DecayPath::p1: return "P1";
        case DecayPath::p23: return "P2P3";
    }
    return "none";
}

std::vector<std::string> validate(const Params& p) {
    std::vector<std::string> v;
    if (!(p.gamma > 1.0)) v.push_back("gamma > 1");
    if (!(p.delta > 1.0)) v.push_back("delta > 1");
    if (!(p.alpha > 0.0)) v.push_back("alpha > 0");
    if (!(2.0 * p.alpha + 3.0 * p.beta >= 0.0)) v.push_back("2*alpha + 3*beta >= 0");
    if (!(p.A > 0.0)) v.push_back("A > 0");
    if (!(p.kappa > 0.0)) v.push_back("kappa > 0");
    if (p.dim < 1 || p.dim > 3) v.push_back("dim in {1,2,3}");
    return v;
}

void require_valid(const Params& p) {
    auto v = validate(p);
    if (!v.empty()) {
        std::string msg = "inadmissible parameters:";
        for (const auto& s : v) msg += " {" + s + "}";
        throw ConstraintViolated(msg);
    }
}

DecayPath RegimeReport::path() const {
    if (holds_P0) return DecayPath::p0;
    if (holds_P1) return DecayPath::p1;
    if (holds_P2 || holds_P3) return DecayPath::p23;
    return DecayPath::none;
}

double regime_F(double x, double delta, double M1) {
    return x + delta * delta * M1 * M1 / x + 2.0 * M1 * delta - 6.0 * delta + 4.0;
}

// Callers are expected to have run validate(); the degenerate division
// 2*alpha + beta = 0 is still representable and flagged rather than thrown.
RegimeReport derived_constants(const Params& p, double n, double m) {
    RegimeReport rep;
    rep.gamma = p.gamma;
    rep.delta = p.delta;
    rep.alpha = p.alpha;
    rep.beta = p.beta;
    rep.n = n;
    rep.m = m;

    const double g = p.gamma, d = p.delta;
    const bool high_gamma = g >= 5.0 / 3.0;

    rep.r = high_gamma ? -0.5 : 1.5 * g - 3.0;
    for (int k = 0; k < 4; ++k) {
        rep.A_k[static_cast<size_t>(k)] = k - 0.5;
        rep.B_k[static_cast<size_t>(k)] = 1.5 * g - 3.0 + k;
    }
    rep.b_m = high_gamma ? std::min(n - 0.5, 1.5 * d - 3.0 + m)
                         : std::min(1.5 * g - 3.0 + n, 1.5 * d - 3.0 + m);
    rep.iota = (d - 1.0) / (g - 1.0);

    rep.holds_P1 = (2.0 * p.alpha + 3.0 * p.beta == 0.0);
    rep.holds_P2 = (d >= 2.0 * g - 1.0);
    rep.holds_P3 = (d == g);

    const double denom = 2.0 * p.alpha + p.beta;
    rep.division_degenerate = (denom == 0.0);
    if (!rep.division_degenerate) {
        rep.M1 = (2.0 * p.alpha + 3.0 * p.beta) / denom;
        rep.M3 = (d - 1.0) * (d - 1.0) / (4.0 * denom) +
                 4.0 * d * d * denom / ((d - 1.0) * (d - 1.0)) * rep.M1 * rep.M1 +
                 2.0 * rep.M1 * d;
        rep.M2 = -3.0 * d + 1.0 + 0.5 * rep.M3;
        rep.eps_star = 0.5 * std::min({(3.0 * g - 3.0) / 2.0, (-rep.M2 - 1.0) / 2.0, 1.0});
        rep.M4 = rep.eps_star + rep.M2;
        rep.nu_star = std::min({(3.0 * g - 3.0) / (4.0 * (3.0 * g - 1.0)),
                                (-rep.M4 - 1.0) / (6.0 * d - rep.M3), 0.1});
        rep.d_star = 1.5 * d - 3.0 + m - 0.25 * rep.M3;
        rep.b_star = high_gamma ? std::min(2.0, 1.5 * d - 0.25 * rep.M3)
                                : std::min(1.5 * g - 0.5, 1.5 * d - 0.25 * rep.M3);
        rep.holds_P0 = (rep.M1 > 0.0) && (rep.M1 < 1.5 - 1.0 / d) && (rep.M2 < -1.0);
    } else {
        // 2*alpha + beta = 0: the M-constants are undefined; P0 not applicable.
        rep.M1 = rep.M2 = rep.M3 = rep.M4 = 0.0;
        rep.eps_star = rep.nu_star = rep.b_star = rep.d_star = 0.0;
        rep.holds_P0 = false;
    }
    return rep;
}

RegimeReport classify(const Params& p) { return derived_constants(p, 2.5, 3.0); }

DecayPrediction predicted_decay(const RegimeReport& rep, double eta) {
    DecayPrediction out;
    out.path = rep.path();
    if (out.path == DecayPath::none)
        throw NoActiveRegime("no condition among P0..P3 holds for these parameters");

    if (out.path == DecayPath::p0 || out.path == DecayPath::p1) {
        // Decay constant (1-nu)*b. Under P0 the constants of Lemma-5.8 type
        // apply directly; under P1 the same machinery runs with b_m in place
        // of b_star and a free small nu (the cross term carries an extra
        // decaying weight there), fixed here at 1/10.
        const double b = (out.path == DecayPath::p0) ? (1.0 - rep.nu_star) * rep.b_star
                                                     : 0.9 * rep.b_m;
        out.z_exp = -b;
        for (int k = 0; k < 4; ++k) {
            out.y_exp[static_cast<size_t>(k)] = rep.n - k - b;   // -(gamma_k) - b
            out.u_exp[static_cast<size_t>(k)] = rep.m - k - b;   // -(delta_k) - b
        }
        out.u_exp_valid = true;
    } else {
        const double iota = rep.iota;
        if (!(iota >= 2.0 || iota == 1.0))
            throw NoActiveRegime("P2/P3 path needs iota >= 2 or iota = 1");
        if (eta <= 0.0) eta = std::min(0.5 * 3.0 * iota * (rep.gamma - 1.0) / (2.0 * iota - 1.0), 0.01);
        out.eta = eta;
        const double a = rep.r + rep.n;
        out.K_a_iota_eta =
            2.0 * iota * rep.n - 3.0 * iota - 1.0 + 2.0 * iota * eta - eta - 2.0 * iota * a;
        out.smallness_ok = out.K_a_iota_eta < -1.0;
        out.z_exp = -a;  // aggregate Y(t) <= C0 (1+t)^{-(r+n)}
        for (int k = 0; k < 4; ++k) {
            out.y_exp[static_cast<size_t>(k)] = -(k + rep.r);
            out.u_exp[static_cast<size_t>(k)] = -1.5 * iota - rep.r * iota + 1.5 - k;
        }
        out.u_exp_valid = iota >= 2.0;
    }
    return out;
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

std::string report_text(const RegimeReport& rep) {
    std::ostringstream os;
    os << "gamma " << fmt(rep.gamma) << "\n"
       << "delta " << fmt(rep.delta) << "\n"
       << "alpha " << fmt(rep.alpha) << "\n"
       << "beta " << fmt(rep.beta) << "\n"
       << "n " << fmt(rep.n) << "\n"
       << "m " << fmt(rep.m) << "\n"
       << "holds_P0 " << rep.holds_P0 << "\n"
       << "holds_P1 " << rep.holds_P1 << "\n"
       << "holds_P2 " << rep.holds_P2 << "\n"
       << "holds_P3 " << rep.holds_P3 << "\n"
       << "division_degenerate " << rep.division_degenerate << "\n"
       << "path " << to_string(rep.path()) << "\n"
       << "r " << fmt(rep.r) << "\n"
       << "iota " << fmt(rep.iota) << "\n"
       << "b_m " << fmt(rep.b_m) << "\n";
    for (int k = 0; k < 4; ++k)
        os << "A_" << k << " " << fmt(rep.A_k[static_cast<size_t>(k)]) << "\n"
           << "B_" << k << " " << fmt(rep.B_k[static_cast<size_t>(k)]) << "\n";
    if (rep.division_degenerate) {
        os << "M1 n/a\nM2 n/a\nM3 n/a\nM4 n/a\n"
           << "eps_star n/a\nnu_star n/a\nb_star n/a\nd_star n/a\n";
    } else {
        os << "M1 " << fmt(rep.M1) << "\n"
           << "M2 " << fmt(rep.M2) << "\n"
           << "M3 " << fmt(rep.M3) << "\n"
           << "M4 " << fmt(rep.M4) << "\n"
           << "eps_star " << fmt(rep.eps_star) << "\n"
           << "nu_star " << fmt(rep.nu_star) << "\n"
           << "b_star " << fmt(rep.b_star) << "\n"
           << "d_star " << fmt(rep.d_star) << "\n";
    }
    return os.str();
}

std::string report_csv_header() {
    return "gamma,delta,alpha,beta,n,m,holds_P0,holds_P1,holds_P2,holds_P3,"
           "division_degenerate,path,r,iota,b_m,M1,M2,M3,M4,eps_star,nu_star,b_star,d_star,"
           "A_0,A_1,A_2,A_3,B_0,B_1,B_2,B_3";
}

std::string report_csv_row(const RegimeReport& rep) {
    std::ostringstream os;
    os << fmt(rep.gamma) << ',' << fmt(rep.delta) << ',' << fmt(rep.alpha) << ','
       << fmt(rep.beta) << ',' << fmt(rep.n) << ',' << fmt(rep.m) << ',' << rep.holds_P0 << ','
       << rep.holds_P1 << ',' << rep.holds_P2 << ',' << rep.holds_P3 << ','
       << rep.division_degenerate << ',' << to_string(rep.path()) << ',' << fmt(rep.r) << ','
       << fmt(rep.iota) << ',' << fmt(rep.b_m);
    if (rep.division_degenerate)
        os << ",n/a,n/a,n/a,n/a,n/a,n/a,n/a,n/a";
    else
        os << ',' << fmt(rep.M1) << ',' << fmt(rep.M2) << ',' << fmt(rep.M3) << ','
           << fmt(rep.M4) << ',' << fmt(rep.eps_star) << ',' << fmt(rep.nu_star) << ','
           << fmt(rep.b_star) << ',' << fmt(rep.d_star);
    for (int k = 0; k < 4; ++k) os << ',' << fmt(rep.A_k[static_cast<size_t>(k)]);
    for (int k = 0; k < 4; ++k) os << ',' << fmt(rep.B_k[static_cast<size_t>(k)]);
    return os.str();
}

} // namespace nsvac
