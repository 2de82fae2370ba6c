#pragma once

// MGF-based average symbol error rates:
//   P_SER = sum_l E_l Int_0^{theta_l} M( phi / (V - 2 Lambda sin^2 theta) ) dtheta
// with the per-modulation constants (M-PSK, M-DPSK, M-PAM, M-QAM).
//
// The M-DPSK row is shipped exactly as tabulated even though at M = 2 it
// evaluates to M(1) where the classical binary-DPSK average is 0.5*M(1); it
// carries verification_pending so downstream reporting can surface both.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingmgf/mgf.hpp"

namespace fadingmgf {

enum class ModulationScheme { mpsk, mdpsk, mpam, mqam };

inline const char* scheme_name(ModulationScheme s)
{
    switch (s) {
    case ModulationScheme::mpsk: return "mpsk";
    case ModulationScheme::mdpsk: return "mdpsk";
    case ModulationScheme::mpam: return "mpam";
    case ModulationScheme::mqam: return "mqam";
    }
    return "?";
}

struct ModulationSpec {
    ModulationScheme scheme = ModulationScheme::mpsk;
    int M = 2;
    struct Term {
        double prefactor;   // E_l
        double theta_limit; // upper integration limit, radians
    };
    std::vector<Term> terms; // N = terms.size()
    double Lambda = 0.0;
    double V = 0.0;
    double phi = 0.0;
    bool verification_pending = false; // M-DPSK row, shipped as tabulated
};

inline ModulationSpec modulation_spec(ModulationScheme scheme, int M)
{
    if (M < 2)
        throw std::invalid_argument("modulation_spec: order M must be >= 2");
    ModulationSpec spec;
    spec.scheme = scheme;
    spec.M = M;
    switch (scheme) {
    case ModulationScheme::mpsk:
        spec.Lambda = -0.5;
        spec.V = 0.0;
        spec.phi = std::pow(std::sin(pi_v / M), 2);
        spec.terms = {{1.0 / pi_v, pi_v * (M - 1.0) / M}};
        break;
    case ModulationScheme::mdpsk:
        spec.Lambda = std::cos(pi_v / M);
        spec.V = 1.0 + spec.Lambda;
        spec.phi = std::pow(std::sin(pi_v / M), 2);
        spec.terms = {{2.0 / pi_v, pi_v * (M - 1.0) / M}};
        spec.verification_pending = true;
        break;
    case ModulationScheme::mpam:
        spec.Lambda = -0.5;
        spec.V = 0.0;
        spec.phi = 3.0 / (static_cast<double>(M) * M - 1.0);
        spec.terms = {{2.0 * (1.0 - 1.0 / M) / pi_v, 0.5 * pi_v}};
        break;
    case ModulationScheme::mqam: {
        int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
        if (root * root != M || M < 4)
            throw std::invalid_argument(
                "modulation_spec: M-QAM requires a perfect-square order >= 4");
        double f = 1.0 - 1.0 / root;
        spec.Lambda = -0.5;
        spec.V = 0.0;
        spec.phi = 1.5 / (M - 1.0);
        spec.terms = {{4.0 * f / pi_v, 0.5 * pi_v}, {-4.0 * f * f / pi_v, 0.25 * pi_v}};
        break;
    }
    }
    // the Eq.-(12) argument must stay positive on (0, theta_l]; with
    // Lambda > 0 the tightest point is sin^2 = 1
    if (spec.Lambda > 0.0 && !(spec.V - 2.0 * spec.Lambda > 0.0) &&
        spec.terms.front().theta_limit > 0.5 * pi_v)
        throw std::logic_error("modulation_spec: nonpositive MGF argument in range");
    return spec;
}

inline double rayleigh_bpsk_reference(double gbar)
{
    if (!(gbar > 0.0))
        throw std::domain_error("rayleigh_bpsk_reference: requires gbar > 0");
    return 0.5 * (1.0 - std::sqrt(gbar / (1.0 + gbar)));
}

struct AserResult {
    double value = 0.0;
    double quad_error = 0.0; // summed absolute quadrature error estimates
    bool below_floor = false; // value under 1e-15: quadrature noise dominates
};

inline AserResult aser_detailed(const FadingModel& model, const ModulationSpec& spec,
                                MgfStrategy strategy = MgfStrategy::auto_select,
                                const ExpSumFit* fit = nullptr)
{
    ExpSumFit cached;
    MgfStrategy eff = strategy;
    if (eff == MgfStrategy::auto_select)
        eff = model.family == Family::eta_lambda_mu ? MgfStrategy::exact_closed_form
                                                    : MgfStrategy::approx_closed_form;
    if (!strategy_applicable(eff, model.family))
        throw std::invalid_argument(std::string("aser: strategy '") + strategy_name(eff) +
                                    "' not applicable to " + family_name(model.family));
    if (eff == MgfStrategy::approx_closed_form && !fit) {
        cached = get_or_fit(0.5 * model.alpha);
        fit = &cached;
    }
    // The theta-integral re-requests nearby arguments thousands of times when
    // the MGF itself is a quadrature; memoize per call (never shared).
    std::map<double, double> memo;
    CompactParams params = compact_params(model);
    auto mgf_at = [&](double s) {
        if (eff != MgfStrategy::numeric_oracle) {
            switch (eff) {
            case MgfStrategy::exact_closed_form:
                return mgf_eta_lambda_mu_rational(model, s);
            default:
                return model.family == Family::alpha_mu
                           ? mgf_alpha_mu_approx(model, s, *fit)
                           : mgf_unified_approx(model, s, *fit);
            }
        }
        auto it = memo.find(s);
        if (it != memo.end())
            return it->second;
        double v = mgf_numeric(params, s);
        memo.emplace(s, v);
        return v;
    };

    AserResult out;
    for (const auto& term : spec.terms) {
        auto integrand = [&](double theta) {
            double den = spec.V - 2.0 * spec.Lambda * std::pow(std::sin(theta), 2);
            if (!(den > 0.0))
                throw std::domain_error("aser: nonpositive MGF argument (bad modulation coefficients)");
            double s = spec.phi / den;
            // den -> 0 drives s -> inf where the MGF vanishes; the quadrature
            // never samples theta = 0 itself, but guard against overflow
            if (!std::isfinite(s))
                return 0.0;
            return mgf_at(s);
        };
        auto q = integrate_adaptive(integrand, 0.0, term.theta_limit, 1e-8, 1e-305);
        if (!q.converged)
            throw QuadratureError(q);
        out.value += term.prefactor * q.value;
        out.quad_error += std::abs(term.prefactor) * q.error_estimate;
    }
    if (!(out.value > 0.0) || !(out.value < 1.0))
        throw std::runtime_error("aser: result " + std::to_string(out.value) +
                                 " outside (0, 1) (integrity check)");
    out.below_floor = out.value < 1e-15;
    return out;
}

inline double aser(const FadingModel& model, const ModulationSpec& spec,
                   MgfStrategy strategy = MgfStrategy::auto_select,
                   const ExpSumFit* fit = nullptr)
{
    return aser_detailed(model, spec, strategy, fit).value;
}

struct SerCurve {
    FadingModel model_template; // gbar varies per point
    ModulationSpec spec;
    MgfStrategy strategy = MgfStrategy::auto_select;
    struct Point {
        double gbar_db = 0.0;
        double ser = std::numeric_limits<double>::quiet_NaN();
        double quad_error = std::numeric_limits<double>::quiet_NaN();
        std::string error; // empty on success; failures never abort the sweep
    };
    std::vector<Point> points;
};

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline SerCurve aser_sweep(const FadingModel& model_template,
                           const std::vector<double>& gbar_db, const ModulationSpec& spec,
                           MgfStrategy strategy = MgfStrategy::auto_select)
{
    for (std::size_t i = 1; i < gbar_db.size(); ++i)
        if (!(gbar_db[i] > gbar_db[i - 1]))
            throw std::invalid_argument("aser_sweep: gbar_db must be strictly increasing");
    SerCurve curve;
    curve.model_template = model_template;
    curve.spec = spec;
    curve.strategy = strategy;
    curve.points.resize(gbar_db.size());
    for (std::size_t i = 0; i < gbar_db.size(); ++i) {
        auto& pt = curve.points[i];
        pt.gbar_db = gbar_db[i];
        FadingModel m = model_template;
        m.gbar = db_to_linear(gbar_db[i]);
        try {
            AserResult r = aser_detailed(m, spec, strategy);
            pt.ser = r.value;
            pt.quad_error = r.quad_error;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    }
    return curve;
}

} // namespace fadingmgf
