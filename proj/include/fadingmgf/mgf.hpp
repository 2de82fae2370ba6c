#pragma once

// MGF of the fading SNR, three ways: numerical Laplace-transform oracle,
// exact closed forms for eta-lambda-mu (hypergeometric and rational routes),
// and exponential-sum approximations for the alpha families.  Closed forms
// never call quadrature and the oracle never calls closed forms; the test
// suites lean on that independence.

#include <cmath>
#include <stdexcept>

#include "fadingmgf/expfit.hpp"
#include "fadingmgf/models.hpp"

namespace fadingmgf {

enum class MgfStrategy {
    numeric_oracle,
    exact_closed_form,
    approx_closed_form,
    auto_select,
};

inline const char* strategy_name(MgfStrategy s)
{
    switch (s) {
    case MgfStrategy::numeric_oracle: return "numeric";
    case MgfStrategy::exact_closed_form: return "exact";
    case MgfStrategy::approx_closed_form: return "approx";
    case MgfStrategy::auto_select: return "auto";
    }
    return "?";
}

inline bool strategy_applicable(MgfStrategy s, Family f)
{
    if (s == MgfStrategy::exact_closed_form)
        return f == Family::eta_lambda_mu;
    if (s == MgfStrategy::approx_closed_form)
        return f != Family::eta_lambda_mu;
    return true;
}

// Eq.-(5) oracle: direct quadrature of the defining integral.
inline double mgf_numeric(const CompactParams& p, double s, double rel_tol = 1e-10)
{
    if (!(s >= 0.0))
        throw std::domain_error("mgf_numeric: requires s >= 0");
    // abs_tol is effectively off: MGF values at large s are far below 1 and
    // still need full relative accuracy when serving as the oracle
    auto q = integrate_semi_infinite(
        [&p, s](double g) {
            double v = ln_pdf(p, g) - s * g;
            return v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v);
        },
        rel_tol, 1e-305);
    if (!q.converged)
        throw QuadratureError(q);
    return q.value;
}

inline double mgf_numeric(const FadingModel& m, double s, double rel_tol = 1e-10)
{
    return mgf_numeric(compact_params(m), s, rel_tol);
}

// (-1)^k E[gamma^k e^{-s gamma}], by quadrature.
inline double mgf_derivative_numeric(const CompactParams& p, int k, double s,
                                     double rel_tol = 1e-10)
{
    if (k < 0 || k > 4)
        throw std::domain_error("mgf_derivative_numeric: requires 0 <= k <= 4");
    if (!(s >= 0.0))
        throw std::domain_error("mgf_derivative_numeric: requires s >= 0");
    auto q = integrate_semi_infinite(
        [&p, k, s](double g) {
            double v = ln_pdf(p, g) - s * g + k * std::log(g);
            return v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v);
        },
        rel_tol, 1e-305);
    if (!q.converged)
        throw QuadratureError(q);
    return (k % 2 == 0 ? 1.0 : -1.0) * q.value;
}

inline double mgf_derivative_numeric(const FadingModel& m, int k, double s,
                                     double rel_tol = 1e-10)
{
    return mgf_derivative_numeric(compact_params(m), k, s, rel_tol);
}

// Rational eta-lambda-mu closed form:
//   M(s) = [ 4 eta (1-lambda^2) b^2 / ((c + s g)^2 - d^2) ]^mu
// with the compact-form internals at the calibrated scale g.
inline double mgf_eta_lambda_mu_rational(const FadingModel& m, double s)
{
    if (m.family != Family::eta_lambda_mu)
        throw std::invalid_argument("mgf_eta_lambda_mu_rational: family mismatch");
    if (!(s >= 0.0))
        throw std::domain_error("mgf: requires s >= 0");
    CompactParams p = compact_params(m);
    const double num = 4.0 * m.eta * (1.0 - m.lambda * m.lambda) * p.bbar * p.bbar;
    const double cs = p.cbar + s * p.scale;
    const double den = (cs - p.dbar) * (cs + p.dbar); // positive: c > d, s >= 0
    return std::exp(m.mu * (std::log(num) - std::log(den)));
}

// Hypergeometric eta-lambda-mu closed form (Eq.-(7) route); must agree with
// the rational form to ~1e-10, which cross-validates 2F1 and ln_gamma.
inline double mgf_eta_lambda_mu_hyp(const FadingModel& m, double s)
{
    if (m.family != Family::eta_lambda_mu)
        throw std::invalid_argument("mgf_eta_lambda_mu_hyp: family mismatch");
    if (!(s >= 0.0))
        throw std::domain_error("mgf: requires s >= 0");
    CompactParams p = compact_params(m);
    const double ps = p.beta + s;
    if (!(ps > p.d))
        throw std::logic_error("mgf_eta_lambda_mu_hyp: beta + s <= d (parameter audit bug)");
    return std::exp(p.ln_c + ln_bessel_laplace_r1(p.m, p.nu, p.d, ps));
}

// theta_i(s) = B_i s^abar: the exponential-sum substitution variable.
inline double theta_i(const ExpSumFit& fit, int i, double s, double abar)
{
    return fit.B[i] * std::pow(s, abar);
}

namespace detail {

inline void check_fit(const CompactParams& p, const ExpSumFit& fit)
{
    if (std::abs(fit.abar - p.abar) > 1e-12)
        throw std::invalid_argument("approx mgf: fit.abar does not match the model");
}

// Negative a_i allow tiny overshoots near s = 0 that would corrupt the SER
// integrals downstream; clip to (0, 1] but keep the raw value for callers
// that want the diagnostic.
inline double clip_approx(double v, double* unclipped)
{
    if (unclipped)
        *unclipped = v;
    return std::min(1.0, std::max(v, 1e-300));
}

} // namespace detail

// Approximate alpha-mu MGF: sum_i a_i (beta/(beta + theta_i))^mu
// (the Gamma[m/abar]/Gamma(mu) ratio is identically 1 under m = abar mu).
inline double mgf_alpha_mu_approx(const FadingModel& m, double s, const ExpSumFit& fit,
                                  double* unclipped = nullptr)
{
    if (m.family != Family::alpha_mu)
        throw std::invalid_argument("mgf_alpha_mu_approx: family mismatch");
    if (!(s >= 0.0))
        throw std::domain_error("mgf: requires s >= 0");
    CompactParams p = compact_params(m);
    detail::check_fit(p, fit);
    const double sa = std::pow(s, p.abar);
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
        v += fit.a[i] * std::exp(-m.mu * std::log1p(fit.B[i] * sa / p.beta));
    return detail::clip_approx(v, unclipped);
}

// Unified approximate MGF for the Bessel alpha-families (both r branches).
inline double mgf_unified_approx(const FadingModel& m, double s, const ExpSumFit& fit,
                                 double* unclipped = nullptr)
{
    if (m.family != Family::alpha_eta_mu && m.family != Family::alpha_lambda_mu &&
        m.family != Family::alpha_kappa_mu && m.family != Family::alpha_lambda_eta_mu)
        throw std::invalid_argument("mgf_unified_approx: family mismatch");
    if (!(s >= 0.0))
        throw std::domain_error("mgf: requires s >= 0");
    CompactParams p = compact_params(m);
    detail::check_fit(p, fit);
    const double q = p.m / p.abar;
    const double sa = std::pow(s, p.abar);
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double ps = p.beta + fit.B[i] * sa;
        if (p.r == 1.0 && !(ps > p.d))
            throw std::domain_error("mgf_unified_approx: d >= beta + theta_i "
                                    "(outside the closed form's parameter regime)");
        const double lap = p.r == 1.0 ? ln_bessel_laplace_r1(q, p.nu, p.d, ps)
                                      : ln_bessel_laplace_r05(q, p.nu, p.d, ps);
        v += fit.a[i] * std::exp(p.ln_c - std::log(p.abar) + lap);
    }
    return detail::clip_approx(v, unclipped);
}

// Strategy dispatcher.  auto picks the exact closed form for eta-lambda-mu
// and the approximate one for the alpha families; when no fit is supplied
// the approximate path pulls one from the shared get_or_fit cache.
inline double mgf(const FadingModel& m, double s, const ExpSumFit* fit = nullptr,
                  MgfStrategy strategy = MgfStrategy::auto_select)
{
    MgfStrategy eff = strategy;
    if (eff == MgfStrategy::auto_select)
        eff = m.family == Family::eta_lambda_mu ? MgfStrategy::exact_closed_form
                                                : MgfStrategy::approx_closed_form;
    if (!strategy_applicable(eff, m.family))
        throw std::invalid_argument(std::string("mgf: strategy '") + strategy_name(eff) +
                                    "' not applicable to " + family_name(m.family));
    switch (eff) {
    case MgfStrategy::numeric_oracle:
        return mgf_numeric(m, s);
    case MgfStrategy::exact_closed_form:
        return mgf_eta_lambda_mu_rational(m, s);
    case MgfStrategy::approx_closed_form: {
        ExpSumFit cached;
        if (!fit) {
            cached = get_or_fit(0.5 * m.alpha);
            fit = &cached;
        }
        return m.family == Family::alpha_mu ? mgf_alpha_mu_approx(m, s, *fit)
                                            : mgf_unified_approx(m, s, *fit);
    }
    default:
        throw std::logic_error("mgf: unreachable");
    }
}

inline double mgf(const FadingModel& m, double s, MgfStrategy strategy)
{
    return mgf(m, s, nullptr, strategy);
}

} // namespace fadingmgf
