#pragma once

// Real-valued special functions and adaptive quadrature.
// Everything here is a pure function; no shared state.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fadingmgf {

inline constexpr double pi_v = 3.14159265358979323846264338327950288;

namespace detail {

// Lanczos approximation, g = 7, 9 terms.
inline double lanczos_ln_gamma(double x)
{
    static constexpr double g = 7.0;
    static constexpr double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    // caller guarantees x >= 0.5
    double a = c[0];
    for (int i = 1; i < 9; ++i)
        a += c[i] / (x - 1.0 + i);
    double t = x + g - 0.5;
    return 0.5 * std::log(2.0 * pi_v) + (x - 0.5) * std::log(t) - t + std::log(a);
}

// Signed sum of a series given the first term and a term-ratio generator.
// Accumulates in scaled space so the result may exceed the double range;
// returns ln|sum| (sign is always +1 for the in-scope argument domains).
template <typename Ratio>
double ln_series_sum(double first_term, Ratio ratio, long max_terms, const char* what)
{
    double sum = first_term;
    double c = 0.0; // Kahan compensation
    double term = first_term;
    double log_scale = 0.0;
    for (long n = 0; n < max_terms; ++n) {
        term *= ratio(n);
        double y = term - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
        if (std::abs(term) <= std::abs(sum) * 1e-17 && n > 4)
            return log_scale + std::log(sum);
        if (std::abs(sum) > 1e250) {
            sum *= 1e-250;
            term *= 1e-250;
            c *= 1e-250;
            log_scale += 250.0 * std::log(10.0);
        }
    }
    throw std::runtime_error(std::string(what) + ": series did not converge");
}

} // namespace detail

// log Gamma(x), x > 0.
inline double ln_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("ln_gamma: requires x > 0");
    if (x < 0.5) // reflection keeps the Lanczos kernel in its sweet spot
        return std::log(pi_v / std::sin(pi_v * x)) - detail::lanczos_ln_gamma(1.0 - x);
    return detail::lanczos_ln_gamma(x);
}

// ln of the regularized Bessel factor 0F1(; nu+1; x^2/4)
//   = ln[ Gamma(nu+1) (x/2)^{-nu} I_nu(x) ].
// Finite for all x >= 0 (equals 0 at x = 0); the compact-form PDFs use it so
// the d -> 0 degenerate rows never hit 0 * inf.
inline double ln_bessel_i_reg(double nu, double x)
{
    if (!(nu > -1.0) || !(x >= 0.0) || !std::isfinite(nu) || !std::isfinite(x))
        throw std::domain_error("ln_bessel_i_reg: requires nu > -1, x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x > std::max(50.0, 1.5 * nu * nu + 40.0)) {
        // Hankel expansion: I_nu(x) ~ e^x/sqrt(2 pi x) sum_k (-1)^k a_k/(8x)^k,
        // a_k = prod_{j<=k} (4 nu^2 - (2j-1)^2) / k!
        double term = 1.0, sum = 1.0;
        const double nu4 = 4.0 * nu * nu;
        for (int k = 1; k <= 40; ++k) {
            double f = (2.0 * k - 1.0);
            term *= -(nu4 - f * f) / (8.0 * x * k);
            double prev = std::abs(term);
            sum += term;
            if (prev < 1e-18 * sum)
                break;
        }
        double ln_i = x - 0.5 * std::log(2.0 * pi_v * x) + std::log(sum);
        return ln_i - nu * std::log(0.5 * x) + ln_gamma(nu + 1.0);
    }
    const double q = 0.25 * x * x;
    // all terms positive; terms peak near k ~ x/2
    long max_terms = 400 + static_cast<long>(3.0 * x);
    return detail::ln_series_sum(
        1.0, [q, nu](long k) { return q / ((k + 1.0) * (nu + k + 1.0)); }, max_terms,
        "ln_bessel_i_reg");
}

// ln I_nu(x); stable for x up to ~1e4 and the nu range used by the models.
inline double ln_bessel_i(double nu, double x)
{
    if (!(nu > -1.0) || !(x >= 0.0) || !std::isfinite(nu) || !std::isfinite(x))
        throw std::domain_error("ln_bessel_i: requires nu > -1, x >= 0");
    if (x == 0.0) {
        if (nu == 0.0)
            return 0.0;
        return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    }
    return nu * std::log(0.5 * x) - ln_gamma(nu + 1.0) + ln_bessel_i_reg(nu, x);
}

inline double bessel_i(double nu, double x)
{
    return std::exp(ln_bessel_i(nu, x));
}

// Gauss hypergeometric 2F1(a, b; c; z) for c > 0, 0 <= z < 1, returned as
// ln of the (positive) sum.  In-scope call sites have a, b > 0, so every
// series term is positive and the forward sum is cancellation-free; z can
// approach 1 (lambda near 1) where the sum grows like (1-z)^{c-a-b}, hence
// the scaled accumulation.
inline double ln_hyp2f1(double a, double b, double c, double z)
{
    if (!(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
        throw std::domain_error("hyp2f1: requires c > 0 and finite arguments");
    if (z < 0.0 || z >= 1.0)
        throw std::domain_error("hyp2f1: requires 0 <= z < 1");
    if (z == 0.0)
        return 0.0;
    // terms behave like n^{a+b-c-1} z^n; the sum peaks near n ~ (a+b-c)/(1-z)
    // and needs ~(40 + (a+b-c-1) ln 1/(1-z))/(-ln z) terms to fall below eps
    double growth = std::max(0.0, a + b - c - 1.0);
    double budget = (50.0 + growth * std::log(1.0 / (1.0 - z))) / -std::log(z);
    long max_terms = 4000 + static_cast<long>(std::min(budget, 2.5e8));
    return detail::ln_series_sum(
        1.0,
        [a, b, c, z](long n) { return (a + n) * (b + n) * z / ((c + n) * (n + 1.0)); },
        max_terms, "hyp2f1");
}

inline double hyp2f1(double a, double b, double c, double z)
{
    return std::exp(ln_hyp2f1(a, b, c, z));
}

// Kummer confluent 1F1(a; b; z) for a, b > 0, z >= 0 (all terms positive);
// ln-valued so kappa-mu arguments in the hundreds do not overflow.
inline double ln_hyp1f1(double a, double b, double z)
{
    if (!(b > 0.0) || !(a > 0.0) || !std::isfinite(z))
        throw std::domain_error("hyp1f1: requires a > 0, b > 0");
    if (z < 0.0)
        throw std::domain_error("hyp1f1: requires z >= 0");
    if (z == 0.0)
        return 0.0;
    long max_terms = 400 + static_cast<long>(4.0 * z + 20.0 * std::sqrt(z));
    return detail::ln_series_sum(
        1.0, [a, b, z](long n) { return (a + n) * z / ((b + n) * (n + 1.0)); }, max_terms,
        "hyp1f1");
}

inline double hyp1f1(double a, double b, double z)
{
    return std::exp(ln_hyp1f1(a, b, z));
}

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0; // absolute
    long evaluations = 0;
    bool converged = false;
};

// Tolerance-not-met, carrying the partial result for diagnostics.
struct QuadratureError : std::runtime_error {
    QuadResult partial;
    explicit QuadratureError(const QuadResult& p)
        : std::runtime_error("quadrature tolerance not met (value " +
                             std::to_string(p.value) + ", error estimate " +
                             std::to_string(p.error_estimate) + ")"),
          partial(p)
    {
    }
};

namespace detail {

// 15-point Gauss-Kronrod pair (QUADPACK qk15 constants).
inline constexpr double gk15_x[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
inline constexpr double gk15_wk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
};
inline constexpr double gk15_wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

struct Segment {
    double lo, hi, value, error;
};

template <typename F>
Segment gk15(const F& f, double lo, double hi)
{
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * gk15_x[i]);
        fv[14 - i] = f(mid + half * gk15_x[i]);
    }
    fv[7] = f(mid);
    for (int i = 0; i < 15; ++i)
        if (!std::isfinite(fv[i]))
            throw std::runtime_error("integrate_adaptive: non-finite integrand value");
    double kron = gk15_wk[7] * fv[7];
    double gauss = gk15_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += gk15_wk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1)
            gauss += gk15_wg[i / 2] * (fv[i] + fv[14 - i]);
    }
    kron *= half;
    gauss *= half;
    // raw |K - G| difference; the QUADPACK (200 err)^1.5 sharpening
    // underestimates on integrands with an endpoint singularity
    double err = std::abs(kron - gauss);
    return {lo, hi, kron, err};
}

} // namespace detail

// Adaptive Gauss-Kronrod over a finite interval.  Worst segment is split
// first; integrable endpoint singularities are handled by subdivision (the
// rule never samples the endpoints).
template <typename F>
QuadResult integrate_adaptive(F&& f, double lo, double hi, double rel_tol = 1e-10,
                              double abs_tol = 1e-14, int max_subdivisions = 2000)
{
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::domain_error("integrate_adaptive: requires finite lo < hi");
    std::vector<detail::Segment> segs;
    segs.push_back(detail::gk15(f, lo, hi));
    long evals = 15;
    for (int iter = 0; iter < max_subdivisions; ++iter) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error)
                worst = i;
        }
        if (err <= std::max(rel_tol * std::abs(total), abs_tol))
            return {total, err, evals, true};
        detail::Segment s = segs[worst];
        double m = 0.5 * (s.lo + s.hi);
        if (m <= s.lo || m >= s.hi)
            break; // interval at floating-point resolution
        segs[worst] = detail::gk15(f, s.lo, m);
        segs.push_back(detail::gk15(f, m, s.hi));
        evals += 30;
    }
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) {
        total += s.value;
        err += s.error;
    }
    return {total, err, evals, err <= std::max(rel_tol * std::abs(total), abs_tol)};
}

// Integral over [0, inf) via gamma = t/(1-t); integrands must decay at least
// exponentially (every in-scope PDF * e^{-s gamma} does).
template <typename F>
QuadResult integrate_semi_infinite(F&& f, double rel_tol = 1e-10, double abs_tol = 1e-14,
                                   int max_subdivisions = 2000)
{
    auto g = [&f](double t) {
        double u = 1.0 - t;
        double fx = f(t / u);
        if (fx == 0.0)
            return 0.0; // avoid 0 * inf when the jacobian overflows
        return fx / (u * u);
    };
    return integrate_adaptive(g, 0.0, 1.0, rel_tol, abs_tol, max_subdivisions);
}

} // namespace fadingmgf
