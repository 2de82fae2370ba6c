#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fadingmgf/errorrates.hpp"
#include "testutil.hpp"

using namespace fadingmgf;
using testutil::rel;

TEST_CASE("modulation table rows")
{
    auto bpsk = modulation_spec(ModulationScheme::mpsk, 2);
    CHECK(bpsk.terms.size() == 1);
    CHECK(bpsk.terms[0].prefactor == doctest::Approx(1.0 / pi_v));
    CHECK(bpsk.Lambda == doctest::Approx(-0.5));
    CHECK(bpsk.V == doctest::Approx(0.0));
    CHECK(bpsk.phi == doctest::Approx(1.0));
    CHECK(bpsk.terms[0].theta_limit == doctest::Approx(pi_v / 2.0));

    auto qam16 = modulation_spec(ModulationScheme::mqam, 16);
    CHECK(qam16.terms.size() == 2);
    CHECK(qam16.phi == doctest::Approx(0.1));
    CHECK(qam16.terms[0].prefactor == doctest::Approx(4.0 * 0.75 / pi_v));
    CHECK(qam16.terms[1].prefactor == doctest::Approx(-4.0 * 0.5625 / pi_v));
    CHECK(qam16.terms[0].theta_limit == doctest::Approx(pi_v / 2.0));
    CHECK(qam16.terms[1].theta_limit == doctest::Approx(pi_v / 4.0));

    auto pam4 = modulation_spec(ModulationScheme::mpam, 4);
    CHECK(pam4.terms[0].prefactor == doctest::Approx(2.0 * 0.75 / pi_v));
    CHECK(pam4.phi == doctest::Approx(0.2));
    CHECK(pam4.terms[0].theta_limit == doctest::Approx(pi_v / 2.0));

    CHECK(modulation_spec(ModulationScheme::mdpsk, 2).verification_pending);
    CHECK_THROWS_AS(modulation_spec(ModulationScheme::mqam, 8), std::invalid_argument);
    CHECK_THROWS_AS(modulation_spec(ModulationScheme::mpsk, 1), std::invalid_argument);
}

TEST_CASE("rayleigh BPSK closed-form oracle, all strategies")
{
    auto bpsk = modulation_spec(ModulationScheme::mpsk, 2);
    for (double db : {0.0, 5.0, 10.0, 20.0}) {
        double g = db_to_linear(db);
        double ref = rayleigh_bpsk_reference(g);
        CHECK(rel(aser(FadingModel::eta_lambda_mu(1.0, 0.0, 0.5, g), bpsk,
                       MgfStrategy::exact_closed_form),
                  ref) < 1e-6);
        CHECK(rel(aser(rayleigh(g), bpsk, MgfStrategy::numeric_oracle), ref) < 1e-6);
        CHECK(rel(aser(rayleigh(g), bpsk, MgfStrategy::approx_closed_form), ref) < 1e-6);
    }
    CHECK(rayleigh_bpsk_reference(1.0) == doctest::Approx(0.146447).epsilon(1e-5));
    CHECK(rel(rayleigh_bpsk_reference(10.0), 0.5 * (1.0 - std::sqrt(10.0 / 11.0))) <
          1e-15);
}

TEST_CASE("route equivalences and limits")
{
    auto bpsk = modulation_spec(ModulationScheme::mpsk, 2);
    auto pam2 = modulation_spec(ModulationScheme::mpam, 2);
    for (double g : {1.0, 10.0})
        CHECK(rel(aser(rayleigh(g), bpsk), aser(rayleigh(g), pam2)) < 1e-12);
    CHECK(rel(aser(nakagami_m(1.0, 5.0), bpsk), aser(rayleigh(5.0), bpsk)) < 1e-9);
    // no-signal limit: MGF -> 1, integral -> (1/pi)(pi/2)
    CHECK(std::abs(aser(rayleigh(1e-6), bpsk) - 0.5) < 1e-3);
}

TEST_CASE("binary DPSK evaluates the MGF at s=1 as tabulated")
{
    auto d2 = modulation_spec(ModulationScheme::mdpsk, 2);
    double v = aser(rayleigh(1.0), d2, MgfStrategy::numeric_oracle);
    CHECK(rel(v, mgf_numeric(rayleigh(1.0), 1.0)) < 1e-7);
}

TEST_CASE("aser stays within (0,1) and orders by M and gbar")
{
    auto q4 = modulation_spec(ModulationScheme::mqam, 4);
    auto q16 = modulation_spec(ModulationScheme::mqam, 16);
    double v4 = aser(rayleigh(100.0), q4, MgfStrategy::numeric_oracle);
    double v16 = aser(rayleigh(100.0), q16, MgfStrategy::numeric_oracle);
    CHECK(v4 > 0.0);
    CHECK(v16 < 1.0);
    CHECK(v16 > v4);

    auto p4 = modulation_spec(ModulationScheme::mpsk, 4);
    auto p8 = modulation_spec(ModulationScheme::mpsk, 8);
    CHECK(aser(rayleigh(50.0), p8, MgfStrategy::numeric_oracle) >
          aser(rayleigh(50.0), p4, MgfStrategy::numeric_oracle));
}

TEST_CASE("below-floor detection at extreme SNR")
{
    auto bpsk = modulation_spec(ModulationScheme::mpsk, 2);
    auto r = aser_detailed(nakagami_m(8.0, db_to_linear(45.0)), bpsk,
                           MgfStrategy::approx_closed_form);
    CHECK(r.below_floor);
    CHECK(r.value < 1e-15);
}

TEST_CASE("sweeps: monotone curves, per-point errors, strategy agreement")
{
    auto bpsk = modulation_spec(ModulationScheme::mpsk, 2);
    std::vector<double> grid;
    for (double db = -5.0; db <= 30.0 + 1e-9; db += 5.0)
        grid.push_back(db);

    auto c = aser_sweep(rayleigh(1.0), grid, bpsk);
    REQUIRE(c.points.size() == grid.size());
    for (std::size_t i = 1; i < c.points.size(); ++i)
        CHECK(c.points[i].ser < c.points[i - 1].ser);

    // kappa ordering at fixed gbar
    double prev = 1.0;
    for (double kap : {0.0, 1.0, 3.0}) {
        double v = aser(FadingModel::alpha_kappa_mu(2.0, kap, 1.0, 10.0), bpsk);
        CHECK(v < prev);
        prev = v;
    }

    // exact vs numeric strategies agree within 1e-6 absolute
    auto m = FadingModel::eta_lambda_mu(2.0, 0.3, 1.5, 1.0);
    auto ce = aser_sweep(m, grid, bpsk, MgfStrategy::exact_closed_form);
    auto cn = aser_sweep(m, grid, bpsk, MgfStrategy::numeric_oracle);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(ce.points[i].ser - cn.points[i].ser) < 1e-6);

    // inapplicable strategy is recorded per point, not thrown
    auto bad = aser_sweep(rayleigh(1.0), grid, bpsk, MgfStrategy::exact_closed_form);
    for (const auto& p : bad.points)
        CHECK_FALSE(p.error.empty());

    // non-increasing grids are rejected up front
    CHECK_THROWS_AS(aser_sweep(rayleigh(1.0), {0.0, 0.0, 5.0}, bpsk),
                    std::invalid_argument);
}
