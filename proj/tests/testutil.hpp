#pragma once

// Shared helpers for the test suites: relative error and seeded random model
// generation across all six families.

#include <random>

#include "fadingmgf/models.hpp"

namespace testutil {

inline double rel(double got, double want)
{
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Deterministic in-range model draws. Shape parameters stay away from the
// documented library limits so quadrature oracles hold their tolerances.
struct ModelGen {
    std::mt19937_64 rng;

    explicit ModelGen(std::uint64_t seed = 0xfad1276u) : rng(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    fadingmgf::FadingModel draw()
    {
        using fadingmgf::FadingModel;
        double alpha = uniform(0.6, 8.0);
        double eta = log_uniform(0.2, 5.0);
        double lambda = uniform(0.0, 0.9);
        double kappa = uniform(0.0, 8.0);
        double mu = log_uniform(0.3, 6.0);
        double gbar = log_uniform(0.1, 50.0);
        switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0:
            return FadingModel::eta_lambda_mu(eta, lambda, mu, gbar);
        case 1:
            return FadingModel::alpha_mu(alpha, mu, gbar);
        case 2:
            return FadingModel::alpha_eta_mu(alpha, eta, mu, gbar);
        case 3:
            return FadingModel::alpha_lambda_mu(alpha, lambda, mu, gbar);
        case 4:
            return FadingModel::alpha_kappa_mu(alpha, kappa, mu, gbar);
        default:
            return FadingModel::alpha_lambda_eta_mu(alpha, lambda, eta, mu, gbar);
        }
    }

    fadingmgf::FadingModel draw_eta_lambda_mu()
    {
        return fadingmgf::FadingModel::eta_lambda_mu(log_uniform(0.2, 5.0),
                                                     uniform(0.0, 0.9),
                                                     log_uniform(0.3, 6.0),
                                                     log_uniform(0.1, 50.0));
    }
};

} // namespace testutil
