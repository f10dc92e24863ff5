// SPDX-License-Identifier: Apache-2.0
//
// ergocap: transmit covariance and water-filling tools for ergodic MIMO channels
// Copyright (C) 2026 The ergocap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "ergocap/channels.hpp"
#include "ergocap/density.hpp"
#include "ergocap/linalg.hpp"
#include "ergocap/montecarlo.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace ergocap
{
    // Water-filling over known gains for one channel use
    struct DetWaterfill
    {
        double mu = 0.0;      // water level
        RealVector powers;    // (mu - 1/lambda_i)^+, input order
        double rate = 0.0;    // sum ln(mu lambda_i) over active modes, nats
        std::size_t active = 0;
    };

    DetWaterfill waterfill_det(const RealVector &lambda, double budget);

    // Space-time water level xi solving gamma/m = int_{1/xi}^inf (xi - 1/lambda) f(lambda) dlambda
    double st_water_level(const EigDensity &f, double gamma, std::size_t m);

    // C = m int_{1/xi}^inf ln(xi lambda) f(lambda) dlambda, nats
    double st_capacity(const EigDensity &f, double gamma, std::size_t m);

    // Capacity for a level already solved
    double st_capacity_at(const EigDensity &f, double xi, std::size_t m);

    // Water-filling applied per channel draw, then averaged (short-term power constraint)
    ScalarEstimate naive_avg_rate(const ChannelLaw &law, double gamma, const McConfig &cfg);

    // m int ln(1 + gamma lambda / m) f dlambda: equal power on every mode, no transmit channel knowledge
    double equal_power_rate(const EigDensity &f, double gamma, std::size_t m);

    // Q[k] = V^H diag((xi - 1/lambda_i)^+) V for the realized channel, t x t
    HermitianMatrix instantaneous_covariance(const ComplexMatrix &h, double xi);

    // Peak to average power ratio m xi / gamma
    double papr_exact(double xi, double gamma, std::size_t m);

    // 1 + (m / gamma) E[1/lambda]; +inf when E[1/lambda] diverges
    double papr_bound(const EigDensity &f, double gamma, std::size_t m);

    // Density of the power put on one eigen-mode
    struct PowerDensity
    {
        double xi = 0.0;
        double zero_atom = 0.0;                          // P(power = 0) = F(1/xi)
        std::vector<std::pair<double, double>> atoms;    // (power, probability) for point masses above 1/xi
        RealVector grid;                                 // power values where the continuous part is evaluated
        RealVector pdf;                                  // f(1/(xi-g)) / (xi-g)^2
    };

    // Grid points must lie in [0, xi); std::domain_error otherwise
    PowerDensity power_density(const EigDensity &f, double gamma, std::size_t m, const RealVector &grid);

    struct PeakLimitedRate
    {
        double xi = 0.0;
        double rate = 0.0;
        bool truncated = false; // false when the unconstrained level already respects the cap
    };

    // Space-time water-filling with the integrals truncated at lambda = 1/(xi - gamma_max).
    // Throws infeasible_error when no level reaches the budget.
    PeakLimitedRate peak_limited_rate(const EigDensity &f, double gamma, double gamma_max, std::size_t m);
}
