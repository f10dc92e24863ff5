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

#include "ergocap/special.hpp"
#include "ergocap/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ergocap
{
    namespace
    {
        constexpr double euler_gamma = 0.57721566490153286061;

        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        double e1_series(double x)
        {
            double sum = 0.0, term = 1.0;
            for (int k = 1; k < 200; ++k)
            {
                term *= -x / k;
                const double add = term / k;
                sum += add;
                if (std::abs(add) < 1e-17 * std::abs(sum))
                    break;
            }
            return -euler_gamma - std::log(x) - sum;
        }

        // e^x E1(x) by modified Lentz on the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...)))
        double e1_scaled_cf(double x)
        {
            const double tiny = 1e-300;
            double b = x + 1.0;
            double c = 1.0 / tiny;
            double d = 1.0 / b;
            double h = d;
            for (int i = 1; i < 10000; ++i)
            {
                const double an = -static_cast<double>(i) * static_cast<double>(i);
                b += 2.0;
                d = 1.0 / (an * d + b);
                c = b + an / c;
                const double del = c * d;
                h *= del;
                if (std::abs(del - 1.0) < 1e-16)
                    return h;
            }
            throw numerical_error("expint_gamma0: continued fraction did not converge at x = " + std::to_string(x));
        }
    }

    double expint_gamma0(double x)
    {
        if (!(x > 0.0))
            throw std::domain_error("expint_gamma0: x must be positive, got " + std::to_string(x));
        if (x < 1.0)
            return e1_series(x);
        return std::exp(-x) * e1_scaled_cf(x);
    }

    double expint_scaled(double x)
    {
        if (!(x > 0.0))
            throw std::domain_error("expint_scaled: x must be positive, got " + std::to_string(x));
        if (x < 1.0)
            return std::exp(x) * e1_series(x);
        if (std::isinf(x))
            return 0.0;
        return e1_scaled_cf(x);
    }

    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    double linear_to_db(double v) { return 10.0 * std::log10(v); }
}
