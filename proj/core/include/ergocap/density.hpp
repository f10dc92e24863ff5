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

#include "ergocap/linalg.hpp"

#include <cstddef>
#include <functional>
#include <limits>

namespace ergocap
{
    // Truncated moments over (lo, hi] of an eigenvalue density
    struct TailMoments
    {
        double mass = 0.0;    // P(lo < lambda <= hi)
        double inverse = 0.0; // E[1/lambda ; lo < lambda <= hi]
        double log = 0.0;     // E[ln lambda ; lo < lambda <= hi]
    };

    // Marginal density of one unordered eigenvalue
    class EigDensity
    {
    public:
        enum class Kind
        {
            wishart,
            empirical,
            point_masses
        };

        static EigDensity wishart(std::size_t m, std::size_t n);
        static EigDensity empirical(RealVector pool);
        static EigDensity point_masses(const RealVector &values, const RealVector &weights);

        Kind kind() const { return type; }

        // Continuous part of the density; zero for point masses, histogram estimate for pools
        double pdf(double x) const;
        double cdf(double x) const; // P(lambda <= x)
        double quantile(double p) const;

        TailMoments moments(double lo, double hi = std::numeric_limits<double>::infinity()) const;

        // int_{(lo,hi]} g dF
        double expect(const std::function<double(double)> &g, double lo = 0.0,
                      double hi = std::numeric_limits<double>::infinity()) const;

        // E[1/lambda], +inf when the integral diverges or mass sits at zero
        double mean_inverse() const;

        // Wishart parameters
        std::size_t wishart_m() const { return wm; }
        std::size_t wishart_n() const { return wn; }

        // Atoms of a point-mass density, or the sorted pool of an empirical one (weights uniform)
        const RealVector &values() const { return vals; }
        const RealVector &weights() const { return wts; }

    private:
        EigDensity() = default;
        double wishart_pdf(double x) const;
        double wishart_cutoff() const { return wcut; }
        double find_wishart_cutoff() const;
        double integrate_wishart(const std::function<double(double)> &g, double lo, double hi) const;
        std::size_t first_above(double x) const; // index of first pool/atom value > x

        Kind type = Kind::point_masses;
        std::size_t wm = 0, wn = 0;
        double wcut = 0.0;
        RealVector coeff; // k!/(k+n-m)! for the Laguerre kernel
        RealVector vals, wts;
        RealVector prefix_w, prefix_inv, prefix_log; // prefix sums over vals for tail queries
        double hist_lo = 0.0, hist_width = 0.0;
        RealVector hist;
    };
}
