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

#include "ergocap/waterfill.hpp"
#include "ergocap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ergocap
{
    namespace
    {
        const double inf = std::numeric_limits<double>::infinity();

        void check_gamma(double gamma, const char *who)
        {
            if (!(gamma > 0.0) || !std::isfinite(gamma))
                throw std::domain_error(std::string(who) + ": gamma must be positive and finite, got " + std::to_string(gamma));
        }

        void check_modes(std::size_t m, const char *who)
        {
            if (m == 0)
                throw std::invalid_argument(std::string(who) + ": number of modes must be at least 1");
        }

        // Average power per mode at level xi, optionally truncated at lambda <= hi
        double level_power(const EigDensity &f, double xi, double hi = inf)
        {
            const TailMoments t = f.moments(1.0 / xi, hi);
            if (t.mass == 0.0)
                return 0.0;
            return std::max(0.0, xi * t.mass - t.inverse);
        }

        double level_rate(const EigDensity &f, double xi, double hi = inf)
        {
            const TailMoments t = f.moments(1.0 / xi, hi);
            if (t.mass == 0.0)
                return 0.0;
            return std::log(xi) * t.mass + t.log;
        }

        double peak_upper(double xi, double gamma_max)
        {
            return xi > gamma_max ? 1.0 / (xi - gamma_max) : inf;
        }

        void gram_eigs(const ComplexMatrix &h, RealVector &ev)
        {
            ComplexMatrix g;
            if (h.cols() <= h.rows())
                adjoint_multiply_into(g, h, h);
            else
                multiply_into(g, h, h.adjoint());
            ev = herm_eig(HermitianMatrix::symmetrized(g)).values;
            for (auto &v : ev)
                v = std::max(v, 0.0);
        }
    }

    DetWaterfill waterfill_det(const RealVector &lambda, double budget)
    {
        if (!(budget > 0.0) || !std::isfinite(budget))
            throw std::domain_error("waterfill_det: budget must be positive, got " + std::to_string(budget));
        if (lambda.empty())
            throw std::invalid_argument("waterfill_det: no eigenvalues");
        for (double l : lambda)
            if (!(l >= 0.0) || !std::isfinite(l))
                throw std::domain_error("waterfill_det: eigenvalues must be finite and non-negative");

        std::vector<std::size_t> order(lambda.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return lambda[a] > lambda[b]; });
        std::size_t positive = 0;
        while (positive < order.size() && lambda[order[positive]] > 0.0)
            ++positive;
        if (positive == 0)
            throw infeasible_error("waterfill_det: every eigenvalue is zero");

        DetWaterfill out;
        double inv_sum = 0.0;
        RealVector prefix(positive + 1, 0.0);
        for (std::size_t k = 0; k < positive; ++k)
        {
            inv_sum += 1.0 / lambda[order[k]];
            prefix[k + 1] = inv_sum;
        }
        for (std::size_t k = positive; k >= 1; --k)
        {
            const double mu = (budget + prefix[k]) / static_cast<double>(k);
            if (k == 1 || mu > 1.0 / lambda[order[k - 1]])
            {
                out.mu = mu;
                out.active = k;
                break;
            }
        }
        out.powers.assign(lambda.size(), 0.0);
        for (std::size_t k = 0; k < out.active; ++k)
        {
            const std::size_t i = order[k];
            out.powers[i] = out.mu - 1.0 / lambda[i];
            out.rate += std::log(out.mu * lambda[i]);
        }
        return out;
    }

    double st_water_level(const EigDensity &f, double gamma, std::size_t m)
    {
        check_gamma(gamma, "st_water_level");
        check_modes(m, "st_water_level");
        if (f.cdf(0.0) >= 1.0 - 1e-15)
            throw infeasible_error("st_water_level: the eigenvalue density has no mass above zero");
        const double target = gamma / static_cast<double>(m);

        // Bracket: gamma/m + E[1/lambda | lambda > median] + 10, doubled until it holds the root
        double cond_inv = 0.0;
        const double med = f.quantile(0.5);
        if (med > 0.0)
        {
            const TailMoments t = f.moments(med);
            if (t.mass > 0.0 && std::isfinite(t.inverse))
                cond_inv = t.inverse / t.mass;
        }
        double lo = 1e-12, hi = target + cond_inv + 10.0;
        for (int k = 0; level_power(f, hi) < target; ++k)
        {
            if (k > 200)
                throw numerical_error("st_water_level: could not bracket the water level");
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (level_power(f, mid) < target ? lo : hi) = mid;
        }
        const double xi = 0.5 * (lo + hi);
        const double resid = std::abs(level_power(f, xi) - target);
        if (resid > 1e-9 * target)
            throw numerical_error("st_water_level: residual " + std::to_string(resid) + " above tolerance");
        return xi;
    }

    double st_capacity_at(const EigDensity &f, double xi, std::size_t m)
    {
        check_modes(m, "st_capacity");
        return static_cast<double>(m) * level_rate(f, xi);
    }

    double st_capacity(const EigDensity &f, double gamma, std::size_t m)
    {
        return st_capacity_at(f, st_water_level(f, gamma, m), m);
    }

    ScalarEstimate naive_avg_rate(const ChannelLaw &law, double gamma, const McConfig &cfg)
    {
        check_gamma(gamma, "naive_avg_rate");
        return expect_scalar([gamma](const ComplexMatrix &h)
                             {
            RealVector ev;
            gram_eigs(h, ev);
            if (std::all_of(ev.begin(), ev.end(), [](double v)
                            { return v <= 0.0; }))
                return 0.0;
            return waterfill_det(ev, gamma).rate; },
                             law, cfg);
    }

    double equal_power_rate(const EigDensity &f, double gamma, std::size_t m)
    {
        check_gamma(gamma, "equal_power_rate");
        check_modes(m, "equal_power_rate");
        const double g = gamma / static_cast<double>(m);
        return static_cast<double>(m) * f.expect([g](double l)
                                                 { return std::log1p(g * l); },
                                                 -1.0, inf);
    }

    HermitianMatrix instantaneous_covariance(const ComplexMatrix &h, double xi)
    {
        if (!(xi > 0.0) || !std::isfinite(xi))
            throw std::domain_error("instantaneous_covariance: xi must be positive, got " + std::to_string(xi));
        ComplexMatrix g;
        adjoint_multiply_into(g, h, h);
        const EigResult e = herm_eig(HermitianMatrix::symmetrized(g));
        RealVector p(e.values.size(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (e.values[i] > 0.0)
                p[i] = std::max(0.0, xi - 1.0 / e.values[i]);
        return HermitianMatrix::symmetrized(e.vectors * ComplexMatrix::diagonal(p) * e.vectors.adjoint());
    }

    double papr_exact(double xi, double gamma, std::size_t m)
    {
        check_gamma(gamma, "papr_exact");
        check_modes(m, "papr_exact");
        return static_cast<double>(m) * xi / gamma;
    }

    double papr_bound(const EigDensity &f, double gamma, std::size_t m)
    {
        check_gamma(gamma, "papr_bound");
        check_modes(m, "papr_bound");
        const double inv = f.mean_inverse();
        if (!std::isfinite(inv))
            return inf;
        return 1.0 + static_cast<double>(m) / gamma * inv;
    }

    PowerDensity power_density(const EigDensity &f, double gamma, std::size_t m, const RealVector &grid)
    {
        PowerDensity out;
        out.xi = st_water_level(f, gamma, m);
        const double xi = out.xi;
        for (double g : grid)
            if (!(g >= 0.0 && g < xi))
                throw std::domain_error("power_density: grid point " + std::to_string(g) + " outside [0, xi = " +
                                        std::to_string(xi) + ")");
        out.zero_atom = f.cdf(1.0 / xi);
        if (f.kind() == EigDensity::Kind::point_masses)
        {
            for (std::size_t k = 0; k < f.values().size(); ++k)
                if (f.values()[k] > 1.0 / xi)
                    out.atoms.emplace_back(xi - 1.0 / f.values()[k], f.weights()[k]);
        }
        out.grid = grid;
        out.pdf.resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            const double d = xi - grid[k];
            out.pdf[k] = f.pdf(1.0 / d) / (d * d);
        }
        return out;
    }

    PeakLimitedRate peak_limited_rate(const EigDensity &f, double gamma, double gamma_max, std::size_t m)
    {
        check_gamma(gamma, "peak_limited_rate");
        check_gamma(gamma_max, "peak_limited_rate (gamma_max)");
        check_modes(m, "peak_limited_rate");
        const double target = gamma / static_cast<double>(m);

        PeakLimitedRate out;
        const double xi_u = st_water_level(f, gamma, m);
        if (xi_u <= gamma_max)
        {
            out.xi = xi_u;
            out.rate = st_capacity_at(f, xi_u, m);
            return out;
        }

        // The truncated power rises from its value at gamma_max and eventually falls to zero
        // as the window [1/xi, 1/(xi - gamma_max)] closes; take the first crossing.
        auto power = [&](double xi)
        { return level_power(f, xi, peak_upper(xi, gamma_max)); };
        double prev = gamma_max;
        double found = -1.0;
        const double stop = 1e3 * (gamma_max + xi_u) + 1e3;
        for (double delta = 1e-8 * gamma_max; gamma_max + delta < stop; delta *= 1.189207115002721)
        {
            const double xi = gamma_max + delta;
            if (power(xi) >= target)
            {
                found = xi;
                break;
            }
            prev = xi;
        }
        if (found < 0.0)
            throw infeasible_error("peak_limited_rate: a per-mode cap of " + std::to_string(gamma_max) +
                                   " cannot deliver average power " + std::to_string(gamma));
        double lo = prev, hi = found;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (power(mid) < target ? lo : hi) = mid;
        }
        out.xi = 0.5 * (lo + hi);
        out.truncated = true;
        out.rate = static_cast<double>(m) * level_rate(f, out.xi, peak_upper(out.xi, gamma_max));
        return out;
    }
}
