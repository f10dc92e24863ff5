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

#include "ergocap/density.hpp"
#include "ergocap/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ergocap
{
    namespace
    {
        constexpr double quad_tol = 1e-13;
        const double inf = std::numeric_limits<double>::infinity();

        // Generalized Laguerre polynomials L_0..L_{count-1} of order alpha at x
        void laguerre(std::size_t count, double alpha, double x, RealVector &out)
        {
            out.resize(count);
            if (count == 0)
                return;
            out[0] = 1.0;
            if (count > 1)
                out[1] = 1.0 + alpha - x;
            for (std::size_t k = 1; k + 1 < count; ++k)
            {
                const double kk = static_cast<double>(k);
                out[k + 1] = ((2.0 * kk + 1.0 + alpha - x) * out[k] - (kk + alpha) * out[k - 1]) / (kk + 1.0);
            }
        }
    }

    EigDensity EigDensity::wishart(std::size_t m, std::size_t n)
    {
        if (m == 0 || n < m)
            throw std::invalid_argument("wishart density needs 1 <= m <= n, got m = " + std::to_string(m) +
                                        ", n = " + std::to_string(n));
        EigDensity d;
        d.type = Kind::wishart;
        d.wm = m;
        d.wn = n;
        const double alpha = static_cast<double>(n - m);
        d.coeff.resize(m);
        for (std::size_t k = 0; k < m; ++k)
            d.coeff[k] = std::exp(std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(k) + alpha + 1.0));
        d.wcut = d.find_wishart_cutoff();
        return d;
    }

    EigDensity EigDensity::empirical(RealVector pool)
    {
        if (pool.empty())
            throw std::invalid_argument("empirical density: empty pool");
        for (double v : pool)
            if (!std::isfinite(v) || v < 0.0)
                throw std::domain_error("empirical density: eigenvalues must be finite and non-negative");
        std::sort(pool.begin(), pool.end());
        EigDensity d;
        d.type = Kind::empirical;
        const double w = 1.0 / static_cast<double>(pool.size());
        d.wts.assign(pool.size(), w);
        d.vals = std::move(pool);

        const std::size_t bins = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(d.vals.size()))));
        d.hist_lo = d.vals.front();
        const double span = d.vals.back() - d.vals.front();
        d.hist_width = span > 0.0 ? span / static_cast<double>(bins) : 0.0;
        d.hist.assign(bins, 0.0);
        if (d.hist_width > 0.0)
        {
            for (double v : d.vals)
            {
                std::size_t b = static_cast<std::size_t>((v - d.hist_lo) / d.hist_width);
                d.hist[std::min(b, bins - 1)] += w / d.hist_width;
            }
        }

        d.prefix_w.assign(d.vals.size() + 1, 0.0);
        d.prefix_inv.assign(d.vals.size() + 1, 0.0);
        d.prefix_log.assign(d.vals.size() + 1, 0.0);
        for (std::size_t i = 0; i < d.vals.size(); ++i)
        {
            const double v = d.vals[i];
            d.prefix_w[i + 1] = d.prefix_w[i] + w;
            d.prefix_inv[i + 1] = d.prefix_inv[i] + (v > 0.0 ? w / v : 0.0);
            d.prefix_log[i + 1] = d.prefix_log[i] + (v > 0.0 ? w * std::log(v) : 0.0);
        }
        return d;
    }

    EigDensity EigDensity::point_masses(const RealVector &values, const RealVector &weights)
    {
        if (values.empty() || values.size() != weights.size())
            throw std::invalid_argument("point masses: values and weights must be non-empty and of equal length");
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            if (!std::isfinite(values[i]) || values[i] < 0.0)
                throw std::domain_error("point masses: values must be finite and non-negative");
            if (!std::isfinite(weights[i]) || weights[i] < 0.0)
                throw std::domain_error("point masses: weights must be finite and non-negative");
            total += weights[i];
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("point masses: weights sum to " + std::to_string(total) + ", expected 1");

        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return values[a] < values[b]; });
        EigDensity d;
        d.type = Kind::point_masses;
        for (std::size_t idx : order)
        {
            if (weights[idx] == 0.0)
                continue;
            if (!d.vals.empty() && d.vals.back() == values[idx])
                d.wts.back() += weights[idx] / total;
            else
            {
                d.vals.push_back(values[idx]);
                d.wts.push_back(weights[idx] / total);
            }
        }
        d.prefix_w.assign(d.vals.size() + 1, 0.0);
        d.prefix_inv.assign(d.vals.size() + 1, 0.0);
        d.prefix_log.assign(d.vals.size() + 1, 0.0);
        for (std::size_t i = 0; i < d.vals.size(); ++i)
        {
            const double v = d.vals[i], w = d.wts[i];
            d.prefix_w[i + 1] = d.prefix_w[i] + w;
            d.prefix_inv[i + 1] = d.prefix_inv[i] + (v > 0.0 ? w / v : 0.0);
            d.prefix_log[i + 1] = d.prefix_log[i] + (v > 0.0 ? w * std::log(v) : 0.0);
        }
        return d;
    }

    double EigDensity::wishart_pdf(double x) const
    {
        if (x < 0.0)
            return 0.0;
        const double alpha = static_cast<double>(wn - wm);
        if (x == 0.0 && alpha > 0.0)
            return 0.0;
        const double weight = (x == 0.0) ? 1.0 : std::exp(alpha * std::log(x) - x);
        // the polynomial factor overflows long before e^-x stops underflowing
        if (weight == 0.0 || !std::isfinite(x))
            return 0.0;
        thread_local RealVector lag;
        laguerre(wm, alpha, x, lag);
        double s = 0.0;
        for (std::size_t k = 0; k < wm; ++k)
            s += coeff[k] * lag[k] * lag[k];
        return s * weight / static_cast<double>(wm);
    }

    double EigDensity::find_wishart_cutoff() const
    {
        // Past this point f(x) (1+x)^2 is below 1e-22, so every moment used here has a negligible tail
        double x = 2.0 * static_cast<double>(wm + wn) + 10.0;
        while (wishart_pdf(x) * (1.0 + x) * (1.0 + x) > 1e-22)
            x += 2.0;
        return x;
    }

    double EigDensity::integrate_wishart(const std::function<double(double)> &g, double lo, double hi) const
    {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, wishart_cutoff());
        if (!(hi > lo))
            return 0.0;
        auto f = [&](double x)
        { return g(x) * wishart_pdf(x); };
        if (lo == 0.0)
        {
            boost::math::quadrature::tanh_sinh<double> ts;
            return ts.integrate(f, lo, hi, quad_tol);
        }
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 8, quad_tol, &err);
    }

    std::size_t EigDensity::first_above(double x) const
    {
        return static_cast<std::size_t>(std::upper_bound(vals.begin(), vals.end(), x) - vals.begin());
    }

    double EigDensity::pdf(double x) const
    {
        switch (type)
        {
        case Kind::wishart:
            return wishart_pdf(x);
        case Kind::empirical:
        {
            if (hist_width <= 0.0 || x < hist_lo || x > hist_lo + hist_width * static_cast<double>(hist.size()))
                return 0.0;
            const std::size_t b = std::min(hist.size() - 1, static_cast<std::size_t>((x - hist_lo) / hist_width));
            return hist[b];
        }
        case Kind::point_masses:
            return 0.0;
        }
        return 0.0;
    }

    double EigDensity::cdf(double x) const
    {
        if (type == Kind::wishart)
        {
            if (x <= 0.0)
                return 0.0;
            return std::min(1.0, integrate_wishart([](double)
                                                   { return 1.0; },
                                                   0.0, x));
        }
        return prefix_w[first_above(x)];
    }

    double EigDensity::quantile(double p) const
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("quantile: p must lie in [0, 1]");
        if (type == Kind::wishart)
        {
            double lo = 0.0, hi = wishart_cutoff();
            for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                (cdf(mid) < p ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        const auto it = std::lower_bound(prefix_w.begin() + 1, prefix_w.end(), p - 1e-15);
        const std::size_t idx = std::min<std::size_t>(vals.size() - 1, static_cast<std::size_t>(it - prefix_w.begin()) - 1);
        return vals[idx];
    }

    TailMoments EigDensity::moments(double lo, double hi) const
    {
        TailMoments t;
        if (!(hi > lo))
            return t;
        if (type == Kind::wishart)
        {
            t.mass = integrate_wishart([](double)
                                       { return 1.0; },
                                       lo, hi);
            if (lo <= 0.0 && wn == wm)
                t.inverse = inf;
            else
                t.inverse = integrate_wishart([](double x)
                                              { return 1.0 / x; },
                                              lo, hi);
            t.log = integrate_wishart([](double x)
                                      { return std::log(x); },
                                      lo, hi);
            return t;
        }
        const std::size_t i = first_above(lo), j = first_above(hi);
        if (j <= i)
            return t;
        t.mass = prefix_w[j] - prefix_w[i];
        if (vals[i] <= 0.0)
        {
            t.inverse = inf;
            t.log = -inf;
            return t;
        }
        t.inverse = prefix_inv[j] - prefix_inv[i];
        t.log = prefix_log[j] - prefix_log[i];
        return t;
    }

    double EigDensity::expect(const std::function<double(double)> &g, double lo, double hi) const
    {
        if (type == Kind::wishart)
            return integrate_wishart(g, lo, hi);
        double s = 0.0;
        for (std::size_t k = first_above(lo); k < vals.size() && vals[k] <= hi; ++k)
            s += wts[k] * g(vals[k]);
        return s;
    }

    double EigDensity::mean_inverse() const
    {
        if (type == Kind::wishart)
        {
            if (wn == wm)
                return inf;
            return integrate_wishart([](double x)
                                     { return 1.0 / x; },
                                     0.0, inf);
        }
        if (vals.front() <= 0.0)
            return inf;
        return prefix_inv.back();
    }
}
