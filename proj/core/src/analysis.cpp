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

#include "ergocap/analysis.hpp"
#include "ergocap/errors.hpp"
#include "ergocap/format.hpp"
#include "ergocap/special.hpp"
#include "ergocap/waterfill.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ergocap
{
    namespace
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();

        void check_gamma(double gamma, const char *who)
        {
            if (!(gamma > 0.0) || !std::isfinite(gamma))
                throw std::domain_error(std::string(who) + ": gamma must be positive, got " + format_double(gamma));
        }

        // e^{1/x} Gamma(0, 1/x)
        double f_scaled(double x)
        {
            return expint_scaled(1.0 / x);
        }

        // Partial fractions lose about eps / gap^(r-1); below this relative gap the integral form is used
        double min_partial_fraction_gap(std::size_t r)
        {
            return std::pow(1e-6, 1.0 / static_cast<double>(r));
        }
    }

    std::string to_string(BeamformMethod m)
    {
        switch (m)
        {
        case BeamformMethod::monte_carlo:
            return "monte-carlo";
        case BeamformMethod::closed_form:
            return "closed-form";
        case BeamformMethod::closed_form_integral:
            return "closed-form-integral";
        }
        return "unknown";
    }

    // ---- beamforming tests

    BeamformVerdict beamform_opt_mc(const HermitianMatrix &r, const HermitianMatrix &tc, double gamma,
                                    std::size_t samples, const SeededStream &stream, unsigned workers)
    {
        check_gamma(gamma, "beamform_opt_mc");
        const std::size_t nr = r.size(), nt = tc.size();
        if (nr == 0 || nt < 2)
            throw std::invalid_argument("beamform_opt_mc: needs r >= 1 and t >= 2");
        if (std::abs(r.trace() - static_cast<double>(nr)) > 1e-9 * static_cast<double>(nr))
            throw std::domain_error("beamform_opt_mc: tr(R) must equal r, got " + format_double(r.trace()));
        if (std::abs(tc.trace() - static_cast<double>(nt)) > 1e-9 * static_cast<double>(nt))
            throw std::domain_error("beamform_opt_mc: tr(Tc) must equal t, got " + format_double(tc.trace()));
        if (samples < 2)
            throw std::invalid_argument("beamform_opt_mc: need at least 2 samples");
        (void)chol_upper(r);
        const RealVector tau = herm_eig(tc).values;
        const double t1 = tau[0], t2 = std::max(0.0, tau[1]);
        if (!(t1 > 0.0))
            throw std::domain_error("beamform_opt_mc: Tc has no positive eigenvalue");
        const ComplexMatrix &rm = r.matrix();
        const ComplexMatrix r2 = rm * rm;

        const std::size_t batches = (samples + batch_size - 1) / batch_size;
        std::vector<RunningMoments> part(batches);
        for_each_batch(samples, workers, [&](std::size_t b, std::size_t begin, std::size_t end)
                       {
            SampleRng rng(stream, b);
            std::vector<cplx> u(nr);
            RunningMoments acc;
            for (std::size_t s = begin; s < end; ++s)
            {
                for (auto &x : u)
                    x = rng.complex_normal();
                double a = 0.0, c = 0.0;
                for (std::size_t i = 0; i < nr; ++i)
                    for (std::size_t j = 0; j < nr; ++j)
                    {
                        const cplx uu = std::conj(u[i]) * u[j];
                        a += std::real(uu * rm(i, j));
                        c += std::real(uu * r2(i, j));
                    }
                acc.add((a + gamma * t2 * c) / (1.0 + gamma * t1 * a));
            }
            part[b] = acc; });
        RunningMoments total;
        for (const auto &p : part)
            total.merge(p);
        BeamformVerdict v;
        v.method = BeamformMethod::monte_carlo;
        v.margin = total.mean - static_cast<double>(nr) * t2 / t1;
        v.se = std::sqrt(total.m2 / (total.n - 1.0) / total.n);
        v.optimal = v.margin > 0.0;
        return v;
    }

    BeamformVerdict beamform_opt_closed(const RealVector &rho_in, double tau1, double tau2, double gamma)
    {
        check_gamma(gamma, "beamform_opt_closed");
        const std::size_t r = rho_in.size();
        if (r == 0)
            throw std::invalid_argument("beamform_opt_closed: no receive eigenvalues");
        for (double x : rho_in)
            if (!(x > 0.0) || !std::isfinite(x))
                throw std::domain_error("beamform_opt_closed: receive eigenvalues must be positive, got " + format_double(x));
        if (!(tau1 > 0.0) || !(tau2 >= 0.0) || tau2 > tau1)
            throw std::domain_error("beamform_opt_closed: needs tau1 >= tau2 >= 0 and tau1 > 0");

        RealVector rho = rho_in;
        std::sort(rho.begin(), rho.end(), std::greater<>());
        const double top = rho.front();
        for (std::size_t k = 1; k < r; ++k)
            if (rho[k - 1] - rho[k] <= 1e-9 * top)
                rho[k] = rho[k - 1] - 1e-9 * top;
        if (!(rho.back() > 0.0))
            throw std::domain_error("beamform_opt_closed: jitter pushed an eigenvalue to zero");
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < r; ++k)
            gap = std::min(gap, (rho[k - 1] - rho[k]) / top);

        const double c = gamma * tau1;
        double lhs = 0.0;
        BeamformVerdict v;
        if (r == 1 || gap >= min_partial_fraction_gap(r))
        {
            v.method = BeamformMethod::closed_form;
            RealVector w(r), f(r);
            for (std::size_t j = 0; j < r; ++j)
            {
                double den = 1.0;
                for (std::size_t k = 0; k < r; ++k)
                    if (k != j)
                        den *= rho[j] - rho[k];
                w[j] = std::pow(rho[j], static_cast<double>(r - 1)) / den;
                f[j] = f_scaled(c * rho[j]);
            }
            double s = 0.0;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                {
                    const double zeta = i == j ? (1.0 - f[i] / (c * rho[i])) / rho[i]
                                               : (f[i] - f[j]) / (rho[i] - rho[j]);
                    s += rho[i] * (1.0 + gamma * tau2 * rho[i]) * w[j] * zeta;
                }
            lhs = s / c;
        }
        else
        {
            v.method = BeamformMethod::closed_form_integral;
            auto integrand = [&](double x)
            {
                double prod = 1.0, sum = 0.0;
                for (std::size_t i = 0; i < r; ++i)
                {
                    const double d = 1.0 + c * rho[i] * x;
                    prod /= d;
                    sum += rho[i] * (1.0 + gamma * tau2 * rho[i]) / d;
                }
                return std::exp(-x) * prod * sum;
            };
            boost::math::quadrature::exp_sinh<double> es;
            lhs = es.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
        }
        if (!std::isfinite(lhs))
            throw numerical_error("beamform_opt_closed: non-finite left side");
        v.margin = lhs - static_cast<double>(r) * tau2 / tau1;
        v.optimal = v.margin > 0.0;
        return v;
    }

    std::vector<BoundaryPoint> beamform_boundary(double gamma, const RealVector &rho_grid)
    {
        check_gamma(gamma, "beamform_boundary");
        std::vector<BoundaryPoint> out;
        out.reserve(rho_grid.size());
        for (double rho : rho_grid)
        {
            if (!(rho > 0.0 && rho < 2.0))
                throw std::domain_error("beamform_boundary: rho must lie in (0, 2), got " + format_double(rho));
            const RealVector rr{rho, 2.0 - rho};
            auto margin = [&](double tau)
            { return beamform_opt_closed(rr, tau, 2.0 - tau, gamma).margin; };
            BoundaryPoint p{rho, nan};
            double lo = 1.0;
            constexpr int steps = 200;
            for (int k = 1; k <= steps; ++k)
            {
                const double hi = 1.0 + static_cast<double>(k) / steps;
                if (margin(hi) > 0.0)
                {
                    double a = lo, b = hi;
                    for (int it = 0; it < 60; ++it)
                    {
                        const double mid = 0.5 * (a + b);
                        (margin(mid) > 0.0 ? b : a) = mid;
                    }
                    p.tau = b;
                    break;
                }
                lo = hi;
            }
            out.push_back(p);
        }
        return out;
    }

    // ---- asymptotics

    LowSnr low_snr_cov(const ChannelLaw &law)
    {
        const EigResult e = herm_eig(expected_gram(law));
        const std::size_t t = e.values.size();
        LowSnr out;
        const double l1 = e.values.front();
        out.slope = l1;
        out.k = 1;
        while (out.k < t && e.values[out.k] >= l1 - 1e-8 * std::abs(l1))
            ++out.k;
        out.near_degenerate = out.k < t && e.values[out.k] >= l1 - 1e-4 * std::abs(l1);
        ComplexMatrix q(t, t);
        for (std::size_t c = 0; c < out.k; ++c)
            for (std::size_t i = 0; i < t; ++i)
                for (std::size_t j = 0; j < t; ++j)
                    q(i, j) += e.vectors(i, c) * std::conj(e.vectors(j, c)) / static_cast<double>(out.k);
        out.q = HermitianMatrix::symmetrized(q);
        return out;
    }

    HighSnr high_snr_capacity(const ChannelLaw &law, double gamma, const McConfig &cfg)
    {
        check_gamma(gamma, "high_snr_capacity");
        const std::size_t t = law.cols();
        const double td = static_cast<double>(t);
        HighSnr out;
        out.q = HermitianMatrix::symmetrized((1.0 / td) * ComplexMatrix::identity(t));

        // ln det(H^H H), or NaN when the draw is singular
        auto logdet = [](const ComplexMatrix &h)
        {
            ComplexMatrix g;
            adjoint_multiply_into(g, h, h);
            const RealVector ev = herm_eig(HermitianMatrix::symmetrized(g)).values;
            if (!(ev.back() > 1e-14 * ev.front()) || !(ev.back() > 0.0))
                return nan;
            double s = 0.0;
            for (double v : ev)
                s += std::log(v);
            return s;
        };
        const double shift = td * std::log(gamma / td);
        if (law.is_discrete())
        {
            std::vector<ComplexMatrix> atoms;
            RealVector w;
            law.support(atoms, w);
            double s = 0.0, wsum = 0.0;
            for (std::size_t a = 0; a < atoms.size(); ++a)
            {
                const double v = logdet(atoms[a]);
                if (std::isnan(v))
                {
                    ++out.excluded;
                    continue;
                }
                s += w[a] * v;
                wsum += w[a];
            }
            if (wsum <= 0.0)
                throw numerical_error("high_snr_capacity: every atom is singular");
            out.approx = {shift + s / wsum, 0.0, atoms.size() - out.excluded};
        }
        else
        {
            if (cfg.samples < 2)
                throw std::invalid_argument("high_snr_capacity: need at least 2 samples");
            const std::size_t batches = (cfg.samples + batch_size - 1) / batch_size;
            std::vector<RunningMoments> part(batches);
            std::vector<std::size_t> skipped(batches, 0);
            for_each_batch(cfg.samples, cfg.workers, [&](std::size_t b, std::size_t begin, std::size_t end)
                           {
                SampleRng rng(cfg.stream, b);
                ComplexMatrix h;
                RunningMoments acc;
                for (std::size_t s = begin; s < end; ++s)
                {
                    law.sample_into(h, rng);
                    const double v = logdet(h);
                    if (std::isnan(v))
                        ++skipped[b];
                    else
                        acc.add(v);
                }
                part[b] = acc; });
            RunningMoments total;
            for (std::size_t b = 0; b < batches; ++b)
            {
                total.merge(part[b]);
                out.excluded += skipped[b];
            }
            if (total.n < 2.0)
                throw numerical_error("high_snr_capacity: too few non-singular draws");
            out.approx = {shift + total.mean, std::sqrt(total.m2 / (total.n - 1.0) / total.n),
                          static_cast<std::size_t>(total.n)};
        }
        out.exact = ergodic_mi(out.q, law, gamma, cfg);
        return out;
    }

    // ---- Wishart approximation

    HermitianMatrix wishart_approx(const ComplexMatrix &mean, const HermitianMatrix &tc, const HermitianMatrix &q)
    {
        const std::size_t t = tc.size();
        if (q.size() != t || mean.cols() != t)
            throw std::invalid_argument("wishart_approx: mean, Tc and Q must share the transmit dimension");
        const ComplexMatrix th = psd_sqrt(tc).matrix();
        ComplexMatrix mm;
        adjoint_multiply_into(mm, mean, mean);
        return HermitianMatrix::symmetrized(th * q.matrix() * th + (1.0 / static_cast<double>(t)) * mm);
    }

    ChannelLaw wishart_approx_law(const ComplexMatrix &mean, const HermitianMatrix &tc)
    {
        const std::size_t r = mean.rows(), t = tc.size();
        return ChannelLaw::kronecker(ComplexMatrix(r, t), HermitianMatrix::identity(r),
                                     wishart_approx(mean, tc, HermitianMatrix::identity(t)));
    }

    HermitianMatrix transmit_correlation(std::size_t t, double tau)
    {
        if (t == 0)
            throw std::invalid_argument("transmit_correlation: t must be positive");
        ComplexMatrix m(t, t);
        for (std::size_t i = 0; i < t; ++i)
            for (std::size_t j = 0; j < t; ++j)
                m(i, j) = i == j ? 1.0 : tau;
        return HermitianMatrix(m);
    }

    WishartApproxPoint wishart_approx_study(const ComplexMatrix &mean, const HermitianMatrix &tc, double gamma,
                                            const CovOptOptions &opts)
    {
        const std::size_t r = mean.rows();
        const ChannelLaw truth = ChannelLaw::kronecker(mean, HermitianMatrix::identity(r), tc);
        const HermitianMatrix sigma = wishart_approx(mean, tc, HermitianMatrix::identity(tc.size()));
        const ChannelLaw approx = wishart_approx_law(mean, tc);
        const CovOptResult a = fixed_point_diag(approx, gamma, herm_eig(sigma).vectors, opts);
        const CovOptResult c = iterate_general(truth, gamma, opts);
        WishartApproxPoint p;
        p.gamma = gamma;
        p.capacity = c.mi;
        // same fresh stream as the optimizer's reported MI, so the two are paired
        p.approx_mi = ergodic_mi(a.q, truth, gamma, McConfig{opts.final_samples, SeededStream{opts.seed}.child(1), opts.workers});
        return p;
    }

    // ---- interpolated mean and covariance

    double eigvec_angle(const ComplexMatrix &v, std::size_t col)
    {
        if (v.rows() < 2)
            throw std::invalid_argument("eigvec_angle: needs at least two components");
        const cplx a = v(0, col), b = v(1, col);
        const cplx ref = std::abs(a) > 0.0 ? a : b;
        const cplx ph = std::conj(ref) / std::abs(ref);
        double th = std::atan2(std::real(ph * b), std::real(ph * a));
        if (th > std::numbers::pi / 2)
            th -= std::numbers::pi;
        if (th <= -std::numbers::pi / 2)
            th += std::numbers::pi;
        return th;
    }

    std::vector<InterpPoint> interp_study(const ComplexMatrix &m0, const HermitianMatrix &cov, const RealVector &kappas,
                                          double gamma, const CovOptOptions &opts)
    {
        std::vector<InterpPoint> out;
        out.reserve(kappas.size());
        for (double k : kappas)
        {
            const ChannelLaw law = ChannelLaw::interpolated(k, m0, cov);
            const CovOptResult res = iterate_general(law, gamma, opts);
            const EigResult e = herm_eig(res.q);
            InterpPoint p;
            p.kappa = k;
            p.q = res.q;
            p.powers = e.values;
            p.angle = eigvec_angle(e.vectors, 0);
            p.gram_angle = eigvec_angle(herm_eig(expected_gram(law)).vectors, 0);
            p.mi = res.mi;
            p.converged = res.converged;
            out.push_back(std::move(p));
        }
        return out;
    }

    RayleighGains rayleigh_gains(std::size_t t, std::size_t r, double gamma, const McConfig &cfg)
    {
        check_gamma(gamma, "rayleigh_gains");
        const std::size_t m = std::min(t, r), n = std::max(t, r);
        const EigDensity f = wishart_density(m, n);
        RayleighGains g;
        g.gamma = gamma;
        g.space_time = st_capacity(f, gamma, m);
        g.space = naive_avg_rate(ChannelLaw::rayleigh(r, t), gamma, cfg);
        const double per = gamma / static_cast<double>(t);
        g.equal = static_cast<double>(m) * f.expect([per](double l)
                                                    { return std::log1p(per * l); });
        return g;
    }
}
