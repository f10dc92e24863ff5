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

#include "ergocap/channels.hpp"
#include "ergocap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ergocap
{
    namespace
    {
        std::string shape(const ComplexMatrix &m)
        {
            return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
        }

        bool is_identity(const ComplexMatrix &a)
        {
            for (std::size_t i = 0; i < a.rows(); ++i)
                for (std::size_t j = 0; j < a.cols(); ++j)
                    if (a(i, j) != (i == j ? cplx(1.0) : cplx(0.0)))
                        return false;
            return true;
        }

        void require_psd(const HermitianMatrix &a, const char *what)
        {
            // chol_upper throws std::domain_error with the offending eigenvalue
            try
            {
                (void)chol_upper(a);
            }
            catch (const std::domain_error &)
            {
                throw std::domain_error(std::string(what) + " is not positive semidefinite");
            }
        }

        // Eigenvalues of the smaller Gram matrix of h, clamped at zero
        void gram_eigenvalues(const ComplexMatrix &h, RealVector &out)
        {
            ComplexMatrix g;
            if (h.cols() <= h.rows())
                adjoint_multiply_into(g, h, h);
            else
                multiply_into(g, h, h.adjoint());
            out = herm_eig(HermitianMatrix::symmetrized(g)).values;
            for (auto &v : out)
                v = std::max(v, 0.0);
        }
    }

    ChannelLaw ChannelLaw::point_mass(const ComplexMatrix &h)
    {
        ChannelLaw l;
        l.law = PointMassLaw{h};
        l.prepare();
        return l;
    }

    ChannelLaw ChannelLaw::matrix_gaussian(const ComplexMatrix &mean, const HermitianMatrix &cov)
    {
        ChannelLaw l;
        l.law = MatrixGaussianLaw{mean, cov};
        l.prepare();
        return l;
    }

    ChannelLaw ChannelLaw::kronecker(const ComplexMatrix &mean, const HermitianMatrix &rx, const HermitianMatrix &tx,
                                     bool normalize)
    {
        ChannelLaw l;
        if (normalize)
        {
            const double tr_r = rx.trace(), tr_t = tx.trace();
            if (!(tr_r > 0.0) || !(tr_t > 0.0))
                throw std::domain_error("kronecker: cannot normalize a correlation matrix with non-positive trace");
            l.law = KroneckerLaw{mean,
                                 HermitianMatrix::symmetrized((static_cast<double>(rx.size()) / tr_r) * rx.matrix()),
                                 HermitianMatrix::symmetrized((static_cast<double>(tx.size()) / tr_t) * tx.matrix())};
        }
        else
            l.law = KroneckerLaw{mean, rx, tx};
        l.prepare();
        return l;
    }

    ChannelLaw ChannelLaw::rayleigh(std::size_t r, std::size_t t)
    {
        return kronecker(ComplexMatrix(r, t), HermitianMatrix::identity(r), HermitianMatrix::identity(t));
    }

    ChannelLaw ChannelLaw::interpolated(double kappa, const ComplexMatrix &m0, const HermitianMatrix &cov)
    {
        ChannelLaw l;
        l.law = InterpolatedLaw{kappa, m0, cov};
        l.prepare();
        return l;
    }

    ChannelLaw ChannelLaw::mixture(const RealVector &weights, const std::vector<ComplexMatrix> &atoms)
    {
        ChannelLaw l;
        l.law = MixtureLaw{weights, atoms};
        l.prepare();
        return l;
    }

    void ChannelLaw::prepare()
    {
        if (auto *p = std::get_if<PointMassLaw>(&law))
        {
            if (!p->h.all_finite() || p->h.rows() == 0 || p->h.cols() == 0)
                throw std::invalid_argument("point mass: channel must be a non-empty finite matrix");
            r = p->h.rows();
            t = p->h.cols();
        }
        else if (auto *g = std::get_if<MatrixGaussianLaw>(&law))
        {
            r = g->mean.rows();
            t = g->mean.cols();
            if (r == 0 || t == 0 || g->cov.size() != r * t)
                throw std::invalid_argument("matrix gaussian: covariance is " + shape(g->cov.matrix()) +
                                            " but the mean " + shape(g->mean) + " needs " + std::to_string(r * t) +
                                            "x" + std::to_string(r * t));
            factor_a = chol_upper(g->cov).matrix().adjoint(); // L with L L^H = cov
        }
        else if (auto *k = std::get_if<KroneckerLaw>(&law))
        {
            r = k->mean.rows();
            t = k->mean.cols();
            if (r == 0 || t == 0 || k->rx.size() != r || k->tx.size() != t)
                throw std::invalid_argument("kronecker: mean is " + shape(k->mean) + ", rx is " +
                                            shape(k->rx.matrix()) + ", tx is " + shape(k->tx.matrix()));
            require_psd(k->rx, "kronecker: rx correlation");
            require_psd(k->tx, "kronecker: tx correlation");
            factor_a = psd_sqrt(k->rx).matrix();
            factor_b = psd_sqrt(k->tx).matrix();
            rayleigh_iid = k->mean.max_abs() == 0.0 && is_identity(k->rx.matrix()) && is_identity(k->tx.matrix());
        }
        else if (auto *ip = std::get_if<InterpolatedLaw>(&law))
        {
            if (!(ip->kappa >= 0.0 && ip->kappa <= 1.0))
                throw std::domain_error("interpolated: kappa must lie in [0, 1], got " + std::to_string(ip->kappa));
            r = ip->m0.rows();
            t = ip->m0.cols();
            if (r == 0 || t == 0 || ip->cov.size() != t)
                throw std::invalid_argument("interpolated: mean is " + shape(ip->m0) + " so the covariance must be " +
                                            std::to_string(t) + "x" + std::to_string(t));
            require_psd(ip->cov, "interpolated: covariance");
            factor_b = psd_sqrt(ip->cov).matrix();
        }
        else if (auto *mx = std::get_if<MixtureLaw>(&law))
        {
            if (mx->atoms.empty() || mx->atoms.size() != mx->weights.size())
                throw std::invalid_argument("mixture: need one weight per atom and at least one atom");
            r = mx->atoms.front().rows();
            t = mx->atoms.front().cols();
            double total = 0.0;
            for (std::size_t a = 0; a < mx->atoms.size(); ++a)
            {
                if (mx->atoms[a].rows() != r || mx->atoms[a].cols() != t || r == 0 || t == 0)
                    throw std::invalid_argument("mixture: atom " + std::to_string(a) + " is " + shape(mx->atoms[a]) +
                                                ", expected " + std::to_string(r) + "x" + std::to_string(t));
                if (!mx->atoms[a].all_finite())
                    throw std::invalid_argument("mixture: non-finite atom");
                if (!(mx->weights[a] >= 0.0) || !std::isfinite(mx->weights[a]))
                    throw std::domain_error("mixture: weights must be non-negative");
                total += mx->weights[a];
                cumulative.push_back(total);
            }
            if (std::abs(total - 1.0) > 1e-9)
                throw std::invalid_argument("mixture: weights sum to " + std::to_string(total) + ", expected 1");
            for (auto &c : cumulative)
                c /= total;
        }
    }

    bool ChannelLaw::is_discrete() const
    {
        return std::holds_alternative<PointMassLaw>(law) || std::holds_alternative<MixtureLaw>(law);
    }

    bool ChannelLaw::is_iid_rayleigh() const { return rayleigh_iid; }

    void ChannelLaw::support(std::vector<ComplexMatrix> &atoms, RealVector &weights) const
    {
        atoms.clear();
        weights.clear();
        if (auto *p = std::get_if<PointMassLaw>(&law))
        {
            atoms.push_back(p->h);
            weights.push_back(1.0);
        }
        else if (auto *mx = std::get_if<MixtureLaw>(&law))
        {
            for (std::size_t a = 0; a < mx->atoms.size(); ++a)
                if (mx->weights[a] > 0.0)
                {
                    atoms.push_back(mx->atoms[a]);
                    weights.push_back(mx->weights[a]);
                }
        }
        else
            throw std::invalid_argument("support: law is not discrete");
    }

    void ChannelLaw::sample_into(ComplexMatrix &h, SampleRng &rng) const
    {
        if (auto *p = std::get_if<PointMassLaw>(&law))
        {
            h = p->h;
            return;
        }
        if (auto *mx = std::get_if<MixtureLaw>(&law))
        {
            const double u = rng.uniform();
            std::size_t idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            h = mx->atoms[std::min(idx, mx->atoms.size() - 1)];
            return;
        }

        ComplexMatrix g(r, t);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < t; ++j)
                g(i, j) = rng.complex_normal();

        if (auto *mg = std::get_if<MatrixGaussianLaw>(&law))
        {
            const std::size_t n = r * t;
            h = mg->mean;
            // vec(H) = vec(M) + L vec(G), column stacking
            for (std::size_t a = 0; a < n; ++a)
            {
                cplx s = 0.0;
                for (std::size_t b = 0; b <= a; ++b)
                    s += factor_a(a, b) * g(b % r, b / r);
                h(a % r, a / r) += s;
            }
        }
        else if (auto *k = std::get_if<KroneckerLaw>(&law))
        {
            if (rayleigh_iid)
            {
                h = std::move(g);
                return;
            }
            ComplexMatrix gb;
            multiply_into(gb, g, factor_b);
            multiply_into(h, factor_a, gb);
            h += k->mean;
        }
        else if (auto *ip = std::get_if<InterpolatedLaw>(&law))
        {
            multiply_into(h, g, factor_b);
            h *= cplx(1.0 - ip->kappa);
            h += ip->kappa * ip->m0;
        }
    }

    ComplexMatrix sample(const ChannelLaw &law, SampleRng &rng)
    {
        ComplexMatrix h;
        law.sample_into(h, rng);
        return h;
    }

    HermitianMatrix expected_gram(const ChannelLaw &law)
    {
        const std::size_t r = law.rows(), t = law.cols();
        const auto &v = law.variant();
        if (auto *p = std::get_if<PointMassLaw>(&v))
            return HermitianMatrix::symmetrized(p->h.adjoint() * p->h);
        if (auto *mx = std::get_if<MixtureLaw>(&v))
        {
            ComplexMatrix acc(t, t);
            for (std::size_t a = 0; a < mx->atoms.size(); ++a)
                acc += mx->weights[a] * (mx->atoms[a].adjoint() * mx->atoms[a]);
            return HermitianMatrix::symmetrized(acc);
        }
        if (auto *k = std::get_if<KroneckerLaw>(&v))
            return HermitianMatrix::symmetrized(k->mean.adjoint() * k->mean + k->rx.trace() * k->tx.matrix());
        if (auto *ip = std::get_if<InterpolatedLaw>(&v))
        {
            const double a = ip->kappa, b = 1.0 - ip->kappa;
            return HermitianMatrix::symmetrized(a * a * (ip->m0.adjoint() * ip->m0) +
                                                (b * b * static_cast<double>(r)) * ip->cov.matrix());
        }
        const auto &mg = std::get<MatrixGaussianLaw>(v);
        // E[H^H H]_{jk} = (M^H M)_{jk} + sum_i cov(i + k r, i + j r)
        ComplexMatrix acc = mg.mean.adjoint() * mg.mean;
        for (std::size_t j = 0; j < t; ++j)
            for (std::size_t k = 0; k < t; ++k)
                for (std::size_t i = 0; i < r; ++i)
                    acc(j, k) += mg.cov(i + k * r, i + j * r);
        return HermitianMatrix::symmetrized(acc);
    }

    EigDensity empirical_density(const ChannelLaw &law, std::size_t samples, const SeededStream &stream)
    {
        const std::size_t m = std::min(law.rows(), law.cols());
        RealVector ev;
        if (law.is_discrete())
        {
            std::vector<ComplexMatrix> atoms;
            RealVector w;
            law.support(atoms, w);
            std::map<double, double> masses;
            for (std::size_t a = 0; a < atoms.size(); ++a)
            {
                gram_eigenvalues(atoms[a], ev);
                for (std::size_t i = 0; i < m; ++i)
                    masses[ev[i]] += w[a] / static_cast<double>(m);
            }
            RealVector vals, wts;
            for (const auto &[v, p] : masses)
            {
                vals.push_back(v);
                wts.push_back(p);
            }
            return EigDensity::point_masses(vals, wts);
        }
        if (samples == 0)
            throw std::invalid_argument("empirical_density: need at least one sample");

        RealVector pool;
        pool.reserve(samples * m);
        ComplexMatrix h;
        for (std::size_t start = 0; start < samples; start += batch_size)
        {
            SampleRng rng(stream, start / batch_size);
            const std::size_t end = std::min(samples, start + batch_size);
            for (std::size_t s = start; s < end; ++s)
            {
                law.sample_into(h, rng);
                gram_eigenvalues(h, ev);
                pool.insert(pool.end(), ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(m));
            }
        }
        return EigDensity::empirical(std::move(pool));
    }

    EigDensity wishart_density(std::size_t m, std::size_t n) { return EigDensity::wishart(m, n); }

    EigDensity onoff_density(std::size_t m, double p)
    {
        if (m == 0)
            throw std::invalid_argument("onoff: m must be at least 1");
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("onoff: p must lie in [0, 1], got " + std::to_string(p));
        return EigDensity::point_masses({0.0, 1.0}, {1.0 - p, p});
    }

    ChannelLaw onoff_law(std::size_t m, double p)
    {
        if (m == 0 || m > 12)
            throw std::invalid_argument("onoff law: m must lie in [1, 12] for exact enumeration");
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("onoff: p must lie in [0, 1], got " + std::to_string(p));
        RealVector w;
        std::vector<ComplexMatrix> atoms;
        for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask)
        {
            RealVector d(m);
            double prob = 1.0;
            for (std::size_t i = 0; i < m; ++i)
            {
                const bool on = (mask >> i) & 1u;
                d[i] = on ? 1.0 : 0.0;
                prob *= on ? p : 1.0 - p;
            }
            if (prob == 0.0)
                continue;
            atoms.push_back(ComplexMatrix::diagonal(d));
            w.push_back(prob);
        }
        return ChannelLaw::mixture(w, atoms);
    }
}
