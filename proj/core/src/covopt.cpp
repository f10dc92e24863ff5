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

#include "ergocap/covopt.hpp"
#include "ergocap/errors.hpp"
#include "ergocap/format.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergocap
{
    namespace
    {
        constexpr double zero_power = 1e-6;  // q_k below this is reported as zero
        constexpr double power_floor = 1e-12; // keeps diag(q) invertible in the update
        constexpr double min_step = 1e-6;
        constexpr std::size_t stall_window = 5;

        // Channel draws converted to S = gamma U^H H^H H U once per optimizer run
        struct Pool
        {
            std::vector<ComplexMatrix> s;
            RealVector w;
            bool exact = false;
            unsigned workers = 0;
            std::size_t dim = 0;
        };

        struct PoolEval
        {
            ComplexMatrix m; // E[(I + S Q)^-1 S], symmetrized
            RealVector m_se;
            double mi = 0.0, mi_se = 0.0;
            RealVector mi_each; // per-draw log det, for paired comparisons
        };

        void check_unitary(const ComplexMatrix &u, std::size_t t)
        {
            if (u.rows() == 0)
                return;
            if (u.rows() != t || u.cols() != t)
                throw std::invalid_argument("covopt: basis must be " + std::to_string(t) + "x" + std::to_string(t));
            ComplexMatrix g;
            adjoint_multiply_into(g, u, u);
            g -= ComplexMatrix::identity(t);
            if (g.max_abs() > 1e-8)
                throw std::invalid_argument("covopt: basis is not unitary (|U^H U - I| = " + format_double(g.max_abs()) + ")");
        }

        Pool make_pool(const ChannelLaw &law, double gamma, const ComplexMatrix &u, std::size_t samples,
                       const SeededStream &stream, unsigned workers)
        {
            if (!(gamma > 0.0) || !std::isfinite(gamma))
                throw std::domain_error("covopt: gamma must be positive, got " + format_double(gamma));
            const std::size_t t = law.cols();
            check_unitary(u, t);
            auto gram = [&](const ComplexMatrix &h, ComplexMatrix &s)
            {
                if (u.rows())
                {
                    ComplexMatrix hu;
                    multiply_into(hu, h, u);
                    adjoint_multiply_into(s, hu, hu);
                }
                else
                    adjoint_multiply_into(s, h, h);
                s *= cplx(gamma);
            };
            Pool p;
            p.workers = workers;
            p.dim = t;
            if (law.is_discrete())
            {
                std::vector<ComplexMatrix> atoms;
                law.support(atoms, p.w);
                p.s.resize(atoms.size());
                for (std::size_t a = 0; a < atoms.size(); ++a)
                    gram(atoms[a], p.s[a]);
                p.exact = true;
                return p;
            }
            if (samples < 2)
                throw std::invalid_argument("covopt: need at least 2 samples");
            p.s.resize(samples);
            for_each_batch(samples, workers, [&](std::size_t b, std::size_t begin, std::size_t end)
                           {
                SampleRng rng(stream, b);
                ComplexMatrix h;
                for (std::size_t i = begin; i < end; ++i)
                {
                    law.sample_into(h, rng);
                    gram(h, p.s[i]);
                } });
            p.w.assign(samples, 1.0 / static_cast<double>(samples));
            return p;
        }

        PoolEval evaluate(const Pool &p, const ComplexMatrix &q)
        {
            const std::size_t n = p.s.size(), t = p.dim;
            PoolEval ev;
            ev.mi_each.resize(n);
            auto one = [&](std::size_t i, ComplexMatrix &a, ComplexMatrix &b, std::vector<std::size_t> &piv)
            {
                multiply_into(a, p.s[i], q);
                for (std::size_t k = 0; k < t; ++k)
                    a(k, k) += 1.0;
                b = p.s[i];
                ev.mi_each[i] = lu_solve_inplace(a, b, piv);
            };
            if (p.exact)
            {
                ev.m.reset(t, t);
                ComplexMatrix a, b;
                std::vector<std::size_t> piv;
                for (std::size_t i = 0; i < n; ++i)
                {
                    one(i, a, b, piv);
                    ev.m += p.w[i] * b;
                    ev.mi += p.w[i] * ev.mi_each[i];
                }
                ev.m_se.assign(t * t, 0.0);
            }
            else
            {
                const std::size_t batches = (n + batch_size - 1) / batch_size;
                std::vector<RunningMatrixMoments> part(batches);
                for_each_batch(n, p.workers, [&](std::size_t bi, std::size_t begin, std::size_t end)
                               {
                    ComplexMatrix a, b;
                    std::vector<std::size_t> piv;
                    RunningMatrixMoments acc;
                    for (std::size_t i = begin; i < end; ++i)
                    {
                        one(i, a, b, piv);
                        acc.add(b);
                    }
                    part[bi] = std::move(acc); });
                RunningMatrixMoments total;
                for (const auto &pm : part)
                    total.merge(pm);
                ev.m = total.mean;
                ev.m_se.resize(total.m2.size());
                for (std::size_t k = 0; k < total.m2.size(); ++k)
                    ev.m_se[k] = std::sqrt(total.m2[k] / (total.n - 1.0) / total.n);
                RunningMoments mi;
                for (double v : ev.mi_each)
                    mi.add(v);
                ev.mi = mi.mean;
                ev.mi_se = std::sqrt(mi.m2 / (mi.n - 1.0) / mi.n);
            }
            if (!ev.m.all_finite() || !std::isfinite(ev.mi))
                throw numerical_error("covopt: non-finite gradient estimate");
            ev.m = HermitianMatrix::symmetrized(ev.m).matrix();
            return ev;
        }

        // Slack for accepting a step: two standard errors of the paired MI difference
        double step_slack(const Pool &p, const PoolEval &a, const PoolEval &b)
        {
            double slack = 1e-12 * std::max(1.0, std::abs(a.mi));
            if (p.exact)
                return slack;
            RunningMoments d;
            for (std::size_t i = 0; i < a.mi_each.size(); ++i)
                d.add(b.mi_each[i] - a.mi_each[i]);
            return std::max(slack, 2.0 * std::sqrt(d.m2 / (d.n - 1.0) / d.n));
        }

        KktReport diag_report(const RealVector &q, const PoolEval &ev)
        {
            KktReport r;
            const std::size_t t = q.size();
            r.d.resize(t);
            double sum = 0.0, se = 0.0;
            std::size_t active = 0;
            for (std::size_t k = 0; k < t; ++k)
            {
                r.d[k] = ev.m(k, k).real();
                se = std::max(se, ev.m_se[k * t + k]);
                if (q[k] >= zero_power)
                {
                    sum += r.d[k];
                    ++active;
                }
            }
            if (active == 0)
                throw std::invalid_argument("kkt_residual_diag: no active mode");
            r.mu = sum / static_cast<double>(active);
            if (!(r.mu > 0.0))
                return r; // channel carries nothing; every allocation is optimal
            for (std::size_t k = 0; k < t; ++k)
            {
                const double dev = q[k] >= zero_power ? std::abs(r.d[k] - r.mu) : std::max(0.0, r.d[k] - r.mu);
                r.residual = std::max(r.residual, dev / r.mu);
            }
            r.noise = 3.0 * se / r.mu;
            return r;
        }

        ComplexMatrix diag_q(const RealVector &q)
        {
            return ComplexMatrix::diagonal(q);
        }

        KktReport general_report(const ComplexMatrix &t, const PoolEval &ev)
        {
            const std::size_t n = t.rows();
            ComplexMatrix g;
            multiply_into(g, t, ev.m);
            g *= cplx(2.0);
            KktReport r;
            double num = 0.0, den = 0.0, row = 0.0, se = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                double rs = 0.0;
                for (std::size_t j = i; j < n; ++j)
                {
                    rs += std::abs(t(i, j));
                    if (std::abs(t(i, j)) > 1e-8)
                    {
                        num += std::real(std::conj(t(i, j)) * g(i, j));
                        den += 2.0 * std::norm(t(i, j));
                    }
                }
                row = std::max(row, rs);
            }
            for (double v : ev.m_se)
                se = std::max(se, v);
            r.mu = den > 0.0 ? num / den : 0.0;
            if (!(r.mu > 0.0))
                return r;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    r.residual = std::max(r.residual, std::abs(g(i, j) - 2.0 * r.mu * t(i, j)) / (2.0 * r.mu));

            // Directions carrying no power must not have a larger derivative than the multiplier
            ComplexMatrix q;
            adjoint_multiply_into(q, t, t);
            const HermitianMatrix proj = null_projector(HermitianMatrix::symmetrized(q), zero_power);
            if (proj.trace() > 0.5)
            {
                const ComplexMatrix pmp = proj.matrix() * ev.m * proj.matrix();
                const double top = herm_eig(HermitianMatrix::symmetrized(pmp)).values.front();
                r.residual += std::max(0.0, top - r.mu) / r.mu;
            }
            r.noise = 3.0 * row * se / r.mu;
            return r;
        }

        double normalize_factor(ComplexMatrix &t)
        {
            const double f = t.frobenius();
            if (!(f > 0.0) || !std::isfinite(f))
                throw numerical_error("iterate_general: factor collapsed to zero");
            t *= cplx(1.0 / f);
            return f;
        }

        bool stalled(const std::vector<TraceRow> &trace, double tol, double last_change)
        {
            if (trace.size() <= stall_window)
                return false;
            const double now = trace.back().mi, then = trace[trace.size() - 1 - stall_window].mi;
            return std::abs(now - then) <= 0.1 * tol * std::max(std::abs(now), 1e-12) &&
                   last_change < std::max(0.1 * tol, 1e-7);
        }

        McConfig final_config(const CovOptOptions &o)
        {
            return McConfig{o.final_samples, SeededStream{o.seed}.child(1), o.workers};
        }
    }

    // ---- options

    CovOptOptions CovOptOptions::from_json(const nlohmann::json &j)
    {
        if (!j.is_object())
            throw std::invalid_argument("optimizer options must be a JSON object");
        CovOptOptions o;
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            const std::string &k = it.key();
            const auto &v = it.value();
            if (k == "tol")
                o.tol = v.get<double>();
            else if (k == "max_iter")
                o.max_iter = v.get<std::size_t>();
            else if (k == "samples")
                o.samples = v.get<std::size_t>();
            else if (k == "final_samples")
                o.final_samples = v.get<std::size_t>();
            else if (k == "damping")
                o.damping = v.get<double>();
            else if (k == "seed")
                o.seed = v.get<std::uint64_t>();
            else if (k == "workers")
                o.workers = v.get<unsigned>();
            else
                throw std::invalid_argument("optimizer options: unknown key '" + k + "'");
        }
        o.validate();
        return o;
    }

    nlohmann::json CovOptOptions::to_json() const
    {
        return {{"tol", tol}, {"max_iter", max_iter}, {"samples", samples}, {"final_samples", final_samples},
                {"damping", damping}, {"seed", seed}, {"workers", workers}};
    }

    void CovOptOptions::validate() const
    {
        if (!(tol > 0.0) || !std::isfinite(tol))
            throw std::invalid_argument("optimizer options: tol must be positive");
        if (max_iter == 0)
            throw std::invalid_argument("optimizer options: max_iter must be at least 1");
        if (samples < 2 || final_samples < 2)
            throw std::invalid_argument("optimizer options: sample counts must be at least 2");
        if (!(damping > 0.0 && damping <= 1.0))
            throw std::invalid_argument("optimizer options: damping must lie in (0, 1]");
    }

    // ---- diagonal fixed point

    KktReport kkt_residual_diag(const RealVector &q, const ChannelLaw &law, double gamma, const ComplexMatrix &u,
                                std::size_t samples, const SeededStream &stream, unsigned workers)
    {
        if (q.size() != law.cols())
            throw std::invalid_argument("kkt_residual_diag: q has " + std::to_string(q.size()) + " entries for " +
                                        std::to_string(law.cols()) + " transmit antennas");
        double sum = 0.0;
        for (double v : q)
        {
            if (!(v >= 0.0))
                throw std::domain_error("kkt_residual_diag: powers must be non-negative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::domain_error("kkt_residual_diag: powers must sum to one, got " + format_double(sum));
        const Pool p = make_pool(law, gamma, u, samples, stream, workers);
        return diag_report(q, evaluate(p, diag_q(q)));
    }

    CovOptResult fixed_point_diag(const ChannelLaw &law, double gamma, const ComplexMatrix &u, const CovOptOptions &opts)
    {
        opts.validate();
        const std::size_t t = law.cols();
        const Pool pool = make_pool(law, gamma, u, opts.samples, SeededStream{opts.seed}.child(0), opts.workers);

        RealVector q(t, 1.0 / static_cast<double>(t)), best = q;
        double best_mi = -1.0, alpha = opts.damping, change = 1.0;
        PoolEval ev = evaluate(pool, diag_q(q));
        CovOptResult res;
        res.stop_reason = "max_iter";
        for (std::size_t it = 0; it < opts.max_iter; ++it)
        {
            RealVector shown = q;
            for (std::size_t k = 0; k < t; ++k)
                if (shown[k] < zero_power && ev.m(k, k).real() <= diag_report(q, ev).mu)
                    shown[k] = 0.0;
            const KktReport rep = diag_report(shown, ev);
            res.trace.push_back({it, ev.mi, rep.residual, alpha});
            res.iterations = it + 1;
            if (ev.mi > best_mi)
            {
                best_mi = ev.mi;
                best = q;
            }
            if (rep.residual <= opts.tol)
            {
                res.converged = true;
                res.stop_reason = "kkt";
                break;
            }
            if (stalled(res.trace, opts.tol, change))
            {
                res.converged = true;
                res.stop_reason = "stall";
                break;
            }

            double s = 0.0;
            for (std::size_t k = 0; k < t; ++k)
                s += q[k] * ev.m(k, k).real();
            if (!(s > 0.0))
            {
                res.converged = true;
                res.stop_reason = "kkt";
                break;
            }
            bool accepted = false;
            while (alpha >= min_step)
            {
                RealVector cand(t);
                double tot = 0.0;
                for (std::size_t k = 0; k < t; ++k)
                {
                    const double target = q[k] * ev.m(k, k).real() / s;
                    cand[k] = std::max(power_floor, (1.0 - alpha) * q[k] + alpha * target);
                    tot += cand[k];
                }
                for (auto &v : cand)
                    v /= tot;
                PoolEval next = evaluate(pool, diag_q(cand));
                if (next.mi >= ev.mi - step_slack(pool, ev, next))
                {
                    change = 0.0;
                    for (std::size_t k = 0; k < t; ++k)
                        change = std::max(change, std::abs(cand[k] - q[k]) / std::max(q[k], zero_power));
                    q = std::move(cand);
                    ev = std::move(next);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted)
            {
                res.stop_reason = "step";
                break;
            }
        }
        if (!res.converged)
            q = best;

        // Final report at the returned point, with vanishing modes declared zero
        ev = evaluate(pool, diag_q(q));
        const double mu = diag_report(q, ev).mu;
        for (std::size_t k = 0; k < t; ++k)
            if (q[k] < zero_power && ev.m(k, k).real() <= mu)
                q[k] = 0.0;
        double tot = 0.0;
        for (double v : q)
            tot += v;
        for (auto &v : q)
            v /= tot;
        ev = evaluate(pool, diag_q(q));
        const KktReport fin = diag_report(q, ev);
        res.kkt_residual = fin.residual;
        res.kkt_noise = fin.noise;
        res.powers = q;
        ComplexMatrix qm = diag_q(q);
        if (u.rows())
            qm = u * qm * u.adjoint();
        HermitianMatrix qh = HermitianMatrix::symmetrized(qm);
        res.q = HermitianMatrix::symmetrized((1.0 / qh.trace()) * qh.matrix());
        res.factor = chol_upper(res.q);
        res.mi = ergodic_mi(res.q, law, gamma, final_config(opts));
        return res;
    }

    // ---- general iteration

    GradMatrix grad_matrix(const UpperTriangular &t, const ChannelLaw &law, double gamma, std::size_t samples,
                           const SeededStream &stream, unsigned workers)
    {
        if (t.size() != law.cols())
            throw std::invalid_argument("grad_matrix: factor size does not match the channel");
        const Pool p = make_pool(law, gamma, ComplexMatrix(), samples, stream, workers);
        PoolEval ev = evaluate(p, ut_gram(t).matrix());
        return {std::move(ev.m), std::move(ev.m_se)};
    }

    KktReport kkt_residual_general(const UpperTriangular &t, const ChannelLaw &law, double gamma, std::size_t samples,
                                   const SeededStream &stream, unsigned workers)
    {
        if (t.size() != law.cols())
            throw std::invalid_argument("kkt_residual_general: factor size does not match the channel");
        const double tr = ut_gram(t).trace();
        if (std::abs(tr - 1.0) > 1e-9)
            throw std::domain_error("kkt_residual_general: tr(T^H T) must be one, got " + format_double(tr));
        const Pool p = make_pool(law, gamma, ComplexMatrix(), samples, stream, workers);
        return general_report(t.matrix(), evaluate(p, ut_gram(t).matrix()));
    }

    CovOptResult iterate_general(const ChannelLaw &law, double gamma, const CovOptOptions &opts,
                                 const std::optional<UpperTriangular> &t0)
    {
        opts.validate();
        const std::size_t n = law.cols();
        ComplexMatrix t;
        if (t0)
        {
            if (t0->size() != n)
                throw std::invalid_argument("iterate_general: initial factor size does not match the channel");
            t = t0->matrix();
        }
        else
            t = (1.0 / std::sqrt(static_cast<double>(n))) * ComplexMatrix::identity(n);
        normalize_factor(t);

        const Pool pool = make_pool(law, gamma, ComplexMatrix(), opts.samples, SeededStream{opts.seed}.child(0),
                                    opts.workers);
        auto gram = [](const ComplexMatrix &f)
        {
            ComplexMatrix q;
            adjoint_multiply_into(q, f, f);
            return q;
        };
        PoolEval ev = evaluate(pool, gram(t));
        ComplexMatrix best = t;
        double best_mi = -1.0, alpha = opts.damping, change = 1.0;
        CovOptResult res;
        res.stop_reason = "max_iter";
        for (std::size_t it = 0; it < opts.max_iter; ++it)
        {
            const KktReport rep = general_report(t, ev);
            res.trace.push_back({it, ev.mi, rep.residual, alpha});
            res.iterations = it + 1;
            if (ev.mi > best_mi)
            {
                best_mi = ev.mi;
                best = t;
            }
            if (rep.residual <= opts.tol)
            {
                res.converged = true;
                res.stop_reason = "kkt";
                break;
            }
            if (stalled(res.trace, opts.tol, change))
            {
                res.converged = true;
                res.stop_reason = "stall";
                break;
            }

            // T (M + M^H) restricted to the upper triangle, rows rotated so the diagonal is real
            ComplexMatrix up;
            multiply_into(up, t, ev.m);
            up *= cplx(2.0);
            for (std::size_t i = 0; i < n; ++i)
            {
                for (std::size_t j = 0; j < i; ++j)
                    up(i, j) = 0.0;
                const double a = std::abs(up(i, i));
                if (a > 0.0)
                {
                    const cplx ph = std::conj(up(i, i)) / a;
                    for (std::size_t j = i; j < n; ++j)
                        up(i, j) *= ph;
                }
                up(i, i) = std::max(0.0, up(i, i).real());
            }
            normalize_factor(up);

            bool accepted = false;
            while (alpha >= min_step)
            {
                ComplexMatrix cand = (1.0 - alpha) * t + alpha * up;
                normalize_factor(cand);
                PoolEval next = evaluate(pool, gram(cand));
                if (next.mi >= ev.mi - step_slack(pool, ev, next))
                {
                    ComplexMatrix d = cand - t;
                    change = d.max_abs() / std::max(t.max_abs(), 1e-300);
                    t = std::move(cand);
                    ev = std::move(next);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted)
            {
                res.stop_reason = "step";
                break;
            }
        }
        if (!res.converged)
        {
            t = best;
            ev = evaluate(pool, gram(t));
        }
        const KktReport fin = general_report(t, ev);
        res.kkt_residual = fin.residual;
        res.kkt_noise = fin.noise;
        for (std::size_t i = 0; i < n; ++i)
            t(i, i) = t(i, i).real();
        res.factor = UpperTriangular(t);
        res.q = HermitianMatrix::symmetrized(gram(t));
        res.powers = herm_eig(res.q).values;
        res.mi = ergodic_mi(res.q, law, gamma, final_config(opts));
        return res;
    }

    // ---- monotonicity

    bool powers_monotone(const RealVector &gammas, const std::vector<RealVector> &q)
    {
        if (gammas.size() != q.size())
            throw std::invalid_argument("powers_monotone: grid and power lists differ in length");
        for (std::size_t g = 1; g < gammas.size(); ++g)
        {
            if (!(gammas[g] > gammas[g - 1]))
                throw std::invalid_argument("powers_monotone: gamma grid must be ascending");
            if (q[g].size() != q[g - 1].size())
                throw std::invalid_argument("powers_monotone: mode count changed along the grid");
            for (std::size_t k = 0; k < q[g].size(); ++k)
                if (gammas[g] * q[g][k] < gammas[g - 1] * q[g - 1][k] - 0.01 * gammas[g])
                    return false;
        }
        return true;
    }

    bool monotonicity_check(const ChannelLaw &law, const ComplexMatrix &u, const RealVector &gammas,
                            const CovOptOptions &opts)
    {
        std::vector<RealVector> q;
        q.reserve(gammas.size());
        for (double g : gammas)
            q.push_back(fixed_point_diag(law, g, u, opts).powers);
        return powers_monotone(gammas, q);
    }

    void write_trace_csv(std::ostream &os, const CovOptResult &r)
    {
        os << "iter,mi,residual,damping\n";
        for (const auto &row : r.trace)
            os << row.iter << ',' << format_double(row.mi) << ',' << format_double(row.residual) << ','
               << format_double(row.damping) << '\n';
    }
}
