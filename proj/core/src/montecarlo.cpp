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

#include "ergocap/montecarlo.hpp"
#include "ergocap/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace ergocap
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }
    }

    SeededStream SeededStream::child(std::uint64_t k) const
    {
        return SeededStream{seed, splitmix64(substream ^ splitmix64(k + 0x632be59bd9b4e019ULL))};
    }

    SampleRng::SampleRng(const SeededStream &stream, std::uint64_t batch)
    {
        auto lo = [](std::uint64_t v)
        { return static_cast<std::uint32_t>(v & 0xffffffffu); };
        auto hi = [](std::uint64_t v)
        { return static_cast<std::uint32_t>(v >> 32); };
        std::seed_seq seq{lo(stream.seed), hi(stream.seed), lo(stream.substream), hi(stream.substream), lo(batch), hi(batch)};
        engine.seed(seq);
    }

    double SampleRng::uniform()
    {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }

    double SampleRng::uniform_open()
    {
        return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
    }

    double SampleRng::normal()
    {
        const double u1 = uniform_open(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    cplx SampleRng::complex_normal()
    {
        // Box-Muller with radius sqrt(-ln u) gives independent N(0, 1/2) parts
        const double u1 = uniform_open(), u2 = uniform();
        const double rad = std::sqrt(-std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

    ComplexMatrix random_unitary(std::size_t n, SampleRng &rng)
    {
        for (int attempt = 0; attempt < 16; ++attempt)
        {
            ComplexMatrix u(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    u(i, j) = rng.complex_normal();
            bool ok = true;
            for (std::size_t j = 0; j < n && ok; ++j)
            {
                // two passes of classical Gram-Schmidt for orthogonality at rounding level
                for (int pass = 0; pass < 2; ++pass)
                    for (std::size_t k = 0; k < j; ++k)
                    {
                        cplx dot = 0.0;
                        for (std::size_t i = 0; i < n; ++i)
                            dot += std::conj(u(i, k)) * u(i, j);
                        for (std::size_t i = 0; i < n; ++i)
                            u(i, j) -= dot * u(i, k);
                    }
                double nrm = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    nrm += std::norm(u(i, j));
                nrm = std::sqrt(nrm);
                if (nrm < 1e-8)
                {
                    ok = false;
                    break;
                }
                for (std::size_t i = 0; i < n; ++i)
                    u(i, j) /= nrm;
            }
            if (ok)
                return u;
        }
        throw numerical_error("random_unitary: degenerate draws");
    }

    unsigned resolve_workers(unsigned requested)
    {
        if (requested > 0)
            return requested;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }

    void for_each_batch(std::size_t samples, unsigned workers,
                        const std::function<void(std::size_t, std::size_t, std::size_t)> &body)
    {
        const std::size_t batches = (samples + batch_size - 1) / batch_size;
        const unsigned w = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), batches));
        if (w <= 1)
        {
            for (std::size_t b = 0; b < batches; ++b)
                body(b, b * batch_size, std::min(samples, (b + 1) * batch_size));
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_lock;
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (unsigned k = 0; k < w; ++k)
            pool.emplace_back([&]()
                              {
                for (;;)
                {
                    const std::size_t b = next.fetch_add(1);
                    if (b >= batches)
                        return;
                    try
                    {
                        body(b, b * batch_size, std::min(samples, (b + 1) * batch_size));
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> g(failure_lock);
                        if (!failure)
                            failure = std::current_exception();
                        next.store(batches);
                        return;
                    }
                } });
        for (auto &th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    ScalarEstimate expect_scalar(const ScalarFunction &fn, const ChannelLaw &law, const McConfig &cfg)
    {
        if (law.is_discrete())
        {
            std::vector<ComplexMatrix> atoms;
            RealVector w;
            law.support(atoms, w);
            double s = 0.0;
            for (std::size_t a = 0; a < atoms.size(); ++a)
                s += w[a] * fn(atoms[a]);
            if (!std::isfinite(s))
                throw numerical_error("expect_scalar: non-finite expectation");
            return {s, 0.0, atoms.size()};
        }
        if (cfg.samples < 2)
            throw std::invalid_argument("expect_scalar: need at least 2 samples for a standard error");

        const std::size_t batches = (cfg.samples + batch_size - 1) / batch_size;
        std::vector<RunningMoments> part(batches);
        for_each_batch(cfg.samples, cfg.workers, [&](std::size_t b, std::size_t begin, std::size_t end)
                       {
            SampleRng rng(cfg.stream, b);
            ComplexMatrix h;
            RunningMoments acc;
            for (std::size_t s = begin; s < end; ++s)
            {
                law.sample_into(h, rng);
                acc.add(fn(h));
            }
            part[b] = acc; });
        RunningMoments total;
        for (const auto &p : part)
            total.merge(p);
        if (!std::isfinite(total.mean) || !std::isfinite(total.m2))
            throw numerical_error("expect_scalar: non-finite sample");
        const double var = total.m2 / (total.n - 1.0);
        return {total.mean, std::sqrt(var / total.n), cfg.samples};
    }

    MatrixEstimate expect_matrix(const MatrixFunction &fn, const ChannelLaw &law, const McConfig &cfg)
    {
        MatrixEstimate est;
        if (law.is_discrete())
        {
            std::vector<ComplexMatrix> atoms;
            RealVector w;
            law.support(atoms, w);
            ComplexMatrix out;
            for (std::size_t a = 0; a < atoms.size(); ++a)
            {
                fn(atoms[a], out);
                if (a == 0)
                    est.mean.reset(out.rows(), out.cols());
                est.mean += w[a] * out;
            }
            est.se.assign(est.mean.rows() * est.mean.cols(), 0.0);
            est.samples = atoms.size();
            return est;
        }
        if (cfg.samples < 2)
            throw std::invalid_argument("expect_matrix: need at least 2 samples for a standard error");

        const std::size_t batches = (cfg.samples + batch_size - 1) / batch_size;
        std::vector<RunningMatrixMoments> part(batches);
        for_each_batch(cfg.samples, cfg.workers, [&](std::size_t b, std::size_t begin, std::size_t end)
                       {
            SampleRng rng(cfg.stream, b);
            ComplexMatrix h, out;
            RunningMatrixMoments acc;
            for (std::size_t s = begin; s < end; ++s)
            {
                law.sample_into(h, rng);
                fn(h, out);
                acc.add(out);
            }
            part[b] = std::move(acc); });
        RunningMatrixMoments total;
        for (const auto &p : part)
            total.merge(p);
        if (!total.mean.all_finite())
            throw numerical_error("expect_matrix: non-finite sample");
        est.mean = total.mean;
        est.se.resize(total.m2.size());
        for (std::size_t k = 0; k < total.m2.size(); ++k)
            est.se[k] = std::sqrt(total.m2[k] / (total.n - 1.0) / total.n);
        est.samples = cfg.samples;
        return est;
    }

    ScalarEstimate ergodic_mi(const HermitianMatrix &q, const ChannelLaw &law, double gamma, const McConfig &cfg)
    {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::domain_error("ergodic_mi: gamma must be positive, got " + std::to_string(gamma));
        if (q.size() != law.cols())
            throw std::invalid_argument("ergodic_mi: Q is " + std::to_string(q.size()) + "x" + std::to_string(q.size()) +
                                        " but the channel has " + std::to_string(law.cols()) + " transmit antennas");
        (void)chol_upper(q); // PSD check
        const ComplexMatrix qh = psd_sqrt(q).matrix();
        return expect_scalar([&](const ComplexMatrix &h)
                             {
            ComplexMatrix b, k;
            multiply_into(b, h, qh);
            adjoint_multiply_into(k, b, b);
            k *= cplx(gamma);
            const EigResult e = herm_eig(HermitianMatrix::symmetrized(k));
            double s = 0.0;
            for (double l : e.values)
                s += std::log1p(std::max(l, 0.0));
            return s; },
                             law, cfg);
    }
}
