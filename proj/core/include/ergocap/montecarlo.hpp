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
#include "ergocap/linalg.hpp"
#include "ergocap/random.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace ergocap
{
    inline constexpr std::size_t inner_samples = 10000;  // per optimizer iteration
    inline constexpr std::size_t final_samples = 100000; // reported values

    // Welford accumulator for real values
    struct RunningMoments
    {
        double n = 0.0, mean = 0.0, m2 = 0.0;
        void add(double x)
        {
            n += 1.0;
            const double d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        void merge(const RunningMoments &o)
        {
            if (o.n == 0.0)
                return;
            if (n == 0.0)
            {
                *this = o;
                return;
            }
            const double tot = n + o.n, d = o.mean - mean;
            mean += d * o.n / tot;
            m2 += o.m2 + d * d * n * o.n / tot;
            n = tot;
        }
    };

    // Welford accumulator for complex matrices, m2 holds sum |x - mean|^2 per entry
    struct RunningMatrixMoments
    {
        double n = 0.0;
        ComplexMatrix mean;
        RealVector m2;
        void add(const ComplexMatrix &x)
        {
            if (n == 0.0)
            {
                mean.reset(x.rows(), x.cols());
                m2.assign(x.rows() * x.cols(), 0.0);
            }
            else if (x.rows() != mean.rows() || x.cols() != mean.cols())
                throw std::invalid_argument("matrix moments: sample shape changed");
            n += 1.0;
            const std::size_t sz = m2.size();
            for (std::size_t k = 0; k < sz; ++k)
            {
                const cplx d = x.data()[k] - mean.data()[k];
                mean.data()[k] += d / n;
                m2[k] += std::real(std::conj(d) * (x.data()[k] - mean.data()[k]));
            }
        }
        void merge(const RunningMatrixMoments &o)
        {
            if (o.n == 0.0)
                return;
            if (n == 0.0)
            {
                *this = o;
                return;
            }
            const double tot = n + o.n;
            for (std::size_t k = 0; k < m2.size(); ++k)
            {
                const cplx d = o.mean.data()[k] - mean.data()[k];
                mean.data()[k] += d * (o.n / tot);
                m2[k] += o.m2[k] + std::norm(d) * n * o.n / tot;
            }
            n = tot;
        }
    };

    struct McConfig
    {
        std::size_t samples = final_samples;
        SeededStream stream{};
        unsigned workers = 0; // 0 picks std::thread::hardware_concurrency()
    };

    // Mean with standard error = sample std / sqrt(samples). Discrete laws are enumerated exactly and report se = 0.
    struct ScalarEstimate
    {
        double mean = 0.0;
        double se = 0.0;
        std::size_t samples = 0;
    };

    // Entrywise mean; se(i,j) is the standard error of the complex entry, sqrt(E|X - EX|^2 / n)
    struct MatrixEstimate
    {
        ComplexMatrix mean;
        RealVector se; // row-major, same shape as mean
        std::size_t samples = 0;
        double se_at(std::size_t i, std::size_t j) const { return se[i * mean.cols() + j]; }
    };

    // fn must be safe to call concurrently
    using MatrixFunction = std::function<void(const ComplexMatrix &h, ComplexMatrix &out)>;
    using ScalarFunction = std::function<double(const ComplexMatrix &h)>;

    MatrixEstimate expect_matrix(const MatrixFunction &fn, const ChannelLaw &law, const McConfig &cfg);
    ScalarEstimate expect_scalar(const ScalarFunction &fn, const ChannelLaw &law, const McConfig &cfg);

    // E[log det(I + gamma H Q H^H)] in nats
    ScalarEstimate ergodic_mi(const HermitianMatrix &q, const ChannelLaw &law, double gamma, const McConfig &cfg);

    // Parallel loop over fixed-size batches of sample indices. body(batch, begin, end) should write a
    // per-batch partial result; combining partials in batch order keeps results independent of worker count.
    void for_each_batch(std::size_t samples, unsigned workers,
                        const std::function<void(std::size_t batch, std::size_t begin, std::size_t end)> &body);

    unsigned resolve_workers(unsigned requested);
}
