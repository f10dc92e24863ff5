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
#include "ergocap/waterfill.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace ergocap;

static void BM_WaterfillDet(benchmark::State &state)
{
    RealVector gains(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < gains.size(); ++i)
        gains[i] = 1.0 / (1.0 + i);
    for (auto _ : state)
        benchmark::DoNotOptimize(waterfill_det(gains, 1.0));
}
BENCHMARK(BM_WaterfillDet)->Arg(2)->Arg(8)->Arg(64);

static void BM_WishartWaterLevel(benchmark::State &state)
{
    const auto m = static_cast<std::size_t>(state.range(0));
    const EigDensity f = wishart_density(m, m);
    for (auto _ : state)
        benchmark::DoNotOptimize(st_water_level(f, 10.0, m));
}
BENCHMARK(BM_WishartWaterLevel)->Arg(1)->Arg(2)->Arg(4);

static void BM_ErgodicMi(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const ChannelLaw law = ChannelLaw::rayleigh(n, n);
    const HermitianMatrix q = HermitianMatrix::diagonal(RealVector(n, 1.0 / n));
    for (auto _ : state)
        benchmark::DoNotOptimize(ergodic_mi(q, law, 1.0, McConfig{10000, {}, 1}));
}
BENCHMARK(BM_ErgodicMi)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_KktStep(benchmark::State &state)
{
    const ChannelLaw law = ChannelLaw::rayleigh(2, 2);
    const UpperTriangular t(ComplexMatrix::diagonal({std::sqrt(0.5), std::sqrt(0.5)}));
    for (auto _ : state)
        benchmark::DoNotOptimize(grad_matrix(t, law, 1.0, 10000, {}, 1));
}
BENCHMARK(BM_KktStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
