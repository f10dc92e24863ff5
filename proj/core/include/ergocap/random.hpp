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

#include <cstdint>
#include <random>

namespace ergocap
{
    inline constexpr std::uint64_t default_seed = 0x5eed2005ULL;

    // Samples are drawn in fixed batches; batch b of a stream always starts from the same engine state,
    // so sample i is a pure function of (seed, substream, i) no matter how batches are spread over threads.
    inline constexpr std::size_t batch_size = 1024;

    struct SeededStream
    {
        std::uint64_t seed = default_seed;
        std::uint64_t substream = 0;

        // Independent child stream, e.g. one per optimizer run or per grid point
        SeededStream child(std::uint64_t k) const;
    };

    class SampleRng
    {
    public:
        SampleRng(const SeededStream &stream, std::uint64_t batch);

        double uniform();      // [0, 1)
        double uniform_open(); // (0, 1]
        double normal();       // N(0, 1)
        cplx complex_normal(); // CN(0, 1): real and imaginary parts N(0, 1/2)

    private:
        std::mt19937_64 engine;
    };

    // Haar-distributed n x n unitary: Gram-Schmidt on iid CN(0,1) columns
    ComplexMatrix random_unitary(std::size_t n, SampleRng &rng);
}
