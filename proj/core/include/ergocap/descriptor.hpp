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
#include "ergocap/density.hpp"
#include "ergocap/linalg.hpp"
#include "ergocap/random.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>

namespace ergocap
{
    // JSON channel descriptors.
    //
    //   {"type": "point", "h": M}
    //   {"type": "gaussian", "mean": M, "cov": M}             cov over column-stacked vec(H)
    //   {"type": "kronecker", "mean": M, "rx": M, "tx": M, "normalize": false}
    //   {"type": "kronecker", "r": 2, "t": 2, ...}            missing matrices default to zero mean, identity
    //   {"type": "rayleigh", "r": 2, "t": 2}
    //   {"type": "interp", "kappa": 0.5, "m0": M, "cov": M}   cov is the t x t transmit-side covariance
    //   {"type": "mixture", "weights": [...], "atoms": [M, ...]}
    //   {"type": "onoff", "m": 4, "p": 0.3}
    //
    // Density-only descriptors for water-filling:
    //
    //   {"type": "wishart", "m": 2, "n": 2}
    //   {"type": "masses", "values": [...], "weights": [...], "modes": 1}
    //
    // A matrix M is an array of rows whose entries are numbers or [re, im] pairs, or {"diag": [...]}.

    ComplexMatrix matrix_from_json(const nlohmann::json &j);
    nlohmann::json matrix_to_json(const ComplexMatrix &m); // entries as [re, im]

    ChannelLaw law_from_json(const nlohmann::json &j);

    struct DensitySource
    {
        EigDensity density;
        std::size_t modes = 1;         // m in the water-filling equations
        std::optional<ChannelLaw> law; // absent for density-only descriptors
    };

    // Closed forms where known (Rayleigh, on-off, discrete laws), otherwise a pool of `pool` draws
    DensitySource density_from_json(const nlohmann::json &j, std::size_t pool, const SeededStream &stream);

    // Inline JSON when the text starts with '{' or '[', otherwise a file path
    nlohmann::json load_json(const std::string &path_or_inline);
}
