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
#include "ergocap/montecarlo.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ergocap
{
    struct CovOptOptions
    {
        double tol = 1e-4;
        std::size_t max_iter = 1000;
        std::size_t samples = inner_samples;       // pool size reused by every iteration
        std::size_t final_samples = ergocap::final_samples; // fresh draws for the reported MI
        double damping = 0.5;
        std::uint64_t seed = default_seed;
        unsigned workers = 0;

        // Keys: tol, max_iter, samples, final_samples, damping, seed, workers. Unknown keys are rejected.
        static CovOptOptions from_json(const nlohmann::json &j);
        nlohmann::json to_json() const;
        void validate() const;
    };

    struct TraceRow
    {
        std::size_t iter = 0;
        double mi = 0.0;       // on the iteration pool
        double residual = 0.0; // KKT residual on the pool
        double damping = 0.0;  // step actually taken
    };

    struct CovOptResult
    {
        HermitianMatrix q;      // trace one
        UpperTriangular factor; // q = factor^H factor
        RealVector powers;      // diagonal fixed point: q_k in the U basis; general: eigenvalues of q
        ScalarEstimate mi;      // fresh-sample estimate
        double kkt_residual = 0.0;
        double kkt_noise = 0.0; // residual level explained by Monte Carlo error on the pool
        std::vector<TraceRow> trace;
        std::size_t iterations = 0;
        bool converged = false;
        std::string stop_reason; // kkt, stall, step, max_iter
    };

    struct GradMatrix
    {
        ComplexMatrix m;
        RealVector se; // row-major entry standard errors
    };

    struct KktReport
    {
        double residual = 0.0;
        double noise = 0.0; // three standard errors carried into residual units
        double mu = 0.0;    // multiplier estimate
        RealVector d;       // diagonal: E[((I+SQ)^-1 S)_kk]; general: empty
    };

    // Diagonal Kuhn-Tucker residual for Q = U diag(q) U^H, S = gamma U^H H^H H U
    KktReport kkt_residual_diag(const RealVector &q, const ChannelLaw &law, double gamma, const ComplexMatrix &u,
                                std::size_t samples, const SeededStream &stream, unsigned workers = 0);

    // Fixed point q_k <- q_k d_k / sum_j q_j d_j in the known eigenbasis u (identity when empty)
    CovOptResult fixed_point_diag(const ChannelLaw &law, double gamma, const ComplexMatrix &u,
                                  const CovOptOptions &opts = {});

    // M = E[(I + S T^H T)^-1 S], S = gamma H^H H
    GradMatrix grad_matrix(const UpperTriangular &t, const ChannelLaw &law, double gamma, std::size_t samples,
                           const SeededStream &stream, unsigned workers = 0);

    // Stationarity of G = T (M + M^H) against 2 mu T, relative to 2 mu, plus the null-space condition
    KktReport kkt_residual_general(const UpperTriangular &t, const ChannelLaw &law, double gamma, std::size_t samples,
                                   const SeededStream &stream, unsigned workers = 0);

    // Cholesky-factor iteration over general covariances, started from t0 (I / sqrt(t) when absent)
    CovOptResult iterate_general(const ChannelLaw &law, double gamma, const CovOptOptions &opts = {},
                                 const std::optional<UpperTriangular> &t0 = std::nullopt);

    // True when every gamma * q_k is non-decreasing along the ascending grid, within 0.01 gamma
    bool powers_monotone(const RealVector &gammas, const std::vector<RealVector> &q);

    bool monotonicity_check(const ChannelLaw &law, const ComplexMatrix &u, const RealVector &gammas,
                            const CovOptOptions &opts = {});

    // Columns iter,mi,residual,damping
    void write_trace_csv(std::ostream &os, const CovOptResult &r);
}
