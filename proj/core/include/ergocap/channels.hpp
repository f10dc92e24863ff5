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

#include "ergocap/density.hpp"
#include "ergocap/linalg.hpp"
#include "ergocap/random.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace ergocap
{
    // H = H0 with probability one
    struct PointMassLaw
    {
        ComplexMatrix h;
    };

    // vec(H) ~ CN(vec(M), cov), vec stacks columns: index of H(i,j) is i + j*r
    struct MatrixGaussianLaw
    {
        ComplexMatrix mean;
        HermitianMatrix cov;
    };

    // H = M + R^{1/2} G Tc^{1/2} with G iid CN(0,1).
    // Column-stacked covariance is conj(Tc) (x) R.
    struct KroneckerLaw
    {
        ComplexMatrix mean;
        HermitianMatrix rx;
        HermitianMatrix tx;
    };

    // H = kappa M0 + (1 - kappa) X with X = G cov^{1/2}, cov the t x t transmit-side covariance
    struct InterpolatedLaw
    {
        double kappa = 0.0;
        ComplexMatrix m0;
        HermitianMatrix cov;
    };

    // H = atoms[a] with probability weights[a]
    struct MixtureLaw
    {
        RealVector weights;
        std::vector<ComplexMatrix> atoms;
    };

    class ChannelLaw
    {
    public:
        using Variant = std::variant<PointMassLaw, MatrixGaussianLaw, KroneckerLaw, InterpolatedLaw, MixtureLaw>;

        static ChannelLaw point_mass(const ComplexMatrix &h);
        static ChannelLaw matrix_gaussian(const ComplexMatrix &mean, const HermitianMatrix &cov);
        // normalize rescales so that tr(rx) = r and tr(tx) = t
        static ChannelLaw kronecker(const ComplexMatrix &mean, const HermitianMatrix &rx, const HermitianMatrix &tx,
                                    bool normalize = false);
        static ChannelLaw rayleigh(std::size_t r, std::size_t t); // iid CN(0,1) entries
        static ChannelLaw interpolated(double kappa, const ComplexMatrix &m0, const HermitianMatrix &cov);
        static ChannelLaw mixture(const RealVector &weights, const std::vector<ComplexMatrix> &atoms);

        std::size_t rows() const { return r; } // receive antennas
        std::size_t cols() const { return t; } // transmit antennas
        const Variant &variant() const { return law; }

        // Point masses and finite mixtures have a finite support that expectations can enumerate exactly
        bool is_discrete() const;
        // Atoms and probabilities of a discrete law
        void support(std::vector<ComplexMatrix> &atoms, RealVector &weights) const;

        // Zero-mean Kronecker law with identity correlations
        bool is_iid_rayleigh() const;

        void sample_into(ComplexMatrix &h, SampleRng &rng) const;

    private:
        ChannelLaw() = default;
        void prepare();

        Variant law;
        std::size_t r = 0, t = 0;
        ComplexMatrix factor_a; // sampling factors: chol lower factor, or R^{1/2}
        ComplexMatrix factor_b; // Tc^{1/2} or cov^{1/2}
        RealVector cumulative;  // mixture CDF
        bool rayleigh_iid = false;
    };

    ComplexMatrix sample(const ChannelLaw &law, SampleRng &rng);

    // t x t E[H^H H], closed form for every law variant
    HermitianMatrix expected_gram(const ChannelLaw &law);

    // Unordered eigenvalue density of the min(r,t) non-trivial eigenvalues of H H^H.
    // Discrete laws give exact point masses; continuous laws pool `samples` draws.
    EigDensity empirical_density(const ChannelLaw &law, std::size_t samples, const SeededStream &stream);

    // m x m complex central Wishart with n degrees of freedom, i.e. H H^H with H m x n iid CN(0,1), m <= n
    EigDensity wishart_density(std::size_t m, std::size_t n);

    // Each of m parallel channels independently on (gain 1) with probability p
    EigDensity onoff_density(std::size_t m, double p);

    // The on-off channel as a law: mixture over the 2^m diagonal 0/1 gain patterns
    ChannelLaw onoff_law(std::size_t m, double p);
}
