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
#include "ergocap/covopt.hpp"
#include "ergocap/linalg.hpp"
#include "ergocap/montecarlo.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ergocap
{
    enum class BeamformMethod
    {
        monte_carlo,
        closed_form,          // partial fractions over zeta_ij
        closed_form_integral, // same expectation as one integral, used when receive eigenvalues nearly coincide
    };

    std::string to_string(BeamformMethod m);

    // margin = E[(u^H R u + gamma tau2 u^H R^2 u) / (1 + gamma tau1 u^H R u)] - r tau2 / tau1
    struct BeamformVerdict
    {
        bool optimal = false; // margin > 0
        double margin = 0.0;
        double se = 0.0; // zero for closed forms
        BeamformMethod method = BeamformMethod::monte_carlo;
    };

    // Needs tr(R) = r, tr(Tc) = t and t >= 2; tau1 >= tau2 are the two largest eigenvalues of Tc
    BeamformVerdict beamform_opt_mc(const HermitianMatrix &r, const HermitianMatrix &tc, double gamma,
                                    std::size_t samples, const SeededStream &stream, unsigned workers = 0);

    // Receive eigenvalues rho (sum r), largest transmit eigenvalues tau1 >= tau2.
    // Coincident rho are separated by a 1e-9 relative jitter.
    BeamformVerdict beamform_opt_closed(const RealVector &rho, double tau1, double tau2, double gamma);

    struct BoundaryPoint
    {
        double rho = 0.0;
        double tau = 0.0; // smallest tau in [1, 2] with positive margin
    };

    // R = diag(rho, 2 - rho), Tc = diag(tau, 2 - tau)
    std::vector<BoundaryPoint> beamform_boundary(double gamma, const RealVector &rho_grid);

    struct LowSnr
    {
        HermitianMatrix q;
        double slope = 0.0; // d C / d gamma at zero: largest eigenvalue of E[H^H H]
        std::size_t k = 0;  // multiplicity of that eigenvalue
        bool near_degenerate = false;
    };

    LowSnr low_snr_cov(const ChannelLaw &law);

    struct HighSnr
    {
        HermitianMatrix q;    // I / t
        ScalarEstimate approx; // t ln(gamma/t) + E[ln det(H^H H)]
        ScalarEstimate exact;  // ergodic MI at I / t
        std::size_t excluded = 0; // singular draws left out of the approximation
    };

    HighSnr high_snr_capacity(const ChannelLaw &law, double gamma, const McConfig &cfg);

    // Scale of the central Wishart that stands in for H^H Q H: Tc^{1/2} Q Tc^{1/2} + M^H M / t
    HermitianMatrix wishart_approx(const ComplexMatrix &mean, const HermitianMatrix &tc, const HermitianMatrix &q);

    // Central Kronecker law with identity receive side and transmit side wishart_approx(mean, tc, I)
    ChannelLaw wishart_approx_law(const ComplexMatrix &mean, const HermitianMatrix &tc);

    // tau on every off-diagonal entry, one on the diagonal
    HermitianMatrix transmit_correlation(std::size_t t, double tau);

    struct WishartApproxPoint
    {
        double gamma = 0.0;
        ScalarEstimate capacity;      // optimized under the true law
        ScalarEstimate approx_mi;     // covariance from the approximation, MI under the true law
    };

    WishartApproxPoint wishart_approx_study(const ComplexMatrix &mean, const HermitianMatrix &tc, double gamma,
                                            const CovOptOptions &opts);

    struct InterpPoint
    {
        double kappa = 0.0;
        HermitianMatrix q;
        RealVector powers;        // eigenvalues of q, descending
        double angle = 0.0;       // top eigenvector of q, radians
        double gram_angle = 0.0;  // top eigenvector of E[H^H H], radians
        ScalarEstimate mi;
        bool converged = false;
    };

    // Angle of (v1, v2) after rotating v1 onto the positive real axis, in (-pi/2, pi/2]
    double eigvec_angle(const ComplexMatrix &vectors, std::size_t col);

    // H = kappa M0 + (1 - kappa) G cov^{1/2}, optimized per kappa with iterate_general
    std::vector<InterpPoint> interp_study(const ComplexMatrix &m0, const HermitianMatrix &cov, const RealVector &kappas,
                                          double gamma, const CovOptOptions &opts);

    // iid Rayleigh r x t: space-time water-filling, per-draw (space only) water-filling and equal power
    struct RayleighGains
    {
        double gamma = 0.0;
        double space_time = 0.0;
        ScalarEstimate space;
        double equal = 0.0;
    };

    RayleighGains rayleigh_gains(std::size_t t, std::size_t r, double gamma, const McConfig &cfg);
}
