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

#include <catch2/catch_amalgamated.hpp>

#include "ergocap/analysis.hpp"
#include "ergocap/covopt.hpp"
#include "ergocap/waterfill.hpp"
#include "test_support.hpp"

#include <numbers>
#include <sstream>

// Covered tests:
// - Diagonal KKT residual at optimal, deterministic and perturbed points
// - Diagonal fixed point on Rayleigh, point-mass and correlated laws
// - Monotone powers in SNR, and the checker itself
// - Gradient matrix exact and symmetric cases, SE scaling
// - General iteration: rotated point masses, Rayleigh, non-commuting mean/covariance against a grid search
// - General KKT residual, result invariants, options JSON

using namespace ergocap;
using namespace test_support;
using Catch::Approx;

namespace
{
    const double golden = std::log(2.5) + std::log(1.25);

    ChannelLaw rotated_point_mass(SampleRng &rng)
    {
        const ComplexMatrix u = random_unitary(2, rng);
        return ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0}) * u.adjoint());
    }

    ChannelLaw correlated_tx(double tau1, double tau2)
    {
        return ChannelLaw::kronecker(ComplexMatrix(2, 2), HermitianMatrix::identity(2), HermitianMatrix::diagonal({tau1, tau2}));
    }

    void check_result_invariants(const CovOptResult &r)
    {
        CHECK(r.q.trace() == Approx(1.0).margin(1e-9));
        CHECK(herm_eig(r.q).values.back() >= -1e-10);
        CHECK(max_diff(ut_gram(r.factor).matrix(), r.q.matrix()) < 1e-9);
    }
}

TEST_CASE("kkt_residual_diag")
{
    const ComplexMatrix eye = ComplexMatrix::identity(2);
    {
        const KktReport k = kkt_residual_diag({0.5, 0.5}, ChannelLaw::rayleigh(2, 2), 1.0, eye, 100000, SeededStream{300, 0});
        CHECK(k.residual <= k.noise);
        CHECK(k.noise < 0.05);
    }
    {
        const KktReport k = kkt_residual_diag({0.75, 0.25}, ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})),
                                              1.0, eye, 1000, {});
        CHECK(k.residual <= 1e-6);
        CHECK(k.noise == 0.0);
    }
    {
        // mode 2 dry at an SNR where it should carry power
        const KktReport k = kkt_residual_diag({1.0, 0.0}, ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})),
                                              1.0, eye, 1000, {});
        CHECK(k.residual > 1e-3);
    }
    {
        const KktReport k = kkt_residual_diag({0.2, 0.8}, correlated_tx(1.5, 0.5), 1.0, eye, 100000, SeededStream{301, 0});
        CHECK(k.residual > 10.0 * std::max(k.noise, 1e-4));
    }
}

TEST_CASE("fixed_point_diag - Rayleigh, point mass, correlated transmit side")
{
    const ComplexMatrix eye = ComplexMatrix::identity(2);
    CovOptOptions opts;
    opts.samples = 100000;
    {
        const CovOptResult r = fixed_point_diag(ChannelLaw::rayleigh(2, 2), 1.0, eye, opts);
        CHECK(std::abs(r.powers[0] - 0.5) <= 0.02);
        CHECK(std::abs(r.powers[1] - 0.5) <= 0.02);
        check_result_invariants(r);
    }
    {
        const CovOptResult r = fixed_point_diag(ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})), 1.0, eye);
        CHECK(r.powers[0] == Approx(0.75).margin(1e-3));
        CHECK(r.powers[1] == Approx(0.25).margin(1e-3));
        CHECK(r.mi.mean == Approx(golden).margin(1e-3));
        CHECK(r.converged);
        check_result_invariants(r);
    }
    {
        opts.samples = 20000;
        const ChannelLaw law = correlated_tx(1.5, 0.5);
        const CovOptResult lo = fixed_point_diag(law, 0.05, eye, opts);
        const CovOptResult mid = fixed_point_diag(law, 0.5, eye, opts);
        CHECK(lo.powers[0] > lo.powers[1]);
        CHECK(lo.powers[0] >= mid.powers[0]);
        const BeamformVerdict v = beamform_opt_mc(HermitianMatrix::identity(2), HermitianMatrix::diagonal({1.5, 0.5}), 0.05,
                                                  100000, SeededStream{302, 0});
        REQUIRE(std::abs(v.margin) > 4.0 * v.se);
        CHECK(v.optimal);
        CHECK(lo.powers[1] < 0.01);
    }
}

TEST_CASE("monotonicity_check")
{
    const RealVector grid{0.1, 1.0, 10.0};
    const ComplexMatrix eye = ComplexMatrix::identity(2);
    CHECK(monotonicity_check(ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})), eye, grid));
    CovOptOptions opts;
    opts.samples = 20000;
    CHECK(monotonicity_check(correlated_tx(1.4, 0.6), eye, grid, opts));
    // gamma q_k falls from 0.5 to 0.3 on mode 1
    CHECK_FALSE(powers_monotone({1.0, 2.0}, {{0.5, 0.5}, {0.15, 0.85}}));
    CHECK(powers_monotone({1.0, 2.0}, {{0.8, 0.2}, {0.6, 0.4}}));
}

TEST_CASE("grad_matrix")
{
    const HermitianMatrix s0 = HermitianMatrix::diagonal({2.0, 1.0});
    const UpperTriangular t(ComplexMatrix::diagonal({std::sqrt(0.5), std::sqrt(0.5)}));
    {
        const GradMatrix g = grad_matrix(t, ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})), 1.0, 1000, {});
        const ComplexMatrix expected = inverse(ComplexMatrix::identity(2) + 0.5 * s0.matrix()) * s0.matrix();
        CHECK(max_diff(g.m, expected) < 1e-13);
    }
    const UpperTriangular td(ComplexMatrix::diagonal({std::sqrt(0.7), std::sqrt(0.3)}));
    const GradMatrix small = grad_matrix(td, ChannelLaw::rayleigh(3, 2), 2.0, 25000, SeededStream{303, 0});
    const GradMatrix big = grad_matrix(td, ChannelLaw::rayleigh(3, 2), 2.0, 100000, SeededStream{304, 0});
    CHECK(std::abs(big.m(0, 1)) <= 3.0 * big.se[1]);
    CHECK(std::abs(big.m(1, 0)) <= 3.0 * big.se[2]);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(small.se[k] / big.se[k] == Approx(2.0).epsilon(0.2));
}

TEST_CASE("iterate_general - rotated point masses reach the water-filling rate")
{
    SampleRng rng(SeededStream{305, 0}, 0);
    for (int rep = 0; rep < 3; ++rep)
    {
        const ChannelLaw law = rotated_point_mass(rng);
        const CovOptResult r = iterate_general(law, 1.0);
        CHECK(r.mi.mean == Approx(golden).margin(1e-3));
        CHECK(r.kkt_residual <= 1e-4);
        CHECK(r.converged);
        check_result_invariants(r);
        const KktReport k = kkt_residual_general(r.factor, law, 1.0, 1000, {});
        CHECK(k.residual <= 1e-4);
        // one perturbed entry, renormalized
        ComplexMatrix p = r.factor.matrix();
        p(0, 1) += 0.4;
        p *= cplx(1.0 / p.frobenius());
        CHECK(kkt_residual_general(UpperTriangular(p), law, 1.0, 1000, {}).residual > 1e-3);
    }
}

TEST_CASE("iterate_general and the diagonal fixed point agree", "[property]")
{
    CovOptOptions opts;
    opts.samples = 20000;
    {
        const CovOptResult r = iterate_general(ChannelLaw::rayleigh(2, 2), 1.0, opts);
        CHECK(std::abs(r.q(0, 1)) < 0.03);
        CHECK(std::abs(r.q(0, 0) - 0.5) < 0.03);
        check_result_invariants(r);
    }
    for (auto [tau1, gamma] : {std::pair{1.3, 1.0}, std::pair{1.6, 3.0}})
    {
        const ChannelLaw law = correlated_tx(tau1, 2.0 - tau1);
        const CovOptResult g = iterate_general(law, gamma, opts);
        const CovOptResult d = fixed_point_diag(law, gamma, ComplexMatrix::identity(2), opts);
        CHECK(std::abs(g.mi.mean - d.mi.mean) <= 3.0 * std::hypot(g.mi.se, d.mi.se));
        check_result_invariants(g);
        check_result_invariants(d);
        // fresh-seed re-evaluation of the reported MI
        const ScalarEstimate fresh = ergodic_mi(g.q, law, gamma, {final_samples, SeededStream{306, 0}, 0});
        CHECK(std::abs(fresh.mean - g.mi.mean) <= 2.0 * std::hypot(fresh.se, g.mi.se));
    }
}

TEST_CASE("iterate_general - trace MI never drops by more than 2 SE", "[property]")
{
    CovOptOptions opts;
    opts.samples = 10000;
    SampleRng rng(SeededStream{307, 0}, 0);
    for (int rep = 0; rep < 3; ++rep)
    {
        const ChannelLaw law = ChannelLaw::kronecker(random_matrix(2, 2, rng), HermitianMatrix::identity(2), random_correlation(2, rng));
        const CovOptResult r = iterate_general(law, 2.0, opts);
        // standard error of an MI level on the iteration pool
        const double se = r.mi.se * std::sqrt(static_cast<double>(opts.final_samples) / opts.samples);
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            CHECK(r.trace[i].mi >= r.trace[i - 1].mi - 2.0 * se);
    }
}

TEST_CASE("iterate_general - non-commuting mean and covariance against a grid search")
{
    const ComplexMatrix m0{{0.0, 1.0}, {1.0, 1.0}};
    const ChannelLaw law = ChannelLaw::interpolated(0.5, m0, HermitianMatrix::diagonal({4.0, 1.0}));
    const double gamma = 1.0;
    const McConfig pool{10000, SeededStream{308, 0}, 0};
    CovOptOptions opts;
    opts.samples = 10000;
    const CovOptResult r = iterate_general(law, gamma, opts);

    // 10 x 10 x 10 grid over Q = [[a, c e^{i phi}], [c e^{-i phi}, 1 - a]], |c| <= sqrt(a (1 - a))
    double best = -1.0;
    HermitianMatrix best_q;
    for (int ia = 0; ia < 10; ++ia)
        for (int ic = 0; ic < 10; ++ic)
            for (int ip = 0; ip < 10; ++ip)
            {
                const double a = (ia + 0.5) / 10.0;
                const double c = (2.0 * ic / 9.0 - 1.0) * std::sqrt(a * (1.0 - a));
                const double phi = ip * std::numbers::pi / 10.0;
                const cplx off = c * std::polar(1.0, phi);
                const HermitianMatrix q{{a, off}, {std::conj(off), 1.0 - a}};
                const double mi = ergodic_mi(q, law, gamma, pool).mean;
                if (mi > best)
                {
                    best = mi;
                    best_q = q;
                }
            }
    const double mine = ergodic_mi(r.q, law, gamma, pool).mean;
    CHECK(mine >= best - 1e-3);
    // principal directions agree up to the grid resolution
    const ComplexMatrix v = herm_eig(r.q).vectors, w = herm_eig(best_q).vectors;
    const double overlap = std::abs(std::conj(v(0, 0)) * w(0, 0) + std::conj(v(1, 0)) * w(1, 0));
    CHECK(overlap > std::cos(0.25));
    check_result_invariants(r);
}

TEST_CASE("kkt_residual_general - equal power on Rayleigh is optimal")
{
    const UpperTriangular t(ComplexMatrix::diagonal({std::sqrt(0.5), std::sqrt(0.5)}));
    const KktReport k = kkt_residual_general(t, ChannelLaw::rayleigh(2, 2), 1.0, 100000, SeededStream{309, 0});
    CHECK(k.residual <= k.noise);
    ComplexMatrix p = t.matrix();
    p(0, 1) += 0.4;
    p *= cplx(1.0 / p.frobenius());
    const KktReport bad = kkt_residual_general(UpperTriangular(p), ChannelLaw::rayleigh(2, 2), 1.0, 100000, SeededStream{309, 0});
    CHECK(bad.residual > 3.0 * bad.noise);
    CHECK_THROWS_AS(kkt_residual_general(UpperTriangular(ComplexMatrix::identity(2)), ChannelLaw::rayleigh(2, 2), 1.0, 100, {}),
                    std::domain_error);
}

TEST_CASE("CovOptOptions - JSON round trip and validation")
{
    CovOptOptions o;
    o.tol = 1e-3;
    o.max_iter = 17;
    o.samples = 1234;
    o.damping = 0.25;
    o.seed = 99;
    const CovOptOptions back = CovOptOptions::from_json(nlohmann::json::parse(o.to_json().dump()));
    CHECK(back.tol == o.tol);
    CHECK(back.max_iter == o.max_iter);
    CHECK(back.samples == o.samples);
    CHECK(back.damping == o.damping);
    CHECK(back.seed == o.seed);
    CHECK_THROWS(CovOptOptions::from_json({{"tolerance", 1e-3}}));
    CovOptOptions bad;
    bad.damping = 1.5;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("write_trace_csv")
{
    const CovOptResult r = iterate_general(ChannelLaw::point_mass(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0})), 1.0);
    std::ostringstream os;
    write_trace_csv(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "iter,mi,residual,damping");
    std::size_t rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == r.trace.size());
}
