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

#include "ergocap/montecarlo.hpp"
#include "test_support.hpp"

// Covered tests:
// - Seeded streams: repeatability and independence
// - Ergodic MI against quadrature for 1x1 and 2x2 Rayleigh, exact for point masses
// - Matrix expectations: Kronecker gram, constants, zero-mean symmetry
// - Bit-identical reruns across worker counts, 1/sqrt(n) standard error

using namespace ergocap;
using namespace test_support;
using Catch::Approx;

TEST_CASE("SeededStream - repeatable and independent")
{
    SampleRng a(SeededStream{42, 3}, 5), b(SeededStream{42, 3}, 5), c(SeededStream{42, 4}, 5);
    double cross = 0.0;
    constexpr int n = 100000;
    bool same = true;
    for (int k = 0; k < n; ++k)
    {
        const double x = a.normal(), y = b.normal();
        same = same && x == y;
        cross += x * c.normal();
    }
    CHECK(same);
    CHECK(std::abs(cross / n) < 4.0 / std::sqrt(n));
    CHECK(SeededStream{1, 0}.child(1).substream != SeededStream{1, 0}.child(2).substream);
}

TEST_CASE("ergodic_mi - point mass is exact")
{
    const ComplexMatrix h{{1.0, 0.5}, {cplx(0.0, 1.0), 2.0}};
    const HermitianMatrix q{{0.6, cplx(0.1, 0.1)}, {cplx(0.1, -0.1), 0.4}};
    const double gamma = 3.0;
    const ScalarEstimate e = ergodic_mi(q, ChannelLaw::point_mass(h), gamma, {});
    // log det(I + gamma H Q H^H) directly
    const ComplexMatrix a = ComplexMatrix::identity(2) + gamma * (h * q.matrix() * h.adjoint());
    const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
    CHECK(e.mean == Approx(std::log(det)).epsilon(1e-13));
    CHECK(e.se == 0.0);
}

TEST_CASE("ergodic_mi - 1x1 Rayleigh against quadrature")
{
    for (double gamma : {0.1, 1.0, 10.0})
    {
        const double oracle = integrate_tail([&](double x)
                                             { return std::log1p(gamma * x) * std::exp(-x); }, 0.0);
        const ScalarEstimate e = ergodic_mi(HermitianMatrix::identity(1), ChannelLaw::rayleigh(1, 1), gamma,
                                            {100000, SeededStream{100, 0}, 0});
        CHECK(std::abs(e.mean - oracle) <= 3.0 * e.se);
    }
}

TEST_CASE("ergodic_mi - 2x2 Rayleigh, equal power, against density quadrature")
{
    const double oracle = 2.0 * integrate_tail([](double x)
                                               { return std::log1p(0.5 * x) * wishart22_pdf(x); }, 0.0);
    const ScalarEstimate e = ergodic_mi(HermitianMatrix::diagonal({0.5, 0.5}), ChannelLaw::rayleigh(2, 2), 1.0,
                                        {100000, SeededStream{101, 0}, 0});
    CHECK(std::abs(e.mean - oracle) <= 3.0 * e.se);
}

TEST_CASE("expect_matrix - Kronecker gram, constants and symmetry")
{
    SampleRng rng(SeededStream{102, 0}, 0);
    const ComplexMatrix mean = random_matrix(2, 3, rng);
    const HermitianMatrix rx = random_correlation(2, rng), tx = random_correlation(3, rng);
    const ChannelLaw law = ChannelLaw::kronecker(mean, rx, tx);
    const McConfig cfg{100000, SeededStream{103, 0}, 0};
    const MatrixEstimate g = expect_matrix([](const ComplexMatrix &h, ComplexMatrix &out)
                                           { out = h.adjoint() * h; }, law, cfg);
    const ComplexMatrix closed = rx.trace() * tx.matrix() + mean.adjoint() * mean;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(g.mean(i, j) - closed(i, j)) <= 3.0 * g.se_at(i, j));

    const ComplexMatrix c{{1.0, cplx(2.0, -1.0)}};
    const MatrixEstimate k = expect_matrix([&](const ComplexMatrix &, ComplexMatrix &out)
                                           { out = c; }, law, cfg);
    CHECK(max_diff(k.mean, c) < 1e-14);
    CHECK(*std::max_element(k.se.begin(), k.se.end()) < 1e-14);

    const ChannelLaw zero_mean = ChannelLaw::kronecker(ComplexMatrix(2, 3), rx, tx);
    const MatrixEstimate h = expect_matrix([](const ComplexMatrix &x, ComplexMatrix &out)
                                           { out = x; }, zero_mean, cfg);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(h.mean(i, j)) <= 3.0 * h.se_at(i, j));
}

TEST_CASE("Monte Carlo - bit-identical reruns, any worker count", "[property]")
{
    const ChannelLaw law = ChannelLaw::rayleigh(3, 2);
    const HermitianMatrix q = HermitianMatrix::diagonal({0.7, 0.3});
    const ScalarEstimate a = ergodic_mi(q, law, 2.0, {20000, SeededStream{104, 0}, 1});
    const ScalarEstimate b = ergodic_mi(q, law, 2.0, {20000, SeededStream{104, 0}, 1});
    const ScalarEstimate c = ergodic_mi(q, law, 2.0, {20000, SeededStream{104, 0}, 4});
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    CHECK(a.mean == c.mean);
    CHECK(a.se == c.se);
    const ScalarEstimate d = ergodic_mi(q, law, 2.0, {20000, SeededStream{105, 0}, 1});
    CHECK(a.mean != d.mean);
}

TEST_CASE("Monte Carlo - quadrupling samples halves the standard error", "[property]")
{
    const ChannelLaw law = ChannelLaw::rayleigh(1, 1);
    const ScalarEstimate small = ergodic_mi(HermitianMatrix::identity(1), law, 1.0, {25000, SeededStream{106, 0}, 0});
    const ScalarEstimate big = ergodic_mi(HermitianMatrix::identity(1), law, 1.0, {100000, SeededStream{107, 0}, 0});
    CHECK(small.samples == 25000);
    CHECK(big.samples == 100000);
    CHECK(small.se / big.se == Approx(2.0).epsilon(0.2));
}

TEST_CASE("Monte Carlo - standard error is the sample std over sqrt(n)")
{
    // Estimate E[|H|^2] for 1x1 Rayleigh: |H|^2 ~ Exp(1), variance 1
    const std::size_t n = 100000;
    const ScalarEstimate e = expect_scalar([](const ComplexMatrix &h)
                                           { return std::norm(h(0, 0)); }, ChannelLaw::rayleigh(1, 1), {n, SeededStream{108, 0}, 0});
    CHECK(e.se == Approx(1.0 / std::sqrt(static_cast<double>(n))).epsilon(0.03));
    CHECK(std::abs(e.mean - 1.0) <= 3.0 * e.se);
}
