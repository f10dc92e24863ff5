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

#include "ergocap/errors.hpp"
#include "ergocap/special.hpp"
#include "test_support.hpp"

// Covered tests:
// - Hermitian eigen-decomposition, hand-checked cases and random reconstruction
// - SVD of zero, diagonal and random rectangular matrices
// - Gram of an upper-triangular factor and its Cholesky inverse, semidefinite input
// - Gamma(0, x) against quadrature of the defining integral
// - log det(I + SQ) special values and the det(I+AB) = det(I+BA) identity

using namespace ergocap;
using namespace test_support;
using Catch::Approx;

TEST_CASE("herm_eig - hand cases")
{
    {
        const EigResult e = herm_eig(HermitianMatrix::identity(2));
        CHECK(e.values[0] == Approx(1.0).margin(1e-14));
        CHECK(e.values[1] == Approx(1.0).margin(1e-14));
        CHECK(max_diff(e.vectors, ComplexMatrix::identity(2)) < 1e-14);
    }
    {
        const EigResult e = herm_eig(HermitianMatrix::diagonal({1.0, 2.0}));
        CHECK(e.values[0] == Approx(2.0).margin(1e-14));
        CHECK(e.values[1] == Approx(1.0).margin(1e-14));
        CHECK(std::abs(e.vectors(1, 0)) == Approx(1.0).margin(1e-14));
    }
    {
        // lambda^2 - 2 lambda = 0
        const HermitianMatrix a{{1.0, cplx(0.0, 1.0)}, {cplx(0.0, -1.0), 1.0}};
        const EigResult e = herm_eig(a);
        CHECK(e.values[0] == Approx(2.0).margin(1e-12));
        CHECK(e.values[1] == Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("herm_eig - random reconstruction and orthonormality")
{
    SampleRng rng(SeededStream{11, 0}, 0);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u})
        for (int rep = 0; rep < 5; ++rep)
        {
            const HermitianMatrix a = random_hermitian(n, rng);
            const EigResult e = herm_eig(a);
            const ComplexMatrix &u = e.vectors;
            const double scale = a.matrix().max_abs();
            CHECK(max_diff(a.matrix() * u, u * ComplexMatrix::diagonal(e.values)) <= 1e-10 * scale);
            CHECK(max_diff(u.adjoint() * u, ComplexMatrix::identity(n)) <= 1e-10);
            CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
        }
}

TEST_CASE("svd - zero, diagonal, random")
{
    {
        const SvdResult s = svd(ComplexMatrix(2, 3));
        for (double v : s.singular)
            CHECK(v == 0.0);
    }
    {
        const SvdResult s = svd(ComplexMatrix::diagonal({3.0, 4.0}));
        CHECK(s.singular[0] == Approx(4.0).margin(1e-13));
        CHECK(s.singular[1] == Approx(3.0).margin(1e-13));
    }
    SampleRng rng(SeededStream{12, 0}, 0);
    for (auto [r, c] : {std::pair{2u, 3u}, std::pair{3u, 2u}, std::pair{4u, 4u}, std::pair{1u, 5u}})
    {
        const ComplexMatrix g = random_matrix(r, c, rng);
        const SvdResult s = svd(g);
        CHECK(max_diff(s.U * ComplexMatrix::diagonal(s.singular) * s.V, g) <= 1e-10);
        const std::size_t k = std::min(r, c);
        CHECK(max_diff(s.U.adjoint() * s.U, ComplexMatrix::identity(k)) <= 1e-10);
        CHECK(max_diff(s.V * s.V.adjoint(), ComplexMatrix::identity(k)) <= 1e-10);
    }
}

TEST_CASE("ut_gram and chol_upper - hand cases")
{
    CHECK(max_diff(ut_gram(UpperTriangular(ComplexMatrix::identity(3))).matrix(), ComplexMatrix::identity(3)) == 0.0);
    {
        const UpperTriangular t(ComplexMatrix::diagonal({std::sqrt(0.2), std::sqrt(0.8)}));
        CHECK(max_diff(ut_gram(t).matrix(), ComplexMatrix::diagonal({0.2, 0.8})) < 1e-15);
    }
    {
        const UpperTriangular t(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}});
        const HermitianMatrix g = ut_gram(t);
        CHECK(max_diff(g.matrix(), ComplexMatrix{{1.0, 1.0}, {1.0, 2.0}}) < 1e-15);
        CHECK(g.trace() == Approx(3.0));
    }
    CHECK(max_diff(chol_upper(HermitianMatrix::identity(2)).matrix(), ComplexMatrix::identity(2)) < 1e-14);
    CHECK(max_diff(chol_upper(HermitianMatrix{{1.0, 1.0}, {1.0, 2.0}}).matrix(), ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}) < 1e-12);
    // rank one
    CHECK(max_diff(chol_upper(HermitianMatrix{{1.0, 1.0}, {1.0, 1.0}}).matrix(), ComplexMatrix{{1.0, 1.0}, {0.0, 0.0}}) < 1e-12);
    CHECK_THROWS_AS(chol_upper(HermitianMatrix::diagonal({1.0, -0.5})), std::domain_error);
    CHECK_THROWS_AS(UpperTriangular(ComplexMatrix{{1.0, 0.0}, {1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("chol_upper inverts ut_gram on random factors", "[property]")
{
    SampleRng rng(SeededStream{13, 0}, 0);
    for (std::size_t n : {1u, 2u, 4u, 7u})
        for (int rep = 0; rep < 5; ++rep)
        {
            ComplexMatrix t(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    t(i, j) = i == j ? cplx(0.5 + std::abs(rng.normal())) : rng.complex_normal();
            const HermitianMatrix a = ut_gram(UpperTriangular(t));
            double tri = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    tri += std::norm(t(i, j));
            CHECK(a.trace() == Approx(tri).epsilon(1e-13));
            const UpperTriangular back = chol_upper(a);
            CHECK(max_diff(back.matrix(), t) <= 1e-10 * std::max(1.0, t.max_abs()));
            CHECK(max_diff(ut_gram(back).matrix(), a.matrix()) <= 1e-10 * a.matrix().max_abs());
        }
}

TEST_CASE("expint_gamma0 - quadrature oracle")
{
    auto oracle = [](double x)
    { return integrate_tail([](double t)
                            { return std::exp(-t) / t; }, x); };
    CHECK(expint_gamma0(1.0) == Approx(0.219383934395520).epsilon(1e-12));
    CHECK(expint_gamma0(0.1) == Approx(1.822923958419390).epsilon(1e-12));
    for (double x : {1e-8, 1e-4, 0.01, 0.3, 0.99, 1.0, 1.01, 2.5, 10.0, 40.0, 200.0})
        CHECK(expint_gamma0(x) == Approx(oracle(x)).epsilon(1e-10));
    CHECK(expint_gamma0(50.0) < 1e-23);
    CHECK(expint_gamma0(50.0) < std::exp(-50.0) / 50.0);
    CHECK_THROWS_AS(expint_gamma0(0.0), std::domain_error);
    CHECK_THROWS_AS(expint_gamma0(-1.0), std::domain_error);
}

TEST_CASE("expint_gamma0 - monotone with the x e^x Gamma(0,x) -> 1 tail", "[property]")
{
    double prev = expint_gamma0(1e-8);
    for (double x = 1e-3; x < 700.0; x *= 1.3)
    {
        const double v = expint_gamma0(x);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(500.0 * expint_scaled(500.0) == Approx(1.0).epsilon(0.01));
    CHECK(expint_scaled(3.0) == Approx(std::exp(3.0) * expint_gamma0(3.0)).epsilon(1e-12));
}

TEST_CASE("log_det_plus - special values")
{
    CHECK(log_det_plus(HermitianMatrix(ComplexMatrix(2, 2)), HermitianMatrix::identity(2)) == 0.0);
    CHECK(log_det_plus(HermitianMatrix::diagonal({2.0, 1.0}), HermitianMatrix::diagonal({0.5, 0.5})) ==
          Approx(std::log(2.0) + std::log(1.5)).epsilon(1e-14));
    CHECK(log_det_plus(HermitianMatrix::identity(3), HermitianMatrix::identity(3)) == Approx(3.0 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_det_plus(HermitianMatrix::identity(2), HermitianMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("log_det_plus - symmetric in its arguments", "[property]")
{
    SampleRng rng(SeededStream{14, 0}, 0);
    for (std::size_t n : {2u, 3u, 6u})
        for (int rep = 0; rep < 5; ++rep)
        {
            const ComplexMatrix a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
            const HermitianMatrix s = HermitianMatrix::symmetrized(a.adjoint() * a);
            const HermitianMatrix q = HermitianMatrix::symmetrized(b.adjoint() * b);
            const double x = log_det_plus(s, q), y = log_det_plus(q, s);
            CHECK(x >= 0.0);
            CHECK(x == Approx(y).epsilon(1e-12));
        }
}
