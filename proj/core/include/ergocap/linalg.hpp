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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ergocap
{
    using cplx = std::complex<double>;
    using RealVector = std::vector<double>;

    // Dense complex matrix, row-major storage
    class ComplexMatrix
    {
    public:
        ComplexMatrix() = default;
        ComplexMatrix(std::size_t rows, std::size_t cols);
        ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data); // throws on non-finite entries
        ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

        static ComplexMatrix identity(std::size_t n);
        static ComplexMatrix diagonal(const RealVector &d);

        std::size_t rows() const { return n_rows; }
        std::size_t cols() const { return n_cols; }
        bool square() const { return n_rows == n_cols; }

        cplx &operator()(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }
        const cplx &operator()(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
        cplx *data() { return values.data(); }
        const cplx *data() const { return values.data(); }

        ComplexMatrix adjoint() const;
        ComplexMatrix conj() const;
        cplx trace() const;
        double max_abs() const;   // largest |a_ij|
        double frobenius() const; // sqrt(sum |a_ij|^2)
        bool all_finite() const;

        // Resize and zero, keeping the allocation when the shape matches
        void reset(std::size_t rows, std::size_t cols);

        ComplexMatrix &operator+=(const ComplexMatrix &b);
        ComplexMatrix &operator-=(const ComplexMatrix &b);
        ComplexMatrix &operator*=(cplx s);

    private:
        std::size_t n_rows = 0, n_cols = 0;
        std::vector<cplx> values;
    };

    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);
    ComplexMatrix operator*(cplx s, ComplexMatrix a);
    ComplexMatrix operator*(double s, ComplexMatrix a);

    // Kronecker product a (x) b
    ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

    // Allocation-free kernels for inner loops. Output must not alias the inputs.
    void multiply_into(ComplexMatrix &c, const ComplexMatrix &a, const ComplexMatrix &b);     // c = a b
    void adjoint_multiply_into(ComplexMatrix &c, const ComplexMatrix &a, const ComplexMatrix &b); // c = a^H b

    // Solves A X = B in place by LU with partial pivoting; A is overwritten, B becomes X.
    // Returns log|det A|. Throws numerical_error on an exactly singular pivot.
    double lu_solve_inplace(ComplexMatrix &a, ComplexMatrix &b, std::vector<std::size_t> &pivots);

    // General inverse of a square matrix
    ComplexMatrix inverse(const ComplexMatrix &a);

    // Hermitian matrix. Construction checks A = A^H to 1e-12 * max(1, max|a_ij|) and then symmetrizes.
    class HermitianMatrix
    {
    public:
        HermitianMatrix() = default;
        explicit HermitianMatrix(const ComplexMatrix &a);
        HermitianMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

        // (a + a^H) / 2 without the tolerance check, for results that are Hermitian up to rounding
        static HermitianMatrix symmetrized(const ComplexMatrix &a);
        static HermitianMatrix identity(std::size_t n);
        static HermitianMatrix diagonal(const RealVector &d);

        std::size_t size() const { return a.rows(); }
        const ComplexMatrix &matrix() const { return a; }
        const cplx &operator()(std::size_t i, std::size_t j) const { return a(i, j); }
        double trace() const { return a.trace().real(); }

    private:
        ComplexMatrix a;
    };

    // Upper-triangular matrix with real non-negative diagonal
    class UpperTriangular
    {
    public:
        UpperTriangular() = default;
        explicit UpperTriangular(const ComplexMatrix &t); // checks structure to 1e-12 * max(1, max|t_ij|)

        std::size_t size() const { return t.rows(); }
        const ComplexMatrix &matrix() const { return t; }
        const cplx &operator()(std::size_t i, std::size_t j) const { return t(i, j); }

    private:
        ComplexMatrix t;
    };

    struct EigResult
    {
        RealVector values;     // descending
        ComplexMatrix vectors; // orthonormal columns, A = V diag(values) V^H
    };

    struct SvdResult
    {
        ComplexMatrix U;     // r x k, orthonormal columns, k = min(r, t)
        RealVector singular; // descending, non-negative
        ComplexMatrix V;     // k x t, orthonormal rows; H = U diag(singular) V
    };

    // Cyclic Jacobi eigensolver for Hermitian matrices
    EigResult herm_eig(const HermitianMatrix &a);

    // SVD via the eigendecomposition of H^H H
    SvdResult svd(const ComplexMatrix &h);

    // Upper Cholesky factor T with T^H T = A for positive semidefinite A.
    // Eigenvalues in [-1e-12 ||A||, 0) are treated as zero; anything more negative throws std::domain_error.
    UpperTriangular chol_upper(const HermitianMatrix &a);

    // T^H T
    HermitianMatrix ut_gram(const UpperTriangular &t);

    // Hermitian PSD square root (negative rounding eigenvalues clamped)
    HermitianMatrix psd_sqrt(const HermitianMatrix &a);

    // log det(I + S Q) for Hermitian PSD S, Q, in nats
    double log_det_plus(const HermitianMatrix &s, const HermitianMatrix &q);

    // Orthogonal projector onto the null space of a PSD matrix (eigenvalues <= tol * max eigenvalue)
    HermitianMatrix null_projector(const HermitianMatrix &a, double tol = 1e-8);
}
