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

#include "ergocap/linalg.hpp"
#include "ergocap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ergocap
{
    namespace
    {
        constexpr double structure_tol = 1e-12;

        void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *op)
        {
            if (a.rows() != b.rows() || a.cols() != b.cols())
                throw std::invalid_argument(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                            std::to_string(b.cols()) + ")");
        }
    }

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
        : n_rows(rows), n_cols(cols), values(rows * cols, cplx(0.0, 0.0))
    {
    }

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : n_rows(rows), n_cols(cols), values(std::move(data))
    {
        if (values.size() != rows * cols)
            throw std::invalid_argument("ComplexMatrix: data length " + std::to_string(values.size()) +
                                        " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
        if (!all_finite())
            throw std::invalid_argument("ComplexMatrix: non-finite entry");
    }

    ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    {
        n_rows = rows.size();
        n_cols = n_rows ? rows.begin()->size() : 0;
        values.reserve(n_rows * n_cols);
        for (const auto &r : rows)
        {
            if (r.size() != n_cols)
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            values.insert(values.end(), r.begin(), r.end());
        }
        if (!all_finite())
            throw std::invalid_argument("ComplexMatrix: non-finite entry");
    }

    ComplexMatrix ComplexMatrix::identity(std::size_t n)
    {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    ComplexMatrix ComplexMatrix::diagonal(const RealVector &d)
    {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    ComplexMatrix ComplexMatrix::adjoint() const
    {
        ComplexMatrix r(n_cols, n_rows);
        for (std::size_t i = 0; i < n_rows; ++i)
            for (std::size_t j = 0; j < n_cols; ++j)
                r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix ComplexMatrix::conj() const
    {
        ComplexMatrix r = *this;
        for (auto &v : r.values)
            v = std::conj(v);
        return r;
    }

    cplx ComplexMatrix::trace() const
    {
        if (!square())
            throw std::invalid_argument("trace: matrix is not square");
        cplx s = 0.0;
        for (std::size_t i = 0; i < n_rows; ++i)
            s += (*this)(i, i);
        return s;
    }

    double ComplexMatrix::max_abs() const
    {
        double m = 0.0;
        for (const auto &v : values)
            m = std::max(m, std::abs(v));
        return m;
    }

    double ComplexMatrix::frobenius() const
    {
        double s = 0.0;
        for (const auto &v : values)
            s += std::norm(v);
        return std::sqrt(s);
    }

    bool ComplexMatrix::all_finite() const
    {
        return std::all_of(values.begin(), values.end(),
                           [](const cplx &v)
                           { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
    }

    void ComplexMatrix::reset(std::size_t rows, std::size_t cols)
    {
        n_rows = rows;
        n_cols = cols;
        values.assign(rows * cols, cplx(0.0, 0.0));
    }

    ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &b)
    {
        require_same_shape(*this, b, "operator+");
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] += b.values[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &b)
    {
        require_same_shape(*this, b, "operator-");
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] -= b.values[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator*=(cplx s)
    {
        for (auto &v : values)
            v *= s;
        return *this;
    }

    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= cplx(s, 0.0); }

    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        ComplexMatrix c;
        multiply_into(c, a, b);
        return c;
    }

    void multiply_into(ComplexMatrix &c, const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.cols() != b.rows())
            throw std::invalid_argument("multiply: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                                        std::to_string(b.rows()) + ")");
        const std::size_t n = a.rows(), m = b.cols(), k = a.cols();
        if (c.rows() != n || c.cols() != m)
            c.reset(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
            {
                cplx s = 0.0;
                for (std::size_t l = 0; l < k; ++l)
                    s += a(i, l) * b(l, j);
                c(i, j) = s;
            }
    }

    void adjoint_multiply_into(ComplexMatrix &c, const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.rows() != b.rows())
            throw std::invalid_argument("adjoint_multiply: row counts differ");
        const std::size_t n = a.cols(), m = b.cols(), k = a.rows();
        if (c.rows() != n || c.cols() != m)
            c.reset(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
            {
                cplx s = 0.0;
                for (std::size_t l = 0; l < k; ++l)
                    s += std::conj(a(l, i)) * b(l, j);
                c(i, j) = s;
            }
    }

    ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                for (std::size_t k = 0; k < b.rows(); ++k)
                    for (std::size_t l = 0; l < b.cols(); ++l)
                        r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        return r;
    }

    double lu_solve_inplace(ComplexMatrix &a, ComplexMatrix &b, std::vector<std::size_t> &piv)
    {
        const std::size_t n = a.rows();
        if (!a.square() || b.rows() != n)
            throw std::invalid_argument("lu_solve: shape mismatch");
        const std::size_t m = b.cols();
        piv.resize(n);
        double logdet = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            std::size_t p = k;
            double best = std::abs(a(k, k));
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(a(i, k)) > best)
                {
                    best = std::abs(a(i, k));
                    p = i;
                }
            if (best == 0.0)
                throw numerical_error("lu_solve: singular matrix");
            piv[k] = p;
            if (p != k)
            {
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(a(k, j), a(p, j));
                for (std::size_t j = 0; j < m; ++j)
                    std::swap(b(k, j), b(p, j));
            }
            logdet += std::log(best);
            const cplx inv = 1.0 / a(k, k);
            for (std::size_t i = k + 1; i < n; ++i)
            {
                const cplx f = a(i, k) * inv;
                a(i, k) = f;
                for (std::size_t j = k + 1; j < n; ++j)
                    a(i, j) -= f * a(k, j);
                for (std::size_t j = 0; j < m; ++j)
                    b(i, j) -= f * b(k, j);
            }
        }
        // Back substitution
        for (std::size_t jj = 0; jj < m; ++jj)
            for (std::size_t ii = n; ii-- > 0;)
            {
                cplx s = b(ii, jj);
                for (std::size_t l = ii + 1; l < n; ++l)
                    s -= a(ii, l) * b(l, jj);
                b(ii, jj) = s / a(ii, ii);
            }
        return logdet;
    }

    ComplexMatrix inverse(const ComplexMatrix &a)
    {
        if (!a.square())
            throw std::invalid_argument("inverse: matrix is not square");
        ComplexMatrix lu = a, x = ComplexMatrix::identity(a.rows());
        std::vector<std::size_t> piv;
        lu_solve_inplace(lu, x, piv);
        return x;
    }

    // ---- HermitianMatrix

    HermitianMatrix::HermitianMatrix(const ComplexMatrix &m)
    {
        if (!m.square())
            throw std::invalid_argument("HermitianMatrix: matrix is not square (" + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + ")");
        if (!m.all_finite())
            throw std::invalid_argument("HermitianMatrix: non-finite entry");
        const double tol = structure_tol * std::max(1.0, m.max_abs());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j)
                if (std::abs(m(i, j) - std::conj(m(j, i))) > tol)
                    throw std::invalid_argument("HermitianMatrix: input is not Hermitian");
        *this = symmetrized(m);
    }

    HermitianMatrix::HermitianMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
        : HermitianMatrix(ComplexMatrix(rows))
    {
    }

    HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix &m)
    {
        if (!m.square())
            throw std::invalid_argument("HermitianMatrix: matrix is not square");
        HermitianMatrix h;
        h.a = ComplexMatrix(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
        {
            h.a(i, i) = m(i, i).real();
            for (std::size_t j = i + 1; j < m.cols(); ++j)
            {
                const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                h.a(i, j) = v;
                h.a(j, i) = std::conj(v);
            }
        }
        return h;
    }

    HermitianMatrix HermitianMatrix::identity(std::size_t n) { return symmetrized(ComplexMatrix::identity(n)); }
    HermitianMatrix HermitianMatrix::diagonal(const RealVector &d) { return symmetrized(ComplexMatrix::diagonal(d)); }

    // ---- UpperTriangular

    UpperTriangular::UpperTriangular(const ComplexMatrix &m)
    {
        if (!m.square())
            throw std::invalid_argument("UpperTriangular: matrix is not square");
        if (!m.all_finite())
            throw std::invalid_argument("UpperTriangular: non-finite entry");
        const double tol = structure_tol * std::max(1.0, m.max_abs());
        t = m;
        for (std::size_t i = 0; i < t.rows(); ++i)
        {
            for (std::size_t j = 0; j < i; ++j)
            {
                if (std::abs(t(i, j)) > tol)
                    throw std::invalid_argument("UpperTriangular: non-zero entry below the diagonal");
                t(i, j) = 0.0;
            }
            if (std::abs(t(i, i).imag()) > tol || t(i, i).real() < -tol)
                throw std::invalid_argument("UpperTriangular: diagonal must be real and non-negative");
            t(i, i) = std::max(0.0, t(i, i).real());
        }
    }

    // ---- Eigen / SVD / Cholesky

    EigResult herm_eig(const HermitianMatrix &h)
    {
        const std::size_t n = h.size();
        ComplexMatrix a = h.matrix();
        ComplexMatrix v = ComplexMatrix::identity(n);

        const double total = a.frobenius();
        const int max_sweeps = 100;
        bool converged = (n < 2) || total == 0.0;
        for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep)
        {
            double off = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                    off += std::norm(a(p, q));
            if (std::sqrt(off) <= 1e-15 * total)
            {
                converged = true;
                break;
            }
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                {
                    const cplx apq = a(p, q);
                    const double mag = std::abs(apq);
                    if (mag == 0.0)
                        continue;
                    const double app = a(p, p).real(), aqq = a(q, q).real();

                    // Phase rotation makes the pair real symmetric, then a real Jacobi rotation zeroes it
                    const double theta = (aqq - app) / (2.0 * mag);
                    double tn;
                    if (std::abs(theta) > 1e150)
                        tn = 0.5 / theta;
                    else
                        tn = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(tn * tn + 1.0), s = tn * c;
                    const cplx ph = std::conj(apq / mag);
                    const cplx jpp = c, jpq = s, jqp = -s * ph, jqq = c * ph;

                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const cplx akp = a(k, p), akq = a(k, q);
                        a(k, p) = akp * jpp + akq * jqp;
                        a(k, q) = akp * jpq + akq * jqq;
                    }
                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const cplx apk = a(p, k), aqk = a(q, k);
                        a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                        a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    a(p, p) = app - tn * mag;
                    a(q, q) = aqq + tn * mag;

                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const cplx vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = vkp * jpp + vkq * jqp;
                        v(k, q) = vkp * jpq + vkq * jqq;
                    }
                }
        }
        if (!converged)
        {
            double off = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                    off += std::norm(a(p, q));
            if (std::sqrt(off) > 1e-12 * total)
                throw numerical_error("herm_eig: Jacobi sweeps did not converge");
        }

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j)
                         { return a(i, i).real() > a(j, j).real(); });

        EigResult r;
        r.values.resize(n);
        r.vectors = ComplexMatrix(n, n);
        for (std::size_t k = 0; k < n; ++k)
        {
            r.values[k] = a(order[k], order[k]).real();
            for (std::size_t i = 0; i < n; ++i)
                r.vectors(i, k) = v(i, order[k]);
        }
        return r;
    }

    SvdResult svd(const ComplexMatrix &h)
    {
        if (!h.all_finite())
            throw std::invalid_argument("svd: non-finite entry");
        const std::size_t r = h.rows(), t = h.cols(), k = std::min(r, t);
        ComplexMatrix g;
        adjoint_multiply_into(g, h, h);
        const EigResult e = herm_eig(HermitianMatrix::symmetrized(g));

        // Columns H w_i; their norms are the singular values
        ComplexMatrix hw = h * e.vectors;
        std::vector<double> sig(t);
        for (std::size_t j = 0; j < t; ++j)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < r; ++i)
                s += std::norm(hw(i, j));
            sig[j] = std::sqrt(s);
        }
        std::vector<std::size_t> order(t);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return sig[a] > sig[b]; });

        SvdResult out;
        out.U = ComplexMatrix(r, k);
        out.V = ComplexMatrix(k, t);
        out.singular.assign(k, 0.0);
        const double smax = t ? sig[order[0]] : 0.0;
        const double cut = 1e-12 * smax;

        std::vector<cplx> col(r);
        for (std::size_t c = 0; c < k; ++c)
        {
            const std::size_t j = order[c];
            for (std::size_t l = 0; l < t; ++l)
                out.V(c, l) = std::conj(e.vectors(l, j));
            out.singular[c] = sig[j];

            bool have = false;
            if (sig[j] > cut && sig[j] > 0.0)
            {
                for (std::size_t i = 0; i < r; ++i)
                    col[i] = hw(i, j) / sig[j];
                have = true;
            }
            // Orthogonalize against previous columns; fall back to a unit vector completion
            for (std::size_t attempt = 0; attempt <= r; ++attempt)
            {
                if (!have)
                {
                    std::fill(col.begin(), col.end(), cplx(0.0));
                    col[(c + attempt) % r] = 1.0;
                }
                for (int pass = 0; pass < 2; ++pass)
                    for (std::size_t p = 0; p < c; ++p)
                    {
                        cplx d = 0.0;
                        for (std::size_t i = 0; i < r; ++i)
                            d += std::conj(out.U(i, p)) * col[i];
                        for (std::size_t i = 0; i < r; ++i)
                            col[i] -= d * out.U(i, p);
                    }
                double nrm = 0.0;
                for (const auto &x : col)
                    nrm += std::norm(x);
                nrm = std::sqrt(nrm);
                if (nrm > 0.5 || (have && nrm > 1e-8))
                {
                    for (std::size_t i = 0; i < r; ++i)
                        out.U(i, c) = col[i] / nrm;
                    break;
                }
                have = false;
            }
        }
        return out;
    }

    UpperTriangular chol_upper(const HermitianMatrix &h)
    {
        const std::size_t n = h.size();
        const EigResult e = herm_eig(h);
        double spread = 0.0;
        for (double l : e.values)
            spread = std::max(spread, std::abs(l));
        const double lmin = n ? e.values.back() : 0.0;
        if (lmin < -1e-12 * spread)
            throw std::domain_error("chol_upper: matrix is not positive semidefinite (min eigenvalue " +
                                    std::to_string(lmin) + ")");

        ComplexMatrix a = h.matrix();
        if (lmin < 0.0)
        {
            RealVector clamped = e.values;
            for (auto &l : clamped)
                l = std::max(l, 0.0);
            a = HermitianMatrix::symmetrized(e.vectors * ComplexMatrix::diagonal(clamped) * e.vectors.adjoint()).matrix();
        }

        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            scale = std::max(scale, a(i, i).real());
        const double pivot_tol = 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

        ComplexMatrix t(n, n);
        for (std::size_t i = 0; i < n; ++i)
        {
            double d = a(i, i).real();
            for (std::size_t k = 0; k < i; ++k)
                d -= std::norm(t(k, i));
            if (d <= pivot_tol)
                continue; // zero row for the semidefinite direction
            const double tii = std::sqrt(d);
            t(i, i) = tii;
            for (std::size_t j = i + 1; j < n; ++j)
            {
                cplx s = a(i, j);
                for (std::size_t k = 0; k < i; ++k)
                    s -= std::conj(t(k, i)) * t(k, j);
                t(i, j) = s / tii;
            }
        }
        return UpperTriangular(t);
    }

    HermitianMatrix ut_gram(const UpperTriangular &t)
    {
        ComplexMatrix g;
        adjoint_multiply_into(g, t.matrix(), t.matrix());
        return HermitianMatrix::symmetrized(g);
    }

    HermitianMatrix psd_sqrt(const HermitianMatrix &a)
    {
        const EigResult e = herm_eig(a);
        RealVector s(e.values.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::sqrt(std::max(e.values[i], 0.0));
        return HermitianMatrix::symmetrized(e.vectors * ComplexMatrix::diagonal(s) * e.vectors.adjoint());
    }

    double log_det_plus(const HermitianMatrix &s, const HermitianMatrix &q)
    {
        if (s.size() != q.size())
            throw std::invalid_argument("log_det_plus: S is " + std::to_string(s.size()) + "x" +
                                        std::to_string(s.size()) + " but Q is " + std::to_string(q.size()) + "x" +
                                        std::to_string(q.size()));
        const HermitianMatrix qh = psd_sqrt(q);
        const HermitianMatrix k = HermitianMatrix::symmetrized(qh.matrix() * s.matrix() * qh.matrix());
        const EigResult e = herm_eig(k);
        double r = 0.0;
        for (double l : e.values)
            r += std::log1p(std::max(l, 0.0));
        return r;
    }

    HermitianMatrix null_projector(const HermitianMatrix &a, double tol)
    {
        const std::size_t n = a.size();
        const EigResult e = herm_eig(a);
        const double lmax = n ? std::max(e.values.front(), 0.0) : 0.0;
        ComplexMatrix p(n, n);
        for (std::size_t k = 0; k < n; ++k)
        {
            if (e.values[k] > tol * lmax && lmax > 0.0)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    p(i, j) += e.vectors(i, k) * std::conj(e.vectors(j, k));
        }
        return HermitianMatrix::symmetrized(p);
    }
}
