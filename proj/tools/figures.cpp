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

#include "cli_common.hpp"

#include "ergocap/analysis.hpp"
#include "ergocap/special.hpp"
#include "ergocap/waterfill.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace ergocap::cli
{
    namespace
    {
        std::vector<double> kappa_grid(const Settings &s)
        {
            return s.kappa.empty() ? parse_range("0:1:0.05") : parse_range(s.kappa);
        }

        McConfig mc(const Settings &s, std::uint64_t child)
        {
            return McConfig{s.samples.value_or(final_samples), base_stream(s).child(child), s.workers};
        }

        // SISO Rayleigh: space-time capacity against E ln(1 + gamma lambda)
        Table fig1(const Settings &s)
        {
            const EigDensity f = wishart_density(1, 1);
            const double k = unit_scale(s);
            Table t{{"gamma_db", "capacity_" + unit_suffix(s), "no_csit_" + unit_suffix(s)}, {}};
            for (double g : gammas_linear(s, parse_range("-10:30:1")))
                t.rows.push_back({linear_to_db(g), k * st_capacity(f, g, 1), k * equal_power_rate(f, g, 1)});
            return t;
        }

        Table gains_table(const Settings &s, std::size_t n, bool absolute)
        {
            const double k = unit_scale(s);
            const std::string u = unit_suffix(s);
            Table t;
            if (absolute)
                t.header = {"gamma_db", "space_time_" + u, "space_" + u, "space_se_" + u, "equal_power_" + u};
            else
                t.header = {"gamma_db", "space_time_gain", "space_gain", "space_gain_se"};
            std::uint64_t i = 0;
            for (double g : gammas_linear(s, parse_range("-10:30:2")))
            {
                const RayleighGains r = rayleigh_gains(n, n, g, mc(s, i++));
                if (absolute)
                    t.rows.push_back({linear_to_db(g), k * r.space_time, k * r.space.mean, k * r.space.se, k * r.equal});
                else
                    t.rows.push_back({linear_to_db(g), r.space_time / r.equal, r.space.mean / r.equal, r.space.se / r.equal});
            }
            return t;
        }

        Table fig5(const Settings &s)
        {
            Table t{{"gamma_db", "papr_db_t1", "papr_db_t2", "papr_db_t4"}, {}};
            const EigDensity f1 = wishart_density(1, 1), f2 = wishart_density(2, 2), f4 = wishart_density(4, 4);
            for (double g : gammas_linear(s, parse_range("-10:30:2")))
                t.rows.push_back({linear_to_db(g), linear_to_db(papr_exact(st_water_level(f1, g, 1), g, 1)),
                                  linear_to_db(papr_exact(st_water_level(f2, g, 2), g, 2)),
                                  linear_to_db(papr_exact(st_water_level(f4, g, 4), g, 4))});
            return t;
        }

        // Density of the power on one eigen-mode, t = r = 2
        Table fig6(const Settings &s)
        {
            const EigDensity f = wishart_density(2, 2);
            Table t{{"gamma_db", "xi", "zero_atom", "power", "density"}, {}};
            constexpr int points = 400;
            for (double g : gammas_linear(s, {-10.0, -5.0, 0.0, 5.0, 10.0}))
            {
                const double xi = st_water_level(f, g, 2);
                RealVector grid;
                for (int i = 0; i < points; ++i)
                    grid.push_back(xi * i / points);
                const PowerDensity pd = power_density(f, g, 2, grid);
                for (int i = 0; i < points; ++i)
                    t.rows.push_back({linear_to_db(g), xi, pd.zero_atom, grid[i], pd.pdf[i]});
            }
            return t;
        }

        // Capacity against MI of the central Wishart approximation, rank-one mean diag(t, 0, ...)
        Table fig7(const Settings &s)
        {
            const double k = unit_scale(s);
            const std::string u = unit_suffix(s);
            Table t{{"t", "gamma_db", "capacity_" + u, "capacity_se", "approx_mi_" + u, "approx_mi_se"}, {}};
            const CovOptOptions opts = optimizer_options(s);
            for (std::size_t n : {2u, 3u, 4u})
            {
                ComplexMatrix mean(n, n);
                mean(0, 0) = static_cast<double>(n);
                const HermitianMatrix tc = transmit_correlation(n, s.tau);
                for (double g : gammas_linear(s, parse_range("-10:20:5")))
                {
                    const WishartApproxPoint p = wishart_approx_study(mean, tc, g, opts);
                    t.rows.push_back({static_cast<double>(n), linear_to_db(g), k * p.capacity.mean, k * p.capacity.se,
                                      k * p.approx_mi.mean, k * p.approx_mi.se});
                }
            }
            return t;
        }

        Table fig8(const Settings &s)
        {
            Table t{{"gamma_db", "rho", "tau"}, {}};
            const std::vector<double> rho = s.rho.empty() ? parse_range("0.05:1.95:0.05") : parse_range(s.rho);
            for (double g : gammas_linear(s, {-15.0, -10.0, -5.0, 0.0, 5.0, 10.0}))
                for (const auto &p : beamform_boundary(g, rho))
                    t.rows.push_back({linear_to_db(g), p.rho, p.tau});
            return t;
        }

        // Convergence with S = U diag(2, 1) U^H for random unitaries U
        Table fig9(const Settings &s)
        {
            const double k = unit_scale(s);
            const std::vector<double> g = gammas_linear(s, {0.0});
            Table t{{"run", "iter", "mi_" + unit_suffix(s), "gap_" + unit_suffix(s)}, {}};
            const CovOptOptions opts = optimizer_options(s);
            SampleRng rng(base_stream(s).child(9), 0);
            const double cap = waterfill_det({2.0, 1.0}, g.front()).rate;
            for (int run = 0; run < 5; ++run)
            {
                const ComplexMatrix u = random_unitary(2, rng);
                const ComplexMatrix h = ComplexMatrix::diagonal({std::sqrt(2.0), 1.0}) * u.adjoint();
                const CovOptResult r = iterate_general(ChannelLaw::point_mass(h), g.front(), opts);
                for (const auto &row : r.trace)
                    t.rows.push_back({static_cast<double>(run), static_cast<double>(row.iter), k * row.mi, k * (cap - row.mi)});
            }
            return t;
        }

        // Convergence on n x n channels with rank-one mean mu^H mu and Tc = tau 1 + (1 - tau) I
        Table fig10(const Settings &s)
        {
            const double k = unit_scale(s);
            const std::size_t n = s.size;
            const std::vector<double> g = gammas_linear(s, {0.0});
            Table t{{"run", "iter", "mi_" + unit_suffix(s), "gap_" + unit_suffix(s)}, {}};
            CovOptOptions opts = optimizer_options(s);
            SampleRng rng(base_stream(s).child(10), 0);
            const HermitianMatrix tc = transmit_correlation(n, s.tau);
            for (int run = 0; run < 3; ++run)
            {
                ComplexMatrix mu(1, n);
                for (std::size_t j = 0; j < n; ++j)
                    mu(0, j) = rng.complex_normal();
                const ComplexMatrix mean = mu.adjoint() * mu;
                ComplexMatrix t0(n, n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i; j < n; ++j)
                        t0(i, j) = i == j ? cplx(std::abs(rng.normal()) + 0.1) : rng.complex_normal();
                t0 *= cplx(1.0 / t0.frobenius());
                opts.seed = s.seed + static_cast<std::uint64_t>(run);
                const ChannelLaw law = ChannelLaw::kronecker(mean, HermitianMatrix::identity(n), tc);
                const CovOptResult r = iterate_general(law, g.front(), opts, UpperTriangular(t0));
                double best = 0.0;
                for (const auto &row : r.trace)
                    best = std::max(best, row.mi);
                for (const auto &row : r.trace)
                    t.rows.push_back({static_cast<double>(run), static_cast<double>(row.iter), k * row.mi, k * (best - row.mi)});
            }
            return t;
        }

        std::vector<InterpPoint> interp_points(const Settings &s)
        {
            const ComplexMatrix m0{{0.0, 1.0}, {1.0, 1.0}};
            const HermitianMatrix cov = HermitianMatrix::diagonal({4.0, 1.0});
            const std::vector<double> g = gammas_linear(s, {0.0});
            return interp_study(m0, cov, kappa_grid(s), g.front(), optimizer_options(s));
        }

        Table fig11(const Settings &s)
        {
            const ComplexMatrix m0{{0.0, 1.0}, {1.0, 1.0}};
            const double m0_angle = eigvec_angle(svd(m0).V.adjoint(), 0);
            Table t{{"kappa", "q_angle", "gram_angle", "sigma_angle", "m0_angle"}, {}};
            for (const auto &p : interp_points(s))
                t.rows.push_back({p.kappa, p.angle, p.gram_angle, 0.0, m0_angle});
            return t;
        }

        Table fig12(const Settings &s)
        {
            Table t{{"kappa", "q1", "q2"}, {}};
            for (const auto &p : interp_points(s))
                t.rows.push_back({p.kappa, p.powers[0], p.powers[1]});
            return t;
        }
    }

    void run_figure(const std::string &id, const Settings &s, std::ostream &out, std::ostream &)
    {
        static const std::map<std::string, std::function<Table(const Settings &)>> figures{
            {"fig1", fig1},
            {"fig2", [](const Settings &x)
             { return gains_table(x, 2, true); }},
            {"fig3", [](const Settings &x)
             { return gains_table(x, 2, false); }},
            {"fig4", [](const Settings &x)
             { return gains_table(x, 4, false); }},
            {"fig5", fig5},
            {"fig6", fig6},
            {"fig7", fig7},
            {"fig8", fig8},
            {"fig9", fig9},
            {"fig10", fig10},
            {"fig11", fig11},
            {"fig12", fig12},
        };
        const auto it = figures.find(id);
        if (it == figures.end())
            throw std::invalid_argument("unknown figure '" + id + "', expected fig1 .. fig12");
        const Table t = it->second(s);
        if (s.out.empty())
        {
            emit_table(t, s, out);
            return;
        }
        std::ofstream f(s.out);
        if (!f)
            throw std::invalid_argument("cannot write '" + s.out + "'");
        emit_table(t, s, f);
    }
}
