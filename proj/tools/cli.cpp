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

#include "cli.hpp"
#include "cli_common.hpp"

#include "ergocap/analysis.hpp"
#include "ergocap/descriptor.hpp"
#include "ergocap/errors.hpp"
#include "ergocap/format.hpp"
#include "ergocap/special.hpp"
#include "ergocap/waterfill.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ergocap::cli
{
    namespace
    {
        double parse_number(const std::string &text)
        {
            double v = 0.0;
            const char *b = text.data(), *e = text.data() + text.size();
            const auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc() || res.ptr != e)
                throw std::invalid_argument("not a number: '" + text + "'");
            return v;
        }

        // Writes to --out when given, otherwise to the stream
        template <class F>
        void with_output(const Settings &s, std::ostream &out, F &&write)
        {
            if (s.out.empty())
            {
                write(out);
                return;
            }
            std::ofstream f(s.out);
            if (!f)
                throw std::invalid_argument("cannot write '" + s.out + "'");
            write(f);
        }

        void require_channel(const Settings &s)
        {
            if (s.channel.empty())
                throw std::invalid_argument("--channel is required");
        }

        // ---- waterfill

        void cmd_waterfill(const Settings &s, std::ostream &out)
        {
            require_channel(s);
            const DensitySource src = density_from_json(load_json(s.channel), s.samples.value_or(final_samples),
                                                        base_stream(s).child(0));
            const double k = unit_scale(s);
            const std::string u = unit_suffix(s);
            Table t;
            t.header = {"gamma", "gamma_db", "xi", "capacity_" + u, "equal_power_" + u, "papr_exact", "papr_bound"};
            if (s.gamma_max)
            {
                t.header.push_back("peak_xi");
                t.header.push_back("peak_capacity_" + u);
            }
            for (double g : gammas_linear(s, {0.0}))
            {
                const double xi = st_water_level(src.density, g, src.modes);
                std::vector<double> row{g,
                                        linear_to_db(g),
                                        xi,
                                        k * st_capacity_at(src.density, xi, src.modes),
                                        k * equal_power_rate(src.density, g, src.modes),
                                        papr_exact(xi, g, src.modes),
                                        papr_bound(src.density, g, src.modes)};
                if (s.gamma_max)
                {
                    const PeakLimitedRate p = peak_limited_rate(src.density, g, *s.gamma_max, src.modes);
                    row.push_back(p.xi);
                    row.push_back(k * p.rate);
                }
                t.rows.push_back(std::move(row));
            }
            with_output(s, out, [&](std::ostream &os)
                        { emit_table(t, s, os); });
        }

        // ---- optimize

        nlohmann::json result_json(double g, const CovOptResult &r, const Settings &s, const std::string &method)
        {
            const double k = unit_scale(s);
            const EigResult e = herm_eig(r.q);
            nlohmann::json trace = nlohmann::json::array();
            for (const auto &row : r.trace)
                trace.push_back({{"iter", row.iter}, {"mi", k * row.mi}, {"residual", row.residual}});
            return {{"gamma", g},
                    {"gamma_db", linear_to_db(g)},
                    {"method", method},
                    {"unit", s.unit},
                    {"q", matrix_to_json(r.q.matrix())},
                    {"factor", matrix_to_json(r.factor.matrix())},
                    {"eigenvalues", e.values},
                    {"eigenvectors", matrix_to_json(e.vectors)},
                    {"mi", k * r.mi.mean},
                    {"mi_se", k * r.mi.se},
                    {"kkt_residual", r.kkt_residual},
                    {"kkt_noise", r.kkt_noise},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"stop_reason", r.stop_reason},
                    {"trace", trace}};
        }

        void cmd_interp(const Settings &s, const ChannelLaw &law, std::ostream &out)
        {
            const auto *il = std::get_if<InterpolatedLaw>(&law.variant());
            if (!il)
                throw std::invalid_argument("--kappa needs an 'interp' channel");
            const std::vector<double> g = gammas_linear(s, {0.0});
            if (g.size() != 1)
                throw std::invalid_argument("--kappa sweeps take a single SNR");
            const auto pts = interp_study(il->m0, il->cov, parse_range(s.kappa), g.front(), optimizer_options(s));
            const double k = unit_scale(s);
            Table t;
            t.header = {"kappa", "q_angle", "gram_angle", "q1", "q2", "mi_" + unit_suffix(s), "mi_se", "converged"};
            for (const auto &p : pts)
                t.rows.push_back({p.kappa, p.angle, p.gram_angle, p.powers[0], p.powers.size() > 1 ? p.powers[1] : 0.0,
                                  k * p.mi.mean, k * p.mi.se, p.converged ? 1.0 : 0.0});
            with_output(s, out, [&](std::ostream &os)
                        { emit_table(t, s, os); });
        }

        void cmd_optimize(const Settings &s, std::ostream &out, std::ostream &err)
        {
            require_channel(s);
            const ChannelLaw law = law_from_json(load_json(s.channel));
            if (!s.kappa.empty())
                return cmd_interp(s, law, out);
            const std::string method = s.method.empty() ? "general" : s.method;
            if (method != "general" && method != "diag")
                throw std::invalid_argument("--method must be 'general' or 'diag' for optimize");
            const CovOptOptions opts = optimizer_options(s);
            const ComplexMatrix basis = method == "diag" ? herm_eig(expected_gram(law)).vectors : ComplexMatrix();

            nlohmann::json all = nlohmann::json::array();
            Table t;
            const double k = unit_scale(s);
            t.header = {"gamma", "gamma_db", "mi_" + unit_suffix(s), "mi_se", "kkt_residual", "iterations", "converged"};
            for (std::size_t i = 0; i < law.cols(); ++i)
                t.header.push_back("eig_" + std::to_string(i + 1));
            std::ostringstream trace;
            trace << "gamma,iter,mi,residual,damping\n";
            for (double g : gammas_linear(s, {0.0}))
            {
                const CovOptResult r = method == "diag" ? fixed_point_diag(law, g, basis, opts) : iterate_general(law, g, opts);
                if (!r.converged)
                    err << "warning: optimizer stopped without converging at gamma = " << format_double(g) << " ("
                        << r.stop_reason << ", residual " << format_double(r.kkt_residual) << ")\n";
                all.push_back(result_json(g, r, s, method));
                std::vector<double> row{g, linear_to_db(g), k * r.mi.mean, k * r.mi.se, r.kkt_residual,
                                        static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0};
                for (double v : herm_eig(r.q).values)
                    row.push_back(v);
                t.rows.push_back(std::move(row));
                for (const auto &tr : r.trace)
                    trace << format_double(g) << ',' << tr.iter << ',' << format_double(k * tr.mi) << ','
                          << format_double(tr.residual) << ',' << format_double(tr.damping) << '\n';
            }
            if (!s.trace.empty())
            {
                std::ofstream f(s.trace);
                if (!f)
                    throw std::invalid_argument("cannot write '" + s.trace + "'");
                f << trace.str();
            }
            with_output(s, out, [&](std::ostream &os)
                        {
                if (s.format == "json")
                    emit_json(all.size() == 1 ? all.front() : all, s, os);
                else
                    emit_table(t, s, os); });
        }

        // ---- beamform

        void cmd_beamform(const Settings &s, std::ostream &out)
        {
            if (!s.rho.empty())
            {
                Table t;
                t.header = {"gamma_db", "rho", "tau"};
                for (double g : gammas_linear(s, {-15.0}))
                    for (const auto &p : beamform_boundary(g, parse_range(s.rho)))
                        t.rows.push_back({linear_to_db(g), p.rho, p.tau});
                with_output(s, out, [&](std::ostream &os)
                            { emit_table(t, s, os); });
                return;
            }
            require_channel(s);
            const ChannelLaw law = law_from_json(load_json(s.channel));
            const auto *kl = std::get_if<KroneckerLaw>(&law.variant());
            if (!kl || kl->mean.max_abs() != 0.0)
                throw std::invalid_argument("beamform needs a zero-mean 'kronecker' channel");
            const std::string method = s.method.empty() ? "both" : s.method;
            if (method != "both" && method != "mc" && method != "closed")
                throw std::invalid_argument("--method must be 'mc', 'closed' or 'both' for beamform");
            const RealVector rho = herm_eig(kl->rx).values;
            const RealVector tau = herm_eig(kl->tx).values;
            if (tau.size() < 2)
                throw std::invalid_argument("beamform needs at least two transmit antennas");
            nlohmann::json all = nlohmann::json::array();
            for (double g : gammas_linear(s, {0.0}))
            {
                std::vector<BeamformVerdict> vs;
                if (method != "closed")
                    vs.push_back(beamform_opt_mc(kl->rx, kl->tx, g, s.samples.value_or(final_samples),
                                                 base_stream(s).child(0), s.workers));
                if (method != "mc")
                    vs.push_back(beamform_opt_closed(rho, tau[0], tau[1], g));
                for (const auto &v : vs)
                    all.push_back({{"gamma", g},
                                   {"gamma_db", linear_to_db(g)},
                                   {"optimal", v.optimal},
                                   {"margin", v.margin},
                                   {"se", v.se},
                                   {"method", to_string(v.method)}});
            }
            with_output(s, out, [&](std::ostream &os)
                        { emit_json(all.size() == 1 ? all.front() : all, s, os); });
        }
    }

    // ---- shared helpers

    std::vector<double> parse_range(const std::string &text)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(item);
        if (parts.size() == 1)
            return {parse_number(parts[0])};
        if (parts.size() != 3)
            throw std::invalid_argument("range must be 'a:b:step' or a single value, got '" + text + "'");
        const double a = parse_number(parts[0]), b = parse_number(parts[1]), step = parse_number(parts[2]);
        if (!(step > 0.0) || !(b >= a))
            throw std::invalid_argument("range needs b >= a and step > 0, got '" + text + "'");
        std::vector<double> v;
        const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
            v.push_back(a + static_cast<double>(i) * step);
        return v;
    }

    std::vector<double> gammas_linear(const Settings &s, const std::vector<double> &default_db)
    {
        if (!s.snr.empty() && !s.snr_db.empty())
            throw std::invalid_argument("give either --snr or --snr-db, not both");
        std::vector<double> g;
        if (!s.snr.empty())
        {
            std::stringstream ss(s.snr);
            std::string item;
            while (std::getline(ss, item, ','))
                g.push_back(parse_number(item));
        }
        else
            for (double db : s.snr_db.empty() ? default_db : parse_range(s.snr_db))
                g.push_back(db_to_linear(db));
        for (double v : g)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("SNR must be positive, got " + format_double(v));
        return g;
    }

    double unit_scale(const Settings &s)
    {
        return s.unit == "bits" ? 1.0 / std::numbers::ln2 : 1.0;
    }

    std::string unit_suffix(const Settings &s)
    {
        return s.unit;
    }

    CovOptOptions optimizer_options(const Settings &s)
    {
        CovOptOptions o = s.options.empty() ? CovOptOptions{} : CovOptOptions::from_json(load_json(s.options));
        if (s.options.empty() || s.seed != default_seed)
            o.seed = s.seed;
        if (s.tol)
            o.tol = *s.tol;
        if (s.max_iter)
            o.max_iter = *s.max_iter;
        if (s.samples)
            o.samples = *s.samples;
        if (s.workers)
            o.workers = s.workers;
        o.validate();
        return o;
    }

    SeededStream base_stream(const Settings &s)
    {
        return SeededStream{s.seed, 0};
    }

    void emit_table(const Table &t, const Settings &s, std::ostream &out)
    {
        if (s.format == "json")
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &row : t.rows)
            {
                nlohmann::json o = nlohmann::json::object();
                for (std::size_t c = 0; c < t.header.size(); ++c)
                    o[t.header[c]] = row[c];
                arr.push_back(std::move(o));
            }
            emit_json(arr, s, out);
            return;
        }
        for (std::size_t c = 0; c < t.header.size(); ++c)
            out << (c ? "," : "") << t.header[c];
        out << '\n';
        for (const auto &row : t.rows)
        {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << format_double(row[c]);
            out << '\n';
        }
    }

    void emit_json(const nlohmann::json &j, const Settings &, std::ostream &out)
    {
        out << j.dump(2) << '\n';
    }

    // ---- entry point

    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"ergocap: capacity and optimal transmit covariance of ergodic MIMO channels"};
        app.require_subcommand(1);
        Settings s;
        std::string figure;
        std::size_t samples = 0, max_iter = 0;
        double tol = 0.0, gamma_max = 0.0;

        auto common = [&](CLI::App *sub)
        {
            sub->add_option("--channel", s.channel, "Channel descriptor: JSON file path or inline JSON");
            sub->add_option("--snr-db", s.snr_db, "SNR grid in dB, a:b:step or a single value");
            sub->add_option("--snr", s.snr, "Linear SNR values, comma separated");
            sub->add_option("--samples", samples, "Monte Carlo samples");
            sub->add_option("--seed", s.seed, "Random seed");
            sub->add_option("--tol", tol, "Optimizer KKT tolerance");
            sub->add_option("--max-iter", max_iter, "Optimizer iteration cap");
            sub->add_option("--out", s.out, "Output path (default stdout)");
            sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
            sub->add_option("--unit", s.unit, "nats or bits")->check(CLI::IsMember({"nats", "bits"}));
            sub->add_option("--workers", s.workers, "Worker threads (0 = hardware concurrency)");
        };
        CLI::App *wf = app.add_subcommand("waterfill", "Space-time water-filling over an eigenvalue density");
        common(wf);
        wf->add_option("--gamma-max", gamma_max, "Per-mode peak power cap");
        CLI::App *op = app.add_subcommand("optimize", "Optimal transmit covariance under statistical side information");
        common(op);
        op->add_option("--options", s.options, "Optimizer options JSON, path or inline");
        op->add_option("--trace", s.trace, "Write the iteration trace CSV here");
        op->add_option("--method", s.method, "general or diag");
        op->add_option("--kappa", s.kappa, "Interpolation sweep a:b:step for an interp channel");
        CLI::App *bf = app.add_subcommand("beamform", "Beamforming optimality test or 2x2 boundary");
        common(bf);
        bf->add_option("--method", s.method, "mc, closed or both");
        bf->add_option("--rho", s.rho, "Boundary mode: receive eigenvalue grid a:b:step inside (0, 2)");
        CLI::App *fg = app.add_subcommand("figures", "Data behind the figures fig1 .. fig12");
        common(fg);
        fg->add_option("id", figure, "Figure id, fig1 .. fig12")->required();
        fg->add_option("--options", s.options, "Optimizer options JSON, path or inline");
        fg->add_option("--tau", s.tau, "Transmit correlation for fig7 and fig10");
        fg->add_option("--kappa", s.kappa, "Interpolation grid for fig11 and fig12");
        fg->add_option("--rho", s.rho, "Receive eigenvalue grid for fig8");
        fg->add_option("--size", s.size, "Matrix size for fig10");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? ok : usage;
        }
        if (samples)
            s.samples = samples;
        if (max_iter)
            s.max_iter = max_iter;
        if (tol > 0.0)
            s.tol = tol;
        if (wf->parsed() && wf->count("--gamma-max"))
            s.gamma_max = gamma_max;

        try
        {
            if (wf->parsed())
                cmd_waterfill(s, out);
            else if (op->parsed())
                cmd_optimize(s, out, err);
            else if (bf->parsed())
                cmd_beamform(s, out);
            else
                run_figure(figure, s, out, err);
            return ok;
        }
        catch (const infeasible_error &e)
        {
            err << "infeasible: " << e.what() << '\n';
            return infeasible;
        }
        catch (const numerical_error &e)
        {
            err << "numerical error: " << e.what() << '\n';
            return numerical;
        }
        catch (const nlohmann::json::exception &e)
        {
            err << "invalid JSON: " << e.what() << '\n';
            return usage;
        }
        catch (const std::invalid_argument &e)
        {
            err << "error: " << e.what() << '\n';
            return usage;
        }
        catch (const std::domain_error &e)
        {
            err << "error: " << e.what() << '\n';
            return usage;
        }
    }
}
