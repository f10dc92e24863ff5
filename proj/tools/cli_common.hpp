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

#include "ergocap/covopt.hpp"
#include "ergocap/random.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ergocap::cli
{
    struct Settings
    {
        std::string channel;
        std::string snr_db;     // a:b:step or a single value
        std::string snr;        // comma-separated linear values
        std::optional<std::size_t> samples;
        std::uint64_t seed = default_seed;
        std::optional<double> tol;
        std::optional<std::size_t> max_iter;
        std::string out;
        std::string format = "csv";
        std::string unit = "nats";
        std::string options; // optimizer options JSON, path or inline
        std::string trace;   // iteration trace CSV path
        std::string kappa;   // a:b:step
        std::string rho;     // a:b:step
        double tau = 0.5;
        std::string method;
        std::optional<double> gamma_max;
        std::size_t size = 5;
        unsigned workers = 0;
    };

    // Numeric table; CSV with a header row, or JSON as an array of objects
    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
    };

    std::vector<double> parse_range(const std::string &text); // a:b:step (inclusive) or a
    std::vector<double> gammas_linear(const Settings &s, const std::vector<double> &default_db);
    double unit_scale(const Settings &s); // nats -> requested unit
    std::string unit_suffix(const Settings &s);
    CovOptOptions optimizer_options(const Settings &s);
    SeededStream base_stream(const Settings &s);

    void emit_table(const Table &t, const Settings &s, std::ostream &out);
    void emit_json(const nlohmann::json &j, const Settings &s, std::ostream &out);

    // Throws std::invalid_argument for an unknown id
    void run_figure(const std::string &id, const Settings &s, std::ostream &out, std::ostream &err);
}
