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

#include "ergocap/descriptor.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergocap
{
    namespace
    {
        using nlohmann::json;

        const json &field(const json &j, const char *key)
        {
            if (!j.contains(key))
                throw std::invalid_argument(std::string("channel descriptor: missing field '") + key + "'");
            return j.at(key);
        }

        std::size_t count_field(const json &j, const char *key)
        {
            const json &v = field(j, key);
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                throw std::invalid_argument(std::string("channel descriptor: '") + key + "' must be a non-negative integer");
            return v.get<std::size_t>();
        }

        cplx entry_from_json(const json &e)
        {
            if (e.is_number())
                return {e.get<double>(), 0.0};
            if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                return {e[0].get<double>(), e[1].get<double>()};
            throw std::invalid_argument("matrix entry must be a number or a [re, im] pair, got " + e.dump());
        }

        RealVector reals(const json &j, const char *key)
        {
            RealVector v;
            for (const auto &e : field(j, key))
                v.push_back(e.get<double>());
            return v;
        }

        HermitianMatrix herm_field(const json &j, const char *key)
        {
            return HermitianMatrix(matrix_from_json(field(j, key)));
        }
    }

    ComplexMatrix matrix_from_json(const json &j)
    {
        if (j.is_object())
        {
            if (!j.contains("diag") || j.size() != 1)
                throw std::invalid_argument("matrix object must have the single key 'diag'");
            const json &d = j.at("diag");
            if (!d.is_array() || d.empty())
                throw std::invalid_argument("'diag' must be a non-empty array");
            ComplexMatrix m(d.size(), d.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                m(i, i) = entry_from_json(d[i]);
            return m;
        }
        if (!j.is_array() || j.empty())
            throw std::invalid_argument("matrix must be a non-empty array of rows");
        const std::size_t rows = j.size();
        if (!j[0].is_array() || j[0].empty())
            throw std::invalid_argument("matrix rows must be non-empty arrays");
        const std::size_t cols = j[0].size();
        std::vector<cplx> data;
        data.reserve(rows * cols);
        for (const auto &row : j)
        {
            if (!row.is_array() || row.size() != cols)
                throw std::invalid_argument("matrix rows must all have " + std::to_string(cols) + " entries");
            for (const auto &e : row)
                data.push_back(entry_from_json(e));
        }
        return ComplexMatrix(rows, cols, std::move(data));
    }

    json matrix_to_json(const ComplexMatrix &m)
    {
        json out = json::array();
        for (std::size_t i = 0; i < m.rows(); ++i)
        {
            json row = json::array();
            for (std::size_t j = 0; j < m.cols(); ++j)
                row.push_back({m(i, j).real(), m(i, j).imag()});
            out.push_back(std::move(row));
        }
        return out;
    }

    ChannelLaw law_from_json(const json &j)
    {
        if (!j.is_object())
            throw std::invalid_argument("channel descriptor must be a JSON object");
        const std::string type = field(j, "type").get<std::string>();
        if (type == "point")
            return ChannelLaw::point_mass(matrix_from_json(field(j, "h")));
        if (type == "gaussian")
            return ChannelLaw::matrix_gaussian(matrix_from_json(field(j, "mean")), herm_field(j, "cov"));
        if (type == "kronecker")
        {
            std::size_t r = 0, t = 0;
            std::optional<ComplexMatrix> mean;
            if (j.contains("mean"))
            {
                mean = matrix_from_json(j.at("mean"));
                r = mean->rows();
                t = mean->cols();
            }
            else if (j.contains("r") && j.contains("t"))
            {
                r = count_field(j, "r");
                t = count_field(j, "t");
            }
            else if (j.contains("rx") && j.contains("tx"))
            {
                r = matrix_from_json(j.at("rx")).rows();
                t = matrix_from_json(j.at("tx")).rows();
            }
            else
                throw std::invalid_argument("kronecker descriptor needs 'mean', 'r'/'t', or both 'rx' and 'tx'");
            const HermitianMatrix rx = j.contains("rx") ? herm_field(j, "rx") : HermitianMatrix::identity(r);
            const HermitianMatrix tx = j.contains("tx") ? herm_field(j, "tx") : HermitianMatrix::identity(t);
            const bool normalize = j.value("normalize", false);
            return ChannelLaw::kronecker(mean ? *mean : ComplexMatrix(r, t), rx, tx, normalize);
        }
        if (type == "rayleigh")
            return ChannelLaw::rayleigh(count_field(j, "r"), count_field(j, "t"));
        if (type == "interp")
            return ChannelLaw::interpolated(field(j, "kappa").get<double>(), matrix_from_json(field(j, "m0")),
                                            herm_field(j, "cov"));
        if (type == "mixture")
        {
            std::vector<ComplexMatrix> atoms;
            for (const auto &a : field(j, "atoms"))
                atoms.push_back(matrix_from_json(a));
            return ChannelLaw::mixture(reals(j, "weights"), atoms);
        }
        if (type == "onoff")
            return onoff_law(count_field(j, "m"), field(j, "p").get<double>());
        throw std::invalid_argument("unknown channel type '" + type + "'");
    }

    DensitySource density_from_json(const json &j, std::size_t pool, const SeededStream &stream)
    {
        if (!j.is_object())
            throw std::invalid_argument("channel descriptor must be a JSON object");
        const std::string type = field(j, "type").get<std::string>();
        if (type == "wishart")
        {
            const std::size_t m = count_field(j, "m"), n = count_field(j, "n");
            return {wishart_density(m, n), m, std::nullopt};
        }
        if (type == "masses")
        {
            const std::size_t modes = j.contains("modes") ? count_field(j, "modes") : 1;
            return {EigDensity::point_masses(reals(j, "values"), reals(j, "weights")), modes, std::nullopt};
        }
        if (type == "onoff")
        {
            const std::size_t m = count_field(j, "m");
            const double p = field(j, "p").get<double>();
            return {onoff_density(m, p), m, onoff_law(m, p)};
        }
        ChannelLaw law = law_from_json(j);
        const std::size_t m = std::min(law.rows(), law.cols());
        if (law.is_iid_rayleigh())
            return {wishart_density(m, std::max(law.rows(), law.cols())), m, std::move(law)};
        EigDensity f = empirical_density(law, pool, stream);
        return {std::move(f), m, std::move(law)};
    }

    json load_json(const std::string &src)
    {
        const auto first = std::find_if(src.begin(), src.end(), [](unsigned char c)
                                        { return !std::isspace(c); });
        if (first != src.end() && (*first == '{' || *first == '['))
            return json::parse(src);
        std::ifstream in(src);
        if (!in)
            throw std::invalid_argument("cannot open '" + src + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return json::parse(ss.str());
    }
}
