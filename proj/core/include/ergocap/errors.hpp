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

#include <stdexcept>
#include <string>

namespace ergocap
{
    // Shape errors and malformed input use std::invalid_argument.
    // Out-of-domain numeric input (negative SNR, non-PSD matrix) uses std::domain_error.

    // The problem is well posed but has no solution, e.g. a power budget that a peak cap cannot reach
    class infeasible_error : public std::domain_error
    {
    public:
        explicit infeasible_error(const std::string &what) : std::domain_error(what) {}
    };

    // An iterative method failed to converge or produced non-finite values
    class numerical_error : public std::runtime_error
    {
    public:
        explicit numerical_error(const std::string &what) : std::runtime_error(what) {}
    };
}
