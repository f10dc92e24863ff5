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

namespace ergocap
{
    // Upper incomplete gamma function of order zero, Gamma(0,x) = E1(x) = int_x^inf e^-t / t dt.
    // Throws std::domain_error for x <= 0.
    double expint_gamma0(double x);

    // e^x * Gamma(0,x), finite for large x where the two factors over/underflow
    double expint_scaled(double x);

    // Convenience 10^(dB/10)
    double db_to_linear(double db);
    double linear_to_db(double v);
}
