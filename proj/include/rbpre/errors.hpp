/*
   Copyright 2026 The reduced_bpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace rbpre {

// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature did not reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A rejection sampler or estimator ran out of budget before collecting
// enough accepted draws.
class InsufficientSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// e^{X_i} not representable; the trial is discarded and counted.
class EnvironmentOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A population count exceeded the configured cap; the trial is discarded
// and counted.
class PopulationOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive enumeration would exceed its state budget.
class StateSpaceTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace rbpre
