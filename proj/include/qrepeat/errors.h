// Copyright 2026 The qrepeat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREPEAT_ERRORS_H
#define QREPEAT_ERRORS_H

#include <stdexcept>
#include <string>

namespace qrepeat {

/// Invalid run configuration (empty registry, unknown key, bad chain size).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An operation would push a slot past the registry's photon-number truncation.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unknown labels, label collisions, or states living on different registries.
struct RegistryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition did not hold.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Photons of different frequency tags were sent into one interferometric element.
struct FrequencyMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A dichroic element met a frequency tag it has no output for.
struct RoutingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Link pairs do not share the stations an operation needs.
struct TopologyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Probability-like parameter outside [0, 1].
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace qrepeat

#endif
