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

#ifndef QREPEAT_ELEMENTS_H
#define QREPEAT_ELEMENTS_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrepeat/fock.h"

namespace qrepeat {

/// Linear splitters transmit H and reflect V. Circular splitters transmit
/// R = (H + iV)/sqrt2 and reflect L = (H - iV)/sqrt2. Reflection swaps the
/// two ports with no extra phase, so every splitter is an involution.
enum class SplitterBasis { Linear, Circular };

enum class ResolvedPol { H, V, R, L };

const char *basis_name(SplitterBasis basis);
const char *resolved_name(ResolvedPol pol);

struct DetectorRecord {
    std::string mode;
    bool clicked = false;
    SplitterBasis basis = SplitterBasis::Linear;
    /// Absent when nothing clicked, or when both polarization buckets fired.
    std::optional<ResolvedPol> resolved_pol;
    double efficiency = 1.0;

    bool double_click() const {
        return clicked && !resolved_pol.has_value();
    }
};

struct ChannelParams {
    double gamma = 0.0;  ///< probability a surviving pair is dephased
    double zeta = 1.0;   ///< probability a distributed pair survives transit
};

namespace waveplate {
Eigen::Matrix2cd identity();
Eigen::Matrix2cd x();
Eigen::Matrix2cd z();
/// Maps H -> V and V -> -H; turns Phi+ into Psi- when applied to one half.
Eigen::Matrix2cd xz();
Eigen::Matrix2cd hadamard();
Eigen::Matrix2cd phase_s();
/// Columns are R and L in {H, V} coordinates.
Eigen::Matrix2cd circular_basis();
}  // namespace waveplate

bool is_unitary(const Eigen::MatrixXcd &u, double tolerance = 1e-12);

/// Polarizing beam splitter between two ports. Output ports reuse the input
/// labels: the transmitted polarization stays on its port, the reflected one
/// changes port.
///
/// Throws FrequencyMismatch when the ports carry different frequency tags and
/// either port holds photons.
FockState apply_pbs(const FockState &state, std::string_view port_a, std::string_view port_b, SplitterBasis basis);

/// Non-polarizing beam splitter: a -> sqrt(t) a + i sqrt(1-t) b, symmetric in b.
FockState apply_beam_splitter(
    const FockState &state, std::string_view port_a, std::string_view port_b, double transmissivity = 0.5);

/// Polarization unitary on one mode, acting on H/V creation operators.
FockState apply_local_unitary(const FockState &state, std::string_view mode, const Eigen::Matrix2cd &u);

/// Routes every mode of spatial group `in_group` to the output whose frequency
/// tag it carries. Outputs must start empty.
FockState dichroic_split(
    const FockState &state, std::string_view in_group, std::string_view out_low, std::string_view out_high);

struct DetectionBranch {
    DetectorRecord record;
    double probability;
    /// Conditioned state with the detected mode emptied. Different absorbed
    /// photon numbers leave orthogonal detector records, hence a mixture.
    MixedState post;
};

/// Two bucket detectors behind a splitter in `basis`. A bucket seeing n photons
/// clicks with probability 1 - (1 - eta)^n; there are no dark counts.
std::vector<DetectionBranch> detect(
    const FockState &state, std::string_view mode, SplitterBasis basis, double eta, const SamplingPolicy &policy);
std::vector<DetectionBranch> detect(
    const MixedState &state, std::string_view mode, SplitterBasis basis, double eta, const SamplingPolicy &policy);

struct TransitBranch {
    bool survived;
    bool dephased;
    double probability;
    MixedState post;
};

/// Pair-level noise: the pair survives with probability zeta, and a surviving
/// pair is dephased (Z on `dephased_mode`) with probability gamma. A lost pair
/// leaves vacuum behind.
std::vector<TransitBranch> channel_transit(
    const FockState &pair_state,
    std::string_view dephased_mode,
    const ChannelParams &params,
    const SamplingPolicy &policy);

void require_probability(double value, const char *name);

}  // namespace qrepeat

#endif
