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

#ifndef QREPEAT_GATES_H
#define QREPEAT_GATES_H

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qrepeat/elements.h"
#include "qrepeat/sources.h"

namespace qrepeat {

struct Correction {
    std::string mode;
    std::string tag;
};

/// Result of one branch of a heralded component.
///
/// Aggregated failure branches carry no records and an empty post state: the
/// photons of a failed attempt are discarded.
struct HeraldOutcome {
    bool success = false;
    std::vector<DetectorRecord> records;
    double branch_probability = 0;
    MixedState post_state;
    std::vector<Correction> corrections_applied;
};

/// A named single-photon polarization operation. Tags are dot-separated words
/// over {I, X, Z, S, H} applied left to right, e.g. "S.X" applies S then X.
struct LocalOp {
    std::string tag;
    Eigen::Matrix2cd matrix;
};

Eigen::Matrix2cd local_op_matrix(std::string_view tag);

/// The 24 single-qubit Cliffords modulo phase, shortest words first.
const std::vector<LocalOp> &clifford_ops();

// ---------------------------------------------------------------- CNOT

/// Herald pattern of the two-splitter CNOT: D1 sits behind the circular
/// splitter and resolves H/V, D2 sits behind the linear splitter and resolves R/L.
struct CnotHerald {
    ResolvedPol d1;
    ResolvedPol d2;
    bool operator==(const CnotHerald &) const = default;
};

struct CnotCorrection {
    CnotHerald herald;
    std::string control_tag;
    std::string target_tag;
};

/// The circular splitter acts as a parity check in the R/L basis, so on its
/// own the circuit heralds a controlled-Y. A fixed waveplate on the target
/// input turns it into CNOT after outcome-conditioned corrections.
struct CnotCorrectionTable {
    std::string target_waveplate;
    std::array<CnotCorrection, 4> entries;
};

/// Frozen corrections for the four accepted herald patterns.
const CnotCorrectionTable &cnot_correction_table();

/// Rebuilds the correction table by exhaustive simulation of the circuit with
/// ideal devices. Searches the Clifford group, shortest words first, for a
/// target input waveplate and per-pattern output corrections that turn every
/// heralded map into CNOT. Throws if none exists.
CnotCorrectionTable derive_cnot_corrections();

/// Unnormalized heralded map for one pattern with ideal detectors and a fired
/// ancilla source, before output corrections. `target_waveplate` is applied
/// to the target before it enters the circuit. Ancilla modes are removed from
/// the result.
FockState cnot_heralded_branch(
    const FockState &state, std::string_view control, std::string_view target, const GunParams &ancilla,
    const CnotHerald &herald, std::string_view target_waveplate);

/// Probabilistic CNOT built from a linear and a circular polarizing beam
/// splitter fed by a Phi+ ancilla pair.
///
/// The control meets one ancilla photon on the linear splitter; the target
/// meets the other on the circular splitter. Success requires exactly one
/// photon at each herald port, registered with efficiency `eta` and resolved
/// in the opposite basis. Accepted branches have their corrections applied.
/// A source that does not fire fails the attempt. Returns the accepted
/// branches plus one aggregated failure branch.
///
/// Control and target must hold exactly one photon each.
std::vector<HeraldOutcome> pittman_cnot(
    const MixedState &state, std::string_view control, std::string_view target, const GunParams &ancilla, double eta,
    const SamplingPolicy &policy);

// ---------------------------------------------------------------- QND

/// Black-box single-photon presence check. Its internal interferometer uses
/// two pair sources and four detectors; only its contract is modeled.
struct QndModel {
    double p_qnd = 0.125;
    double gun_p_s = 1.0;

    static constexpr int kGuns = 2;
    static constexpr int kDetectors = 4;
};

/// Heralds presence with probability p_qnd * eta^4 * p_s^2 when the mode holds
/// one photon, never on vacuum. The heralded state is untouched. Two or more
/// photons raise UnsupportedInput.
std::vector<HeraldOutcome> qnd_presence(
    const MixedState &state, std::string_view mode, double eta, const QndModel &model, const SamplingPolicy &policy);

// ---------------------------------------------------------------- Bell analyzer

enum class BellOutcome { PsiPlus, PsiMinus, Fail };
const char *bell_outcome_name(BellOutcome outcome);

struct BellAnalysis {
    BellOutcome outcome;
    HeraldOutcome herald;
};

/// 50/50 beam splitter followed by a linear polarization analysis on each
/// output. Psi- leaves one photon per port with orthogonal polarizations;
/// Psi+ leaves both photons on one port with orthogonal polarizations; Phi+-
/// bunch into a single bucket and fail. Each successful pattern is its own
/// branch; failures are aggregated.
std::vector<BellAnalysis> bell_analyzer(
    const MixedState &state, std::string_view mode_a, std::string_view mode_b, double eta,
    const SamplingPolicy &policy);

}  // namespace qrepeat

#endif
