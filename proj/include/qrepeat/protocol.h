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

#ifndef QREPEAT_PROTOCOL_H
#define QREPEAT_PROTOCOL_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrepeat/analytics.h"
#include "qrepeat/elements.h"
#include "qrepeat/gates.h"
#include "qrepeat/sources.h"

namespace qrepeat {

using StationId = int;

/// Frequency tags of the two photons of every pair source.
inline constexpr const char *kFreqLow = "w1";
inline constexpr const char *kFreqHigh = "w2";

struct ClassicalMessage {
    StationId from;
    StationId to;
    std::string payload;
    int round;
};

/// A pair shared by two stations, living on the modes "left" and "right".
struct LinkPair {
    StationId station_left = 0;
    StationId station_right = 1;
    MixedState state;
    double fidelity_cache = 0;
    std::vector<ClassicalMessage> provenance;
    /// No dephasing event hit this pair or anything it was built from.
    bool dephasing_free = true;

    int last_round() const;
};

RegistryPtr link_registry(const std::string &freq_left, const std::string &freq_right);
/// Phi+ on the "left"/"right" modes of `registry`.
FockState link_target(RegistryPtr registry);
LinkPair make_link_pair(StationId left, StationId right, MixedState state, bool dephasing_free = true);

/// Source of link `link_index`. Links alternate their orientation so that
/// the two photons meeting at a repeater node carry the same tag. With
/// `reversed`, the tags of the two ends are swapped, as needed for the
/// target pair of a purifier.
GunParams link_source(int link_index, double p_s, bool reversed = false);

struct DistributeBranch {
    std::optional<LinkPair> pair;
    double probability;
    /// "no-fire", "lost", "clean" or "dephased".
    std::string outcome;
};

/// Fires the source and sends the pair through the channel. A dephasing event
/// applies Z to the right photon.
std::vector<DistributeBranch> distribute_pair(
    StationId left, StationId right, const GunParams &source, const ChannelParams &channel,
    const SamplingPolicy &policy);

struct PurifyBranch {
    std::optional<LinkPair> pair;
    double probability;
    /// "accepted-HH", "accepted-VV", "antiparallel", "no-coincidence",
    /// "qnd-fail", "cnot-fail".
    std::string outcome;
    std::vector<ClassicalMessage> messages;
    ComponentTally tally;
};

/// One purification attempt on two pairs spanning the same stations. `pair1`
/// supplies the controls and is retained; `pair2` supplies the targets and
/// must carry the opposite frequency orientation.
///
/// The left control is presence-checked, each station applies a CNOT, the
/// targets are measured in the H/V basis, and the pair is kept on a parallel
/// coincidence. With `include_qnd` false the presence check always heralds
/// (its sources and detectors still count).
std::vector<PurifyBranch> purify(
    const LinkPair &pair1, const LinkPair &pair2, const NoiseParams &params, const SamplingPolicy &policy,
    bool include_qnd = true);

/// Correction applied at the right end after a successful Bell analysis,
/// keyed by the analyzer's click pattern.
struct SwapCorrection {
    std::string pattern;
    BellOutcome outcome;
    std::string tag;
};

const std::vector<SwapCorrection> &swap_correction_table();
/// Rebuilds the table from Phi+ inputs with ideal detectors.
std::vector<SwapCorrection> derive_swap_corrections();

struct SwapBranch {
    std::optional<LinkPair> pair;
    double probability;
    BellOutcome outcome;
    std::vector<ClassicalMessage> messages;
    ComponentTally tally;
};

/// Bell analysis on the inner photons of two adjacent pairs; on success the
/// outer photons form a pair between the outer stations.
std::vector<SwapBranch> swap(const LinkPair &left, const LinkPair &right, double eta, const SamplingPolicy &policy);

/// What a simulation run measures.
enum class Stage {
    Chain,   ///< full chain of purified links joined by swaps
    Purify,  ///< a single purified link
    Swap,    ///< one swap of two ideal Phi+ pairs
};
const char *stage_name(Stage stage);

struct ChainConfig {
    int n_links = 1;
    NoiseParams params;
    int64_t trials = 100000;
    uint64_t seed = 1;
    /// Presence check always heralds, as in the published component table.
    bool table1_convention = false;
    Stage stage = Stage::Chain;
    int threads = 1;

    void validate() const;
};

struct RateReport {
    Stage stage = Stage::Chain;
    int n_links = 1;
    int64_t trials = 0;
    uint64_t seed = 0;
    Convention convention = Convention::WithQnd;
    NoiseParams params;

    /// Accepted and free of dephasing; this is the rate the product formula predicts.
    int64_t successes = 0;
    /// Accepted regardless of dephasing.
    int64_t accepted = 0;
    double success_frequency = 0;
    double standard_error = 0;
    /// Wilson score interval at three standard deviations.
    double ci_low = 0;
    double ci_high = 0;
    double analytic_probability = 0;
    double z_score = 0;
    bool within_3sigma = false;

    double accepted_frequency = 0;
    double mean_accepted_fidelity = 0;
    /// Sum of output fidelities over all trials, divided by the trial count.
    double fidelity_weighted_rate = 0;

    int64_t purify_attempts = 0;
    int64_t purify_successes = 0;
    int64_t swap_attempts = 0;
    int64_t swap_successes = 0;

    ComponentTally tally_per_trial;
    double attempts_per_pair = 0;
    double analytic_attempts_per_pair = 0;
    double expected_components = 0;
    double analytic_expected_components = 0;
};

/// Seed of trial `index`: two rounds of splitmix64 over (seed, index).
uint64_t trial_seed(uint64_t seed, uint64_t index);

/// Monte Carlo over independent one-shot trials. Results do not depend on
/// the thread count. Event-log lines (`trial,station,component,outcome,
/// probability`) are appended to `event_log` in trial order when it is given.
RateReport run_chain(const ChainConfig &config, std::vector<std::string> *event_log = nullptr);

}  // namespace qrepeat

#endif
