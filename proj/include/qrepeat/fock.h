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

#ifndef QREPEAT_FOCK_H
#define QREPEAT_FOCK_H

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qrepeat/errors.h"

namespace qrepeat {

using Amplitude = std::complex<double>;
using Rng = std::mt19937_64;

enum class Pol : uint8_t { H = 0, V = 1 };

constexpr int kDefaultTruncation = 4;
constexpr double kDefaultPruneThreshold = 1e-15;

char pol_name(Pol p);

/// One spatial-and-frequency mode carrying an H and a V slot.
///
/// `group` names the spatial path. Photons of different frequencies travelling
/// along the same path are registered as separate modes sharing a group; a
/// dichroic element separates them by tag.
struct Mode {
    std::string label;
    std::string frequency;
    std::string group;
};

class ModeRegistry;
using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// Ordered set of modes plus the engine configuration shared by every state
/// living on them (per-slot truncation and amplitude pruning threshold).
///
/// Slot order is fixed: mode i owns slots 2i (H) and 2i+1 (V). Serialized
/// states follow this order so they compare byte-for-byte across runs.
class ModeRegistry {
  public:
    class Builder {
      public:
        Builder &frequencies(std::vector<std::string> tags);
        Builder &add(std::string label, std::string frequency, std::string group = "");
        Builder &truncation(int n_max);
        Builder &prune_threshold(double threshold);
        RegistryPtr build() const;

      private:
        std::vector<std::string> frequencies_;
        std::vector<Mode> modes_;
        int n_max_ = kDefaultTruncation;
        double prune_threshold_ = kDefaultPruneThreshold;
    };

    size_t size() const {
        return modes_.size();
    }
    size_t num_slots() const {
        return 2 * modes_.size();
    }
    int n_max() const {
        return n_max_;
    }
    double prune_threshold() const {
        return prune_threshold_;
    }
    const std::vector<Mode> &modes() const {
        return modes_;
    }
    const std::vector<std::string> &frequencies() const {
        return frequencies_;
    }
    const Mode &mode(size_t index) const {
        return modes_[index];
    }
    const Mode &mode(std::string_view label) const {
        return modes_[index_of(label)];
    }

    bool contains(std::string_view label) const;
    /// Throws RegistryError for unknown labels.
    size_t index_of(std::string_view label) const;
    size_t slot(std::string_view label, Pol p) const {
        return 2 * index_of(label) + static_cast<size_t>(p);
    }
    std::vector<size_t> group_members(std::string_view group) const;

    /// Same modes (labels, tags, groups) in the same order and same engine settings.
    bool operator==(const ModeRegistry &other) const;

    /// Union of two registries; label collisions raise RegistryError.
    static RegistryPtr merged(const ModeRegistry &a, const ModeRegistry &b);
    /// Copy of `base` with extra modes appended.
    static RegistryPtr extended(const ModeRegistry &base, const std::vector<Mode> &extra);

  private:
    ModeRegistry() = default;

    std::vector<std::string> frequencies_;
    std::vector<Mode> modes_;
    std::unordered_map<std::string, size_t> index_;
    int n_max_ = kDefaultTruncation;
    double prune_threshold_ = kDefaultPruneThreshold;
};

/// Photon counts per slot, in registry slot order.
struct Occupation {
    std::vector<uint8_t> counts;

    Occupation() = default;
    explicit Occupation(size_t num_slots) : counts(num_slots, 0) {
    }

    int total() const;
    int in_mode(size_t mode_index) const {
        return counts[2 * mode_index] + counts[2 * mode_index + 1];
    }
    auto operator<=>(const Occupation &) const = default;
    bool operator==(const Occupation &) const = default;
};

/// Sparse superposition of Fock basis states on a registry.
///
/// States are values: every operation returns a new state. Terms whose
/// amplitude magnitude falls below the registry's prune threshold are dropped
/// after each operation.
class FockState {
  public:
    using TermMap = std::map<Occupation, Amplitude>;

    explicit FockState(RegistryPtr registry);

    const ModeRegistry &registry() const {
        return *registry_;
    }
    const RegistryPtr &registry_ptr() const {
        return registry_;
    }
    const TermMap &terms() const {
        return terms_;
    }
    bool empty() const {
        return terms_.empty();
    }

    Amplitude amplitude(const Occupation &occupation) const;
    /// Accumulates into the existing amplitude of `occupation`.
    void add(const Occupation &occupation, Amplitude amplitude);

    double norm_squared() const;
    double norm() const;
    FockState normalized() const;
    FockState scaled(Amplitude factor) const;
    FockState pruned() const;

    FockState &operator+=(const FockState &other);

    /// Largest per-mode photon count over all terms.
    int max_photons_in_mode(std::string_view label) const;
    int max_total_photons() const;

    /// One line per term: `<mode:pol=count,...> <re> <im>`.
    std::string to_string() const;

  private:
    RegistryPtr registry_;
    TermMap terms_;
};

FockState operator+(FockState a, const FockState &b);
FockState operator*(Amplitude factor, const FockState &state);

/// Ensemble of pure branches. Weights are probabilities summing to one.
struct WeightedState {
    double weight;
    FockState state;
};

class MixedState {
  public:
    MixedState() = default;
    explicit MixedState(FockState pure);
    explicit MixedState(std::vector<WeightedState> branches);

    const std::vector<WeightedState> &branches() const {
        return branches_;
    }
    bool empty() const {
        return branches_.empty();
    }
    const ModeRegistry &registry() const;
    const RegistryPtr &registry_ptr() const;
    double total_weight() const;

    /// Applies a pure-state map to every branch.
    template <typename F>
    MixedState map(F &&f) const {
        std::vector<WeightedState> out;
        out.reserve(branches_.size());
        for (const auto &b : branches_) {
            out.push_back({b.weight, f(b.state)});
        }
        return MixedState(std::move(out));
    }

  private:
    std::vector<WeightedState> branches_;
};

/// How a probabilistic operation resolves its outcomes.
///
/// Exhaustive: every outcome is returned with its exact probability.
/// Sampled: exactly one outcome is returned, drawn with its exact probability
/// from a caller-owned random stream.
class SamplingPolicy {
  public:
    static SamplingPolicy exhaustive() {
        return SamplingPolicy(nullptr);
    }
    static SamplingPolicy sampled(Rng &rng) {
        return SamplingPolicy(&rng);
    }
    bool is_exhaustive() const {
        return rng_ == nullptr;
    }
    Rng &rng() const {
        return *rng_;
    }

    /// Picks a single branch when sampling, returns all of them otherwise.
    /// `probability_of` maps a branch to its probability.
    template <typename T, typename P>
    std::vector<T> resolve(std::vector<T> branches, P &&probability_of) const {
        if (is_exhaustive() || branches.empty()) {
            return branches;
        }
        double total = 0;
        for (const auto &b : branches) {
            total += probability_of(b);
        }
        double r = std::uniform_real_distribution<double>(0.0, total)(*rng_);
        for (auto &b : branches) {
            r -= probability_of(b);
            if (r < 0) {
                return {std::move(b)};
            }
        }
        // Round-off: fall back to the last branch with nonzero weight.
        for (size_t k = branches.size(); k-- > 0;) {
            if (probability_of(branches[k]) > 0) {
                return {std::move(branches[k])};
            }
        }
        return {std::move(branches.back())};
    }

  private:
    explicit SamplingPolicy(Rng *rng) : rng_(rng) {
    }
    Rng *rng_;
};

FockState make_vacuum(RegistryPtr registry);

/// Creation operator on one slot; each term |n> maps to sqrt(n+1)|n+1>.
FockState apply_creation(const FockState &state, std::string_view mode, Pol pol);
/// Annihilation operator on one slot; each term |n> maps to sqrt(n)|n-1>.
FockState apply_annihilation(const FockState &state, std::string_view mode, Pol pol);

/// Passive linear-optics transformation on a subset of slots.
///
/// Column j of `u` is the image of the creation operator of `slots[j]`:
/// a_j^dag -> sum_i u(i, j) a_i^dag. `u` must be unitary for the result to be
/// physical, but this is not checked here.
FockState apply_slot_transform(const FockState &state, std::span<const size_t> slots, const Eigen::MatrixXcd &u);

FockState tensor(const FockState &a, const FockState &b);

Amplitude inner_product(const FockState &bra, const FockState &ket);

double fidelity(const FockState &state, const FockState &target);
double fidelity(const MixedState &state, const FockState &target);

/// Copies `state` onto `target`, renaming modes through `rename` (identity for
/// labels not in the map). Every occupied source mode must exist in `target`.
FockState embed(
    const FockState &state, RegistryPtr target, const std::map<std::string, std::string> &rename = {});

/// Drops modes absent from `target`. Those modes must be empty in every term.
FockState restrict_to(const FockState &state, RegistryPtr target);

struct NumberBranch {
    int count;
    double probability;
    FockState post_state;
};

/// Projective photon-number readout of one mode (H and V slots together).
/// Post states are renormalized. Requires a normalized input.
std::vector<NumberBranch> measure_photon_number(
    const FockState &state, std::string_view mode, const SamplingPolicy &policy);

/// Unnormalized projection of `state` onto terms with `count` photons in `mode`.
FockState project_photon_number(const FockState &state, std::string_view mode, int count);

/// Unnormalized projection onto terms whose slot holds `count` photons.
FockState project_slot(const FockState &state, size_t slot, int count);

}  // namespace qrepeat

#endif
