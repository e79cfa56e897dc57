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

#include "qrepeat/elements.h"

#include <array>
#include <cmath>
#include <map>

namespace qrepeat {

namespace {

const Amplitude kI{0, 1};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool mode_occupied(const FockState &state, size_t mode_index) {
    for (const auto &[occ, amp] : state.terms()) {
        if (occ.in_mode(mode_index) != 0) {
            return true;
        }
    }
    return false;
}

void require_interferable(const FockState &state, std::string_view a, std::string_view b, const char *element) {
    const ModeRegistry &reg = state.registry();
    size_t ia = reg.index_of(a);
    size_t ib = reg.index_of(b);
    if (ia == ib) {
        throw ContractViolation(std::string(element) + " needs two distinct ports");
    }
    const std::string &fa = reg.mode(ia).frequency;
    const std::string &fb = reg.mode(ib).frequency;
    if (fa != fb && (mode_occupied(state, ia) || mode_occupied(state, ib))) {
        throw FrequencyMismatch(
            std::string(element) + " on '" + std::string(a) + "' (" + fa + ") and '" + std::string(b) + "' (" + fb +
            ") mixes frequency tags");
    }
}

// Bucket click probability for n photons at efficiency eta.
double click_probability(int n, double eta) {
    return 1.0 - std::pow(1.0 - eta, n);
}

}  // namespace

const char *basis_name(SplitterBasis basis) {
    return basis == SplitterBasis::Linear ? "linear" : "circular";
}

const char *resolved_name(ResolvedPol pol) {
    switch (pol) {
        case ResolvedPol::H:
            return "H";
        case ResolvedPol::V:
            return "V";
        case ResolvedPol::R:
            return "R";
        case ResolvedPol::L:
            return "L";
    }
    return "?";
}

void require_probability(double value, const char *name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
    }
}

namespace waveplate {

Eigen::Matrix2cd identity() {
    return Eigen::Matrix2cd::Identity();
}

Eigen::Matrix2cd x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix2cd xz() {
    Eigen::Matrix2cd m;
    m << 0, -1, 1, 0;
    return m;
}

Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd m;
    m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    return m;
}

Eigen::Matrix2cd phase_s() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, kI;
    return m;
}

Eigen::Matrix2cd circular_basis() {
    Eigen::Matrix2cd m;
    m << kInvSqrt2, kInvSqrt2, kI * kInvSqrt2, -kI * kInvSqrt2;
    return m;
}

}  // namespace waveplate

bool is_unitary(const Eigen::MatrixXcd &u, double tolerance) {
    if (u.rows() != u.cols()) {
        return false;
    }
    Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tolerance;
}

FockState apply_pbs(const FockState &state, std::string_view port_a, std::string_view port_b, SplitterBasis basis) {
    require_interferable(state, port_a, port_b, "polarizing beam splitter");
    const ModeRegistry &reg = state.registry();

    Eigen::Matrix2cd b = basis == SplitterBasis::Linear ? waveplate::identity() : waveplate::circular_basis();
    Eigen::Matrix2cd transmit = b.col(0) * b.col(0).adjoint();
    Eigen::Matrix2cd reflect = b.col(1) * b.col(1).adjoint();

    Eigen::MatrixXcd u(4, 4);
    u.block<2, 2>(0, 0) = transmit;
    u.block<2, 2>(2, 2) = transmit;
    u.block<2, 2>(0, 2) = reflect;
    u.block<2, 2>(2, 0) = reflect;

    std::array<size_t, 4> slots{
        reg.slot(port_a, Pol::H), reg.slot(port_a, Pol::V), reg.slot(port_b, Pol::H), reg.slot(port_b, Pol::V)};
    return apply_slot_transform(state, slots, u);
}

FockState apply_beam_splitter(
    const FockState &state, std::string_view port_a, std::string_view port_b, double transmissivity) {
    require_probability(transmissivity, "transmissivity");
    require_interferable(state, port_a, port_b, "beam splitter");
    const ModeRegistry &reg = state.registry();
    double t = std::sqrt(transmissivity);
    Amplitude r = kI * std::sqrt(1 - transmissivity);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    for (int p = 0; p < 2; p++) {
        u(p, p) = t;
        u(p + 2, p + 2) = t;
        u(p + 2, p) = r;
        u(p, p + 2) = r;
    }
    std::array<size_t, 4> slots{
        reg.slot(port_a, Pol::H), reg.slot(port_a, Pol::V), reg.slot(port_b, Pol::H), reg.slot(port_b, Pol::V)};
    return apply_slot_transform(state, slots, u);
}

FockState apply_local_unitary(const FockState &state, std::string_view mode, const Eigen::Matrix2cd &u) {
    if (!is_unitary(u)) {
        throw ContractViolation("local polarization transform is not unitary");
    }
    const ModeRegistry &reg = state.registry();
    std::array<size_t, 2> slots{reg.slot(mode, Pol::H), reg.slot(mode, Pol::V)};
    return apply_slot_transform(state, slots, u);
}

FockState dichroic_split(
    const FockState &state, std::string_view in_group, std::string_view out_low, std::string_view out_high) {
    const ModeRegistry &reg = state.registry();
    size_t low = reg.index_of(out_low);
    size_t high = reg.index_of(out_high);
    const std::string &f_low = reg.mode(low).frequency;
    const std::string &f_high = reg.mode(high).frequency;
    if (f_low == f_high) {
        throw ConfigError("dichroic outputs must carry different frequency tags");
    }
    if (mode_occupied(state, low) || mode_occupied(state, high)) {
        throw ContractViolation("dichroic outputs must be empty");
    }
    std::vector<size_t> members = reg.group_members(in_group);
    if (members.empty()) {
        throw RegistryError("no modes in spatial group '" + std::string(in_group) + "'");
    }
    FockState out = state;
    for (size_t m : members) {
        if (m == low || m == high) {
            throw ContractViolation("dichroic output lies inside the input group");
        }
        if (!mode_occupied(out, m)) {
            continue;
        }
        const std::string &f = reg.mode(m).frequency;
        size_t dest;
        if (f == f_low) {
            dest = low;
        } else if (f == f_high) {
            dest = high;
        } else {
            throw RoutingError(
                "dichroic element has no output for frequency tag '" + f + "' on mode '" + reg.mode(m).label + "'");
        }
        Eigen::MatrixXcd swap(4, 4);
        swap << 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0;
        std::array<size_t, 4> slots{2 * m, 2 * m + 1, 2 * dest, 2 * dest + 1};
        out = apply_slot_transform(out, slots, swap);
    }
    return out;
}

namespace {

struct RawOutcome {
    double probability = 0;
    std::vector<WeightedState> components;  // unnormalized weights
};

// Outcome index: bit 0 = first bucket clicked, bit 1 = second bucket clicked.
std::array<RawOutcome, 4> detect_raw(const FockState &state, std::string_view mode, SplitterBasis basis, double eta) {
    const ModeRegistry &reg = state.registry();
    FockState rotated =
        basis == SplitterBasis::Linear ? state : apply_local_unitary(state, mode, waveplate::circular_basis().adjoint());
    size_t m = reg.index_of(mode);

    std::map<std::pair<int, int>, FockState> by_count;
    for (const auto &[occ, amp] : rotated.terms()) {
        std::pair<int, int> key{occ.counts[2 * m], occ.counts[2 * m + 1]};
        Occupation emptied = occ;
        emptied.counts[2 * m] = 0;
        emptied.counts[2 * m + 1] = 0;
        auto it = by_count.try_emplace(key, rotated.registry_ptr()).first;
        it->second.add(emptied, amp);
    }

    std::array<RawOutcome, 4> outcomes;
    for (const auto &[key, component] : by_count) {
        double w = component.norm_squared();
        if (w == 0) {
            continue;
        }
        FockState normalized = component.scaled(1.0 / std::sqrt(w));
        double c1 = click_probability(key.first, eta);
        double c2 = click_probability(key.second, eta);
        std::array<double, 4> p{(1 - c1) * (1 - c2), c1 * (1 - c2), (1 - c1) * c2, c1 * c2};
        for (int o = 0; o < 4; o++) {
            if (p[o] <= 0) {
                continue;
            }
            outcomes[o].probability += w * p[o];
            outcomes[o].components.push_back({w * p[o], normalized});
        }
    }
    return outcomes;
}

DetectorRecord make_record(std::string_view mode, SplitterBasis basis, double eta, int outcome) {
    DetectorRecord r;
    r.mode = std::string(mode);
    r.basis = basis;
    r.efficiency = eta;
    r.clicked = outcome != 0;
    bool circ = basis == SplitterBasis::Circular;
    if (outcome == 1) {
        r.resolved_pol = circ ? ResolvedPol::R : ResolvedPol::H;
    } else if (outcome == 2) {
        r.resolved_pol = circ ? ResolvedPol::L : ResolvedPol::V;
    }
    return r;
}

std::vector<DetectionBranch> finish(
    std::array<RawOutcome, 4> &outcomes,
    std::string_view mode,
    SplitterBasis basis,
    double eta,
    const SamplingPolicy &policy) {
    std::vector<DetectionBranch> branches;
    for (int o = 0; o < 4; o++) {
        auto &raw = outcomes[o];
        if (raw.probability <= 0) {
            continue;
        }
        for (auto &c : raw.components) {
            c.weight /= raw.probability;
        }
        branches.push_back({make_record(mode, basis, eta, o), raw.probability, MixedState(std::move(raw.components))});
    }
    return policy.resolve(std::move(branches), [](const DetectionBranch &b) { return b.probability; });
}

}  // namespace

std::vector<DetectionBranch> detect(
    const FockState &state, std::string_view mode, SplitterBasis basis, double eta, const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    auto raw = detect_raw(state, mode, basis, eta);
    return finish(raw, mode, basis, eta, policy);
}

std::vector<DetectionBranch> detect(
    const MixedState &state, std::string_view mode, SplitterBasis basis, double eta, const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    std::array<RawOutcome, 4> total;
    for (const auto &b : state.branches()) {
        auto raw = detect_raw(b.state, mode, basis, eta);
        for (int o = 0; o < 4; o++) {
            total[o].probability += b.weight * raw[o].probability;
            for (auto &c : raw[o].components) {
                total[o].components.push_back({b.weight * c.weight, std::move(c.state)});
            }
        }
    }
    return finish(total, mode, basis, eta, policy);
}

std::vector<TransitBranch> channel_transit(
    const FockState &pair_state,
    std::string_view dephased_mode,
    const ChannelParams &params,
    const SamplingPolicy &policy) {
    require_probability(params.gamma, "gamma");
    require_probability(params.zeta, "zeta");
    for (const auto &[occ, amp] : pair_state.terms()) {
        if (occ.total() != 2) {
            throw ContractViolation("channel transit expects exactly one photon pair");
        }
    }
    if (pair_state.empty()) {
        throw ContractViolation("channel transit expects exactly one photon pair");
    }
    pair_state.registry().index_of(dephased_mode);

    std::vector<TransitBranch> branches;
    double survive = params.zeta;
    if (1 - survive > 0) {
        branches.push_back({false, false, 1 - survive, MixedState(make_vacuum(pair_state.registry_ptr()))});
    }
    if (survive * (1 - params.gamma) > 0) {
        branches.push_back({true, false, survive * (1 - params.gamma), MixedState(pair_state)});
    }
    if (survive * params.gamma > 0) {
        FockState flipped = apply_local_unitary(pair_state, dephased_mode, waveplate::z());
        branches.push_back({true, true, survive * params.gamma, MixedState(std::move(flipped))});
    }
    return policy.resolve(std::move(branches), [](const TransitBranch &b) { return b.probability; });
}

}  // namespace qrepeat
