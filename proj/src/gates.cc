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

#include "qrepeat/gates.h"

#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <set>

namespace qrepeat {

namespace {

constexpr std::array<CnotHerald, 4> kCnotHeralds{{
    {ResolvedPol::H, ResolvedPol::R},
    {ResolvedPol::H, ResolvedPol::L},
    {ResolvedPol::V, ResolvedPol::R},
    {ResolvedPol::V, ResolvedPol::L},
}};

Eigen::Matrix2cd generator(std::string_view name) {
    if (name == "I") {
        return waveplate::identity();
    }
    if (name == "X") {
        return waveplate::x();
    }
    if (name == "Z") {
        return waveplate::z();
    }
    if (name == "S") {
        return waveplate::phase_s();
    }
    if (name == "H") {
        return waveplate::hadamard();
    }
    throw ConfigError("unknown polarization operation '" + std::string(name) + "'");
}

// Canonical key of a 2x2 unitary modulo global phase.
std::string phase_free_key(const Eigen::Matrix2cd &m) {
    Amplitude phase = 1;
    for (int k = 0; k < 4; k++) {
        Amplitude v = m(k / 2, k % 2);
        if (std::abs(v) > 1e-9) {
            phase = std::abs(v) / v;
            break;
        }
    }
    std::string key;
    char buf[48];
    for (int k = 0; k < 4; k++) {
        Amplitude v = m(k / 2, k % 2) * phase;
        double re = std::round(v.real() * 1e6) / 1e6;
        double im = std::round(v.imag() * 1e6) / 1e6;
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f;", re == 0 ? 0.0 : re, im == 0 ? 0.0 : im);
        key += buf;
    }
    return key;
}

void require_single_photon(const FockState &state, std::string_view mode, const char *what) {
    size_t m = state.registry().index_of(mode);
    for (const auto &[occ, amp] : state.terms()) {
        if (occ.in_mode(m) != 1) {
            throw ContractViolation(
                std::string(what) + " requires exactly one photon in mode '" + std::string(mode) + "'");
        }
    }
    if (state.empty()) {
        throw ContractViolation(std::string(what) + " received an empty state");
    }
}

// Sets the counts of `mode` to zero in every term.
FockState vacate(const FockState &state, std::string_view mode) {
    size_t m = state.registry().index_of(mode);
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        Occupation o = occ;
        o.counts[2 * m] = 0;
        o.counts[2 * m + 1] = 0;
        out.add(o, amp);
    }
    return out;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            for (int k = 0; k < 2; k++) {
                for (int l = 0; l < 2; l++) {
                    out(2 * i + j, 2 * k + l) = a(i, k) * b(j, l);
                }
            }
        }
    }
    return out;
}

Eigen::Matrix4cd cnot_matrix() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(3, 2) = 1;
    m(2, 3) = 1;
    return m;
}

// Aggregates weighted post states per branch key before normalizing.
struct Accumulator {
    double probability = 0;
    std::vector<WeightedState> components;
    std::vector<DetectorRecord> records;

    void add(double p, FockState state) {
        probability += p;
        components.push_back({p, std::move(state)});
    }
    MixedState finish() {
        for (auto &c : components) {
            c.weight /= probability;
        }
        return MixedState(std::move(components));
    }
};

}  // namespace

Eigen::Matrix2cd local_op_matrix(std::string_view tag) {
    Eigen::Matrix2cd m = waveplate::identity();
    size_t start = 0;
    while (start <= tag.size()) {
        size_t end = tag.find('.', start);
        if (end == std::string_view::npos) {
            end = tag.size();
        }
        m = generator(tag.substr(start, end - start)) * m;
        start = end + 1;
    }
    return m;
}

const std::vector<LocalOp> &clifford_ops() {
    static const std::vector<LocalOp> ops = [] {
        std::vector<LocalOp> out;
        std::set<std::string> seen;
        std::deque<LocalOp> queue{{"I", waveplate::identity()}};
        seen.insert(phase_free_key(waveplate::identity()));
        while (!queue.empty()) {
            LocalOp cur = queue.front();
            queue.pop_front();
            out.push_back(cur);
            for (const char *g : {"X", "Z", "S", "H"}) {
                Eigen::Matrix2cd next = generator(g) * cur.matrix;
                if (seen.insert(phase_free_key(next)).second) {
                    std::string tag = cur.tag == "I" ? std::string(g) : cur.tag + "." + g;
                    queue.push_back({tag, next});
                }
            }
        }
        return out;
    }();
    return ops;
}

// Frozen output of derive_cnot_corrections(); cnot tests re-derive and compare.
const CnotCorrectionTable &cnot_correction_table() {
    static const CnotCorrectionTable table{
        "S",
        {{
            {{ResolvedPol::H, ResolvedPol::R}, "Z", "Z.S"},
            {{ResolvedPol::H, ResolvedPol::L}, "I", "Z.S"},
            {{ResolvedPol::V, ResolvedPol::R}, "Z", "X.S"},
            {{ResolvedPol::V, ResolvedPol::L}, "I", "X.S"},
        }}};
    return table;
}

FockState cnot_heralded_branch(
    const FockState &state, std::string_view control, std::string_view target, const GunParams &ancilla,
    const CnotHerald &herald, std::string_view target_waveplate) {
    if (ancilla.kind != BellKind::PhiPlus) {
        throw ContractViolation("the CNOT ancilla source must emit Phi+");
    }
    const std::string c_anc = std::string(control) + "~anc";
    const std::string t_anc = std::string(target) + "~anc";
    RegistryPtr original = state.registry_ptr();
    RegistryPtr wide = ModeRegistry::extended(
        *original, {{c_anc, ancilla.freq_a, c_anc}, {t_anc, ancilla.freq_b, t_anc}});

    GunParams ideal = ancilla;
    ideal.p_s = 1.0;
    FockState s = fire_gun(embed(state, wide), c_anc, t_anc, ideal, SamplingPolicy::exhaustive()).front().state;

    s = apply_local_unitary(s, target, local_op_matrix(target_waveplate));
    s = apply_pbs(s, control, c_anc, SplitterBasis::Linear);
    s = apply_pbs(s, target, t_anc, SplitterBasis::Circular);

    // D2: circular analysis behind the linear splitter; R lands in the H slot.
    s = apply_local_unitary(s, c_anc, waveplate::circular_basis().adjoint());
    const ModeRegistry &reg = *wide;
    Pol d1 = herald.d1 == ResolvedPol::H ? Pol::H : Pol::V;
    Pol d2 = herald.d2 == ResolvedPol::R ? Pol::H : Pol::V;
    auto other = [](Pol p) { return p == Pol::H ? Pol::V : Pol::H; };
    s = project_slot(s, reg.slot(t_anc, d1), 1);
    s = project_slot(s, reg.slot(t_anc, other(d1)), 0);
    s = project_slot(s, reg.slot(c_anc, d2), 1);
    s = project_slot(s, reg.slot(c_anc, other(d2)), 0);
    s = vacate(vacate(s, c_anc), t_anc);
    return restrict_to(s, original);
}

CnotCorrectionTable derive_cnot_corrections() {
    RegistryPtr reg = ModeRegistry::Builder().add("c", "w1").add("t", "w2").build();
    GunParams ancilla;
    ancilla.freq_a = "w1";
    ancilla.freq_b = "w2";
    const Eigen::Matrix4cd cnot = cnot_matrix();
    const auto &ops = clifford_ops();

    // Heralded map for one pattern: rows/cols indexed by 2*pol(control) + pol(target).
    auto heralded_map = [&](const CnotHerald &herald, std::string_view waveplate) {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        for (int pc = 0; pc < 2; pc++) {
            for (int pt = 0; pt < 2; pt++) {
                FockState in = apply_creation(
                    apply_creation(make_vacuum(reg), "c", static_cast<Pol>(pc)), "t", static_cast<Pol>(pt));
                FockState k = cnot_heralded_branch(in, "c", "t", ancilla, herald, waveplate);
                for (const auto &[occ, amp] : k.terms()) {
                    if (occ.in_mode(0) != 1 || occ.in_mode(1) != 1) {
                        throw ContractViolation("heralded CNOT branch leaks photons between control and target");
                    }
                    m(2 * occ.counts[1] + occ.counts[3], 2 * pc + pt) += amp;
                }
            }
        }
        return m;
    };

    for (const auto &pre : ops) {
        CnotCorrectionTable table;
        table.target_waveplate = pre.tag;
        bool all_found = true;
        for (size_t h = 0; h < kCnotHeralds.size() && all_found; h++) {
            Eigen::Matrix4cd m = heralded_map(kCnotHeralds[h], pre.tag);
            bool found = false;
            for (const auto &uc : ops) {
                for (const auto &ut : ops) {
                    Eigen::Matrix4cd k = kron(uc.matrix, ut.matrix) * m;
                    Amplitude lambda = (cnot.adjoint() * k).trace() / 4.0;
                    if (std::abs(lambda) > 1e-9 && (k - lambda * cnot).cwiseAbs().maxCoeff() < 1e-9) {
                        table.entries[h] = {kCnotHeralds[h], uc.tag, ut.tag};
                        found = true;
                        break;
                    }
                }
                if (found) {
                    break;
                }
            }
            all_found = found;
        }
        if (all_found) {
            return table;
        }
    }
    throw ContractViolation("no target waveplate makes the heralded circuit locally equivalent to CNOT");
}

std::vector<HeraldOutcome> pittman_cnot(
    const MixedState &state, std::string_view control, std::string_view target, const GunParams &ancilla, double eta,
    const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    require_probability(ancilla.p_s, "p_s");
    const ModeRegistry &reg = state.registry();
    if (reg.mode(control).frequency != ancilla.freq_a || reg.mode(target).frequency != ancilla.freq_b) {
        throw FrequencyMismatch(
            "CNOT ancilla emits (" + ancilla.freq_a + ", " + ancilla.freq_b + ") but control and target are tagged (" +
            reg.mode(control).frequency + ", " + reg.mode(target).frequency + ")");
    }
    const auto &table_all = cnot_correction_table();
    const auto &table = table_all.entries;
    const std::string c_anc = std::string(control) + "~anc";
    const std::string t_anc = std::string(target) + "~anc";

    std::array<Accumulator, 4> accepted;
    for (const auto &branch : state.branches()) {
        require_single_photon(branch.state, control, "CNOT control");
        require_single_photon(branch.state, target, "CNOT target");
        for (size_t h = 0; h < table.size(); h++) {
            FockState k =
                cnot_heralded_branch(branch.state, control, target, ancilla, table[h].herald, table_all.target_waveplate);
            double w = k.norm_squared();
            double p = branch.weight * ancilla.p_s * eta * eta * w;
            if (p <= 0) {
                continue;
            }
            FockState post = k.scaled(1.0 / std::sqrt(w));
            post = apply_local_unitary(post, control, local_op_matrix(table[h].control_tag));
            post = apply_local_unitary(post, target, local_op_matrix(table[h].target_tag));
            accepted[h].add(p, std::move(post));
        }
    }

    std::vector<HeraldOutcome> out;
    double total = 0;
    for (size_t h = 0; h < table.size(); h++) {
        if (accepted[h].probability <= 0) {
            continue;
        }
        HeraldOutcome o;
        o.success = true;
        o.branch_probability = accepted[h].probability;
        total += o.branch_probability;
        DetectorRecord d1{t_anc, true, SplitterBasis::Linear, table[h].herald.d1, eta};
        DetectorRecord d2{c_anc, true, SplitterBasis::Circular, table[h].herald.d2, eta};
        o.records = {d1, d2};
        o.post_state = accepted[h].finish();
        o.corrections_applied = {{std::string(control), table[h].control_tag}, {std::string(target), table[h].target_tag}};
        out.push_back(std::move(o));
    }
    if (total < 1) {
        HeraldOutcome fail;
        fail.branch_probability = 1 - total;
        out.push_back(std::move(fail));
    }
    return policy.resolve(std::move(out), [](const HeraldOutcome &o) { return o.branch_probability; });
}

std::vector<HeraldOutcome> qnd_presence(
    const MixedState &state, std::string_view mode, double eta, const QndModel &model, const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    require_probability(model.p_qnd, "p_qnd");
    require_probability(model.gun_p_s, "p_s");
    const double herald = model.p_qnd * std::pow(eta, QndModel::kDetectors) * std::pow(model.gun_p_s, QndModel::kGuns);

    Accumulator present;
    Accumulator absent;
    for (const auto &branch : state.branches()) {
        if (branch.state.max_photons_in_mode(mode) > 1) {
            throw UnsupportedInput("presence check supports at most one photon in '" + std::string(mode) + "'");
        }
        FockState one = project_photon_number(branch.state, mode, 1);
        FockState zero = project_photon_number(branch.state, mode, 0);
        double w1 = one.norm_squared();
        double w0 = zero.norm_squared();
        if (w1 > 0 && herald > 0) {
            present.add(branch.weight * herald * w1, one.scaled(1.0 / std::sqrt(w1)));
        }
        if (w1 > 0 && herald < 1) {
            absent.add(branch.weight * (1 - herald) * w1, one.scaled(1.0 / std::sqrt(w1)));
        }
        if (w0 > 0) {
            absent.add(branch.weight * w0, zero.scaled(1.0 / std::sqrt(w0)));
        }
    }
    std::vector<HeraldOutcome> out;
    if (present.probability > 0) {
        HeraldOutcome o;
        o.success = true;
        o.branch_probability = present.probability;
        o.post_state = present.finish();
        out.push_back(std::move(o));
    }
    if (absent.probability > 0) {
        HeraldOutcome o;
        o.success = false;
        o.branch_probability = absent.probability;
        o.post_state = absent.finish();
        out.push_back(std::move(o));
    }
    return policy.resolve(std::move(out), [](const HeraldOutcome &o) { return o.branch_probability; });
}

const char *bell_outcome_name(BellOutcome outcome) {
    switch (outcome) {
        case BellOutcome::PsiPlus:
            return "psi+";
        case BellOutcome::PsiMinus:
            return "psi-";
        case BellOutcome::Fail:
            return "fail";
    }
    return "?";
}

namespace {

BellOutcome classify(const DetectorRecord &a, const DetectorRecord &b) {
    if (a.resolved_pol && b.resolved_pol && *a.resolved_pol != *b.resolved_pol) {
        return BellOutcome::PsiMinus;
    }
    if ((a.double_click() && !b.clicked) || (!a.clicked && b.double_click())) {
        return BellOutcome::PsiPlus;
    }
    return BellOutcome::Fail;
}

std::string record_key(const DetectorRecord &r) {
    if (!r.clicked) {
        return "-";
    }
    return r.resolved_pol ? resolved_name(*r.resolved_pol) : "HV";
}

}  // namespace

std::vector<BellAnalysis> bell_analyzer(
    const MixedState &state, std::string_view mode_a, std::string_view mode_b, double eta,
    const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    const ModeRegistry &reg = state.registry();
    if (reg.mode(mode_a).frequency != reg.mode(mode_b).frequency) {
        throw FrequencyMismatch(
            "Bell analyzer inputs '" + std::string(mode_a) + "' (" + reg.mode(mode_a).frequency + ") and '" +
            std::string(mode_b) + "' (" + reg.mode(mode_b).frequency + ") carry different frequency tags");
    }
    std::map<std::string, std::pair<BellOutcome, Accumulator>> patterns;
    double failed = 0;
    for (const auto &branch : state.branches()) {
        require_single_photon(branch.state, mode_a, "Bell analyzer");
        require_single_photon(branch.state, mode_b, "Bell analyzer");
        FockState mixed = apply_beam_splitter(branch.state, mode_a, mode_b);
        for (const auto &da : detect(mixed, mode_a, SplitterBasis::Linear, eta, SamplingPolicy::exhaustive())) {
            for (const auto &db : detect(da.post, mode_b, SplitterBasis::Linear, eta, SamplingPolicy::exhaustive())) {
                double p = branch.weight * da.probability * db.probability;
                BellOutcome outcome = classify(da.record, db.record);
                if (outcome == BellOutcome::Fail) {
                    failed += p;
                    continue;
                }
                auto key = record_key(da.record) + "|" + record_key(db.record);
                auto &slot = patterns.try_emplace(key, outcome, Accumulator{}).first->second;
                slot.second.records = {da.record, db.record};
                for (const auto &c : db.post.branches()) {
                    slot.second.add(p * c.weight, c.state);
                }
            }
        }
    }
    std::vector<BellAnalysis> out;
    for (auto &[key, entry] : patterns) {
        HeraldOutcome h;
        h.success = true;
        h.branch_probability = entry.second.probability;
        h.records = entry.second.records;
        h.post_state = entry.second.finish();
        out.push_back({entry.first, std::move(h)});
    }
    if (failed > 0) {
        HeraldOutcome h;
        h.branch_probability = failed;
        out.push_back({BellOutcome::Fail, std::move(h)});
    }
    return policy.resolve(std::move(out), [](const BellAnalysis &b) { return b.herald.branch_probability; });
}

}  // namespace qrepeat
