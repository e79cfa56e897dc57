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

#include "qrepeat/fock.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace qrepeat {

namespace {

constexpr double kNormTolerance = 1e-12;

double factorial(int n) {
    double r = 1;
    for (int k = 2; k <= n; k++) {
        r *= k;
    }
    return r;
}

void require_same_registry(const FockState &a, const FockState &b, const char *op) {
    if (a.registry_ptr() != b.registry_ptr() && !(a.registry() == b.registry())) {
        throw RegistryError(std::string(op) + ": states live on different mode registries");
    }
}

}  // namespace

char pol_name(Pol p) {
    return p == Pol::H ? 'H' : 'V';
}

// ---------------------------------------------------------------- registry

ModeRegistry::Builder &ModeRegistry::Builder::frequencies(std::vector<std::string> tags) {
    frequencies_ = std::move(tags);
    return *this;
}

ModeRegistry::Builder &ModeRegistry::Builder::add(std::string label, std::string frequency, std::string group) {
    if (group.empty()) {
        group = label;
    }
    modes_.push_back({std::move(label), std::move(frequency), std::move(group)});
    return *this;
}

ModeRegistry::Builder &ModeRegistry::Builder::truncation(int n_max) {
    n_max_ = n_max;
    return *this;
}

ModeRegistry::Builder &ModeRegistry::Builder::prune_threshold(double threshold) {
    prune_threshold_ = threshold;
    return *this;
}

RegistryPtr ModeRegistry::Builder::build() const {
    if (n_max_ < 0 || n_max_ > 255) {
        throw ConfigError("truncation must lie in [0, 255], got " + std::to_string(n_max_));
    }
    if (prune_threshold_ < 0) {
        throw ConfigError("prune threshold must be non-negative");
    }
    auto reg = std::shared_ptr<ModeRegistry>(new ModeRegistry());
    reg->n_max_ = n_max_;
    reg->prune_threshold_ = prune_threshold_;
    reg->frequencies_ = frequencies_;
    if (reg->frequencies_.empty()) {
        // Declared set defaults to the tags in use, in first-seen order.
        for (const auto &m : modes_) {
            if (std::find(reg->frequencies_.begin(), reg->frequencies_.end(), m.frequency) ==
                reg->frequencies_.end()) {
                reg->frequencies_.push_back(m.frequency);
            }
        }
    }
    for (const auto &m : modes_) {
        if (m.label.empty()) {
            throw RegistryError("mode labels must be non-empty");
        }
        if (m.frequency.empty()) {
            throw RegistryError("mode '" + m.label + "' has no frequency tag");
        }
        if (std::find(reg->frequencies_.begin(), reg->frequencies_.end(), m.frequency) == reg->frequencies_.end()) {
            throw RegistryError("mode '" + m.label + "' uses undeclared frequency tag '" + m.frequency + "'");
        }
        if (!reg->index_.emplace(m.label, reg->modes_.size()).second) {
            throw RegistryError("duplicate mode label '" + m.label + "'");
        }
        reg->modes_.push_back(m);
    }
    return reg;
}

bool ModeRegistry::contains(std::string_view label) const {
    return index_.find(std::string(label)) != index_.end();
}

size_t ModeRegistry::index_of(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) {
        throw RegistryError("unknown mode '" + std::string(label) + "'");
    }
    return it->second;
}

std::vector<size_t> ModeRegistry::group_members(std::string_view group) const {
    std::vector<size_t> out;
    for (size_t k = 0; k < modes_.size(); k++) {
        if (modes_[k].group == group) {
            out.push_back(k);
        }
    }
    return out;
}

bool ModeRegistry::operator==(const ModeRegistry &other) const {
    if (modes_.size() != other.modes_.size() || n_max_ != other.n_max_ ||
        prune_threshold_ != other.prune_threshold_) {
        return false;
    }
    for (size_t k = 0; k < modes_.size(); k++) {
        const auto &a = modes_[k];
        const auto &b = other.modes_[k];
        if (a.label != b.label || a.frequency != b.frequency || a.group != b.group) {
            return false;
        }
    }
    return true;
}

RegistryPtr ModeRegistry::merged(const ModeRegistry &a, const ModeRegistry &b) {
    if (a.n_max_ != b.n_max_ || a.prune_threshold_ != b.prune_threshold_) {
        throw RegistryError("cannot merge registries with different engine settings");
    }
    Builder builder;
    std::vector<std::string> tags = a.frequencies_;
    for (const auto &t : b.frequencies_) {
        if (std::find(tags.begin(), tags.end(), t) == tags.end()) {
            tags.push_back(t);
        }
    }
    builder.frequencies(tags).truncation(a.n_max_).prune_threshold(a.prune_threshold_);
    for (const auto &m : a.modes_) {
        builder.add(m.label, m.frequency, m.group);
    }
    for (const auto &m : b.modes_) {
        if (a.contains(m.label)) {
            throw RegistryError("label collision on '" + m.label + "'");
        }
        builder.add(m.label, m.frequency, m.group);
    }
    return builder.build();
}

RegistryPtr ModeRegistry::extended(const ModeRegistry &base, const std::vector<Mode> &extra) {
    Builder builder;
    std::vector<std::string> tags = base.frequencies_;
    for (const auto &m : extra) {
        if (std::find(tags.begin(), tags.end(), m.frequency) == tags.end()) {
            tags.push_back(m.frequency);
        }
    }
    builder.frequencies(tags).truncation(base.n_max_).prune_threshold(base.prune_threshold_);
    for (const auto &m : base.modes_) {
        builder.add(m.label, m.frequency, m.group);
    }
    for (const auto &m : extra) {
        builder.add(m.label, m.frequency, m.group);
    }
    return builder.build();
}

// ---------------------------------------------------------------- occupation

int Occupation::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0);
}

// ---------------------------------------------------------------- state

FockState::FockState(RegistryPtr registry) : registry_(std::move(registry)) {
    if (!registry_) {
        throw RegistryError("state requires a registry");
    }
}

Amplitude FockState::amplitude(const Occupation &occupation) const {
    auto it = terms_.find(occupation);
    return it == terms_.end() ? Amplitude{0} : it->second;
}

void FockState::add(const Occupation &occupation, Amplitude amplitude) {
    if (occupation.counts.size() != registry_->num_slots()) {
        throw RegistryError("occupation has wrong number of slots");
    }
    terms_[occupation] += amplitude;
}

double FockState::norm_squared() const {
    double t = 0;
    for (const auto &[occ, amp] : terms_) {
        t += std::norm(amp);
    }
    return t;
}

double FockState::norm() const {
    return std::sqrt(norm_squared());
}

FockState FockState::normalized() const {
    double n = norm();
    if (n == 0) {
        throw ContractViolation("cannot normalize the zero vector");
    }
    return scaled(1.0 / n);
}

FockState FockState::scaled(Amplitude factor) const {
    FockState out(registry_);
    for (const auto &[occ, amp] : terms_) {
        out.terms_.emplace_hint(out.terms_.end(), occ, amp * factor);
    }
    return out.pruned();
}

FockState FockState::pruned() const {
    FockState out(registry_);
    double threshold = registry_->prune_threshold();
    for (const auto &[occ, amp] : terms_) {
        if (std::abs(amp) >= threshold && amp != Amplitude{0}) {
            out.terms_.emplace_hint(out.terms_.end(), occ, amp);
        }
    }
    return out;
}

FockState &FockState::operator+=(const FockState &other) {
    require_same_registry(*this, other, "add");
    for (const auto &[occ, amp] : other.terms_) {
        terms_[occ] += amp;
    }
    *this = pruned();
    return *this;
}

FockState operator+(FockState a, const FockState &b) {
    a += b;
    return a;
}

FockState operator*(Amplitude factor, const FockState &state) {
    return state.scaled(factor);
}

int FockState::max_photons_in_mode(std::string_view label) const {
    size_t m = registry_->index_of(label);
    int best = 0;
    for (const auto &[occ, amp] : terms_) {
        best = std::max(best, occ.in_mode(m));
    }
    return best;
}

int FockState::max_total_photons() const {
    int best = 0;
    for (const auto &[occ, amp] : terms_) {
        best = std::max(best, occ.total());
    }
    return best;
}

std::string FockState::to_string() const {
    std::string out;
    char buf[64];
    for (const auto &[occ, amp] : terms_) {
        for (size_t m = 0; m < registry_->size(); m++) {
            for (Pol p : {Pol::H, Pol::V}) {
                if (m != 0 || p != Pol::H) {
                    out += ',';
                }
                out += registry_->mode(m).label;
                out += ':';
                out += pol_name(p);
                out += '=';
                out += std::to_string(occ.counts[2 * m + static_cast<size_t>(p)]);
            }
        }
        std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", amp.real(), amp.imag());
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------- mixed

MixedState::MixedState(FockState pure) {
    branches_.push_back({1.0, std::move(pure)});
}

MixedState::MixedState(std::vector<WeightedState> branches) : branches_(std::move(branches)) {
    double total = 0;
    for (const auto &b : branches_) {
        if (b.weight < 0) {
            throw ContractViolation("mixed-state weights must be non-negative");
        }
        total += b.weight;
    }
    if (!branches_.empty() && std::abs(total - 1) > kNormTolerance) {
        throw ContractViolation("mixed-state weights sum to " + std::to_string(total) + ", expected 1");
    }
    for (size_t k = 1; k < branches_.size(); k++) {
        require_same_registry(branches_[0].state, branches_[k].state, "mixed state");
    }
}

const ModeRegistry &MixedState::registry() const {
    if (branches_.empty()) {
        throw ContractViolation("empty mixed state has no registry");
    }
    return branches_[0].state.registry();
}

const RegistryPtr &MixedState::registry_ptr() const {
    if (branches_.empty()) {
        throw ContractViolation("empty mixed state has no registry");
    }
    return branches_[0].state.registry_ptr();
}

double MixedState::total_weight() const {
    double t = 0;
    for (const auto &b : branches_) {
        t += b.weight;
    }
    return t;
}

// ---------------------------------------------------------------- operations

FockState make_vacuum(RegistryPtr registry) {
    if (!registry || registry->size() == 0) {
        throw ConfigError("vacuum requires a non-empty mode registry");
    }
    FockState out(registry);
    out.add(Occupation(registry->num_slots()), 1.0);
    return out;
}

FockState apply_creation(const FockState &state, std::string_view mode, Pol pol) {
    size_t slot = state.registry().slot(mode, pol);
    int n_max = state.registry().n_max();
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        int n = occ.counts[slot];
        if (n + 1 > n_max) {
            throw TruncationError(
                "creation on " + std::string(mode) + ":" + pol_name(pol) + " exceeds truncation n_max=" +
                std::to_string(n_max));
        }
        Occupation next = occ;
        next.counts[slot]++;
        out.add(next, amp * std::sqrt(static_cast<double>(n + 1)));
    }
    return out.pruned();
}

FockState apply_annihilation(const FockState &state, std::string_view mode, Pol pol) {
    size_t slot = state.registry().slot(mode, pol);
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        int n = occ.counts[slot];
        if (n == 0) {
            continue;
        }
        Occupation next = occ;
        next.counts[slot]--;
        out.add(next, amp * std::sqrt(static_cast<double>(n)));
    }
    return out.pruned();
}

FockState apply_slot_transform(const FockState &state, std::span<const size_t> slots, const Eigen::MatrixXcd &u) {
    const size_t k = slots.size();
    if (static_cast<size_t>(u.rows()) != k || static_cast<size_t>(u.cols()) != k) {
        throw ContractViolation("slot transform matrix size does not match slot count");
    }
    const ModeRegistry &reg = state.registry();
    for (size_t s : slots) {
        if (s >= reg.num_slots()) {
            throw RegistryError("slot index out of range");
        }
    }

    // Expand each term as a polynomial in the creation operators of the
    // touched slots: prod_j (a_j^dag)^{n_j} / sqrt(n_j!) |rest>.
    std::map<Occupation, Amplitude> accumulated;
    using Poly = std::map<std::vector<uint8_t>, Amplitude>;
    for (const auto &[occ, amp] : state.terms()) {
        std::vector<uint8_t> in(k);
        double norm = 1;
        bool touched = false;
        for (size_t j = 0; j < k; j++) {
            in[j] = occ.counts[slots[j]];
            norm *= factorial(in[j]);
            touched |= in[j] != 0;
        }
        if (!touched) {
            accumulated[occ] += amp;
            continue;
        }
        Poly poly{{std::vector<uint8_t>(k, 0), amp / std::sqrt(norm)}};
        for (size_t j = 0; j < k; j++) {
            for (int rep = 0; rep < in[j]; rep++) {
                Poly next;
                for (const auto &[m, coef] : poly) {
                    for (size_t i = 0; i < k; i++) {
                        Amplitude uij = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        if (uij == Amplitude{0}) {
                            continue;
                        }
                        auto m2 = m;
                        m2[i]++;
                        next[m2] += coef * uij;
                    }
                }
                poly = std::move(next);
            }
        }
        for (const auto &[m, coef] : poly) {
            double weight = 1;
            Occupation out = occ;
            for (size_t i = 0; i < k; i++) {
                weight *= factorial(m[i]);
                out.counts[slots[i]] = m[i];
            }
            accumulated[out] += coef * std::sqrt(weight);
        }
    }

    FockState result(state.registry_ptr());
    double threshold = std::max(reg.prune_threshold(), 1e-300);
    for (const auto &[occ, amp] : accumulated) {
        if (std::abs(amp) < threshold) {
            continue;
        }
        for (size_t s : slots) {
            if (occ.counts[s] > reg.n_max()) {
                throw TruncationError(
                    "linear-optics transform populates a slot beyond truncation n_max=" + std::to_string(reg.n_max()));
            }
        }
        result.add(occ, amp);
    }
    return result;
}

FockState tensor(const FockState &a, const FockState &b) {
    RegistryPtr reg = ModeRegistry::merged(a.registry(), b.registry());
    FockState out(reg);
    for (const auto &[oa, aa] : a.terms()) {
        for (const auto &[ob, ab] : b.terms()) {
            Occupation o;
            o.counts = oa.counts;
            o.counts.insert(o.counts.end(), ob.counts.begin(), ob.counts.end());
            out.add(o, aa * ab);
        }
    }
    return out.pruned();
}

Amplitude inner_product(const FockState &bra, const FockState &ket) {
    require_same_registry(bra, ket, "inner product");
    Amplitude total = 0;
    const auto &small = bra.terms().size() <= ket.terms().size() ? bra.terms() : ket.terms();
    bool bra_small = &small == &bra.terms();
    for (const auto &[occ, amp] : small) {
        if (bra_small) {
            total += std::conj(amp) * ket.amplitude(occ);
        } else {
            total += std::conj(bra.amplitude(occ)) * amp;
        }
    }
    return total;
}

double fidelity(const FockState &state, const FockState &target) {
    return std::norm(inner_product(target, state));
}

double fidelity(const MixedState &state, const FockState &target) {
    double f = 0;
    for (const auto &b : state.branches()) {
        f += b.weight * fidelity(b.state, target);
    }
    return f;
}

FockState embed(const FockState &state, RegistryPtr target, const std::map<std::string, std::string> &rename) {
    const ModeRegistry &src = state.registry();
    std::vector<long> dest(src.size(), -1);
    for (size_t m = 0; m < src.size(); m++) {
        std::string label = src.mode(m).label;
        auto it = rename.find(label);
        if (it != rename.end()) {
            label = it->second;
        }
        if (target->contains(label)) {
            const Mode &tm = target->mode(label);
            if (tm.frequency != src.mode(m).frequency) {
                throw RegistryError("embedding '" + src.mode(m).label + "' into '" + label +
                                    "' would change its frequency tag");
            }
            dest[m] = static_cast<long>(target->index_of(label));
        }
    }
    FockState out(target);
    for (const auto &[occ, amp] : state.terms()) {
        Occupation o(target->num_slots());
        for (size_t m = 0; m < src.size(); m++) {
            if (dest[m] < 0) {
                if (occ.in_mode(m) != 0) {
                    throw RegistryError("occupied mode '" + src.mode(m).label + "' missing from target registry");
                }
                continue;
            }
            o.counts[2 * dest[m]] = occ.counts[2 * m];
            o.counts[2 * dest[m] + 1] = occ.counts[2 * m + 1];
        }
        out.add(o, amp);
    }
    return out;
}

FockState restrict_to(const FockState &state, RegistryPtr target) {
    for (const auto &m : target->modes()) {
        state.registry().index_of(m.label);
    }
    const ModeRegistry &src = state.registry();
    for (size_t m = 0; m < src.size(); m++) {
        if (target->contains(src.mode(m).label)) {
            continue;
        }
        for (const auto &[occ, amp] : state.terms()) {
            if (occ.in_mode(m) != 0) {
                throw ContractViolation("cannot drop occupied mode '" + src.mode(m).label + "'");
            }
        }
    }
    return embed(state, std::move(target));
}

FockState project_photon_number(const FockState &state, std::string_view mode, int count) {
    size_t m = state.registry().index_of(mode);
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        if (occ.in_mode(m) == count) {
            out.add(occ, amp);
        }
    }
    return out;
}

FockState project_slot(const FockState &state, size_t slot, int count) {
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        if (occ.counts[slot] == count) {
            out.add(occ, amp);
        }
    }
    return out;
}

std::vector<NumberBranch> measure_photon_number(
    const FockState &state, std::string_view mode, const SamplingPolicy &policy) {
    if (std::abs(state.norm_squared() - 1) > kNormTolerance) {
        throw ContractViolation("photon-number measurement requires a normalized state");
    }
    size_t m = state.registry().index_of(mode);
    std::set<int> counts;
    for (const auto &[occ, amp] : state.terms()) {
        counts.insert(occ.in_mode(m));
    }
    std::vector<NumberBranch> branches;
    for (int n : counts) {
        FockState proj = project_photon_number(state, mode, n);
        double p = proj.norm_squared();
        if (p == 0) {
            continue;
        }
        branches.push_back({n, p, proj.scaled(1.0 / std::sqrt(p))});
    }
    return policy.resolve(std::move(branches), [](const NumberBranch &b) { return b.probability; });
}

}  // namespace qrepeat
