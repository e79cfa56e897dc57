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

#include "qrepeat/sources.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "qrepeat/elements.h"

namespace qrepeat {

const char *bell_name(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus:
            return "phi+";
        case BellKind::PhiMinus:
            return "phi-";
        case BellKind::PsiPlus:
            return "psi+";
        case BellKind::PsiMinus:
            return "psi-";
    }
    return "?";
}

Eigen::Matrix2cd bell_rotation(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus:
            return waveplate::identity();
        case BellKind::PhiMinus:
            return waveplate::z();
        case BellKind::PsiPlus:
            return waveplate::x();
        case BellKind::PsiMinus:
            return waveplate::xz();
    }
    return waveplate::identity();
}

FockState add_bell_pair(const FockState &state, std::string_view a, std::string_view b, BellKind kind) {
    const double s = 1.0 / std::sqrt(2.0);
    FockState hh = apply_creation(apply_creation(state, a, Pol::H), b, Pol::H);
    FockState vv = apply_creation(apply_creation(state, a, Pol::V), b, Pol::V);
    FockState phi_plus = s * (hh + vv);
    if (kind == BellKind::PhiPlus) {
        return phi_plus;
    }
    return apply_local_unitary(phi_plus, b, bell_rotation(kind));
}

FockState bell_state(RegistryPtr registry, std::string_view a, std::string_view b, BellKind kind) {
    return add_bell_pair(make_vacuum(std::move(registry)), a, b, kind);
}

std::vector<GunBranch> fire_gun(
    const FockState &into, std::string_view a, std::string_view b, const GunParams &params,
    const SamplingPolicy &policy) {
    require_probability(params.p_s, "p_s");
    if (params.freq_a == params.freq_b) {
        throw ConfigError("a double-photon gun emits two different frequencies");
    }
    const ModeRegistry &reg = into.registry();
    if (reg.mode(a).frequency != params.freq_a || reg.mode(b).frequency != params.freq_b) {
        throw FrequencyMismatch(
            "gun emits (" + params.freq_a + ", " + params.freq_b + ") but modes are tagged (" + reg.mode(a).frequency +
            ", " + reg.mode(b).frequency + ")");
    }
    if (into.max_photons_in_mode(a) != 0 || into.max_photons_in_mode(b) != 0) {
        throw ContractViolation("gun output modes must be empty");
    }
    std::vector<GunBranch> branches;
    if (params.p_s > 0) {
        branches.push_back({true, params.p_s, add_bell_pair(into, a, b, params.kind)});
    }
    if (params.p_s < 1) {
        branches.push_back({false, 1 - params.p_s, into});
    }
    return policy.resolve(std::move(branches), [](const GunBranch &g) { return g.probability; });
}

std::vector<GunBranch> fire_gun(
    RegistryPtr registry, std::string_view a, std::string_view b, const GunParams &params,
    const SamplingPolicy &policy) {
    return fire_gun(make_vacuum(std::move(registry)), a, b, params, policy);
}

const char *expansion_name(PdcExpansion expansion) {
    switch (expansion) {
        case PdcExpansion::NormalizedSectors:
            return "normalized-sectors";
        case PdcExpansion::LiteralSeries:
            return "literal-series";
        case PdcExpansion::SqueezedVacuum:
            return "squeezed-vacuum";
    }
    return "?";
}

double pair_normalization(int n) {
    double f = 1;
    for (int k = 2; k <= n; k++) {
        f *= k;
    }
    return 1.0 / std::sqrt(f * f * (n + 1));
}

std::vector<Amplitude> pdc_sector_amplitudes(const PdcParams &params) {
    if (!(std::abs(params.epsilon) < 1)) {
        throw DomainError("down-conversion amplitude must satisfy |epsilon| < 1");
    }
    if (params.n_max < 0) {
        throw ConfigError("pair truncation must be non-negative");
    }
    std::vector<Amplitude> out;
    Amplitude power = 1;
    for (int n = 0; n <= params.n_max; n++) {
        switch (params.expansion) {
            case PdcExpansion::NormalizedSectors:
                out.push_back(power * pair_normalization(n));
                break;
            case PdcExpansion::LiteralSeries:
                out.push_back(power);
                break;
            case PdcExpansion::SqueezedVacuum:
                out.push_back(power * std::sqrt(static_cast<double>(n + 1)));
                break;
        }
        power *= params.epsilon;
    }
    return out;
}

FockState pair_raise(const FockState &state, std::string_view a, std::string_view b) {
    FockState hv = apply_creation(apply_creation(state, a, Pol::H), b, Pol::V);
    FockState vh = apply_creation(apply_creation(state, a, Pol::V), b, Pol::H);
    return hv + (-1.0) * vh;
}

FockState pair_lower(const FockState &state, std::string_view a, std::string_view b) {
    FockState hv = apply_annihilation(apply_annihilation(state, a, Pol::H), b, Pol::V);
    FockState vh = apply_annihilation(apply_annihilation(state, a, Pol::V), b, Pol::H);
    return hv + (-1.0) * vh;
}

FockState pair_weight(const FockState &state, std::string_view a, std::string_view b) {
    const ModeRegistry &reg = state.registry();
    size_t ia = reg.index_of(a);
    size_t ib = reg.index_of(b);
    FockState out(state.registry_ptr());
    for (const auto &[occ, amp] : state.terms()) {
        double n = occ.in_mode(ia) + occ.in_mode(ib);
        out.add(occ, amp * (n + 2) / 2.0);
    }
    return out.pruned();
}

FockState pdc_state(RegistryPtr registry, std::string_view a, std::string_view b, const PdcParams &params) {
    std::vector<Amplitude> coeffs = pdc_sector_amplitudes(params);
    if (params.n_max > registry->n_max()) {
        throw TruncationError(
            "pair truncation " + std::to_string(params.n_max) + " exceeds engine truncation n_max=" +
            std::to_string(registry->n_max()));
    }
    FockState ladder = make_vacuum(registry);
    FockState out(registry);
    for (int n = 0; n <= params.n_max; n++) {
        if (n > 0) {
            ladder = pair_raise(ladder, a, b);
        }
        out += (coeffs[n] * pair_normalization(n)) * ladder;
    }
    return out.normalized();
}

double Su11Report::max_residual() const {
    double m = 0;
    for (const auto &e : entries) {
        m = std::max({m, e.lower_raise, e.weight_raise, e.weight_lower});
    }
    return m;
}

Su11Report su11_residuals(RegistryPtr registry, std::string_view a, std::string_view b, int n_max) {
    if (n_max < 2) {
        throw ConfigError("commutator check needs n_max >= 2");
    }
    if (registry->n_max() < n_max) {
        throw TruncationError("registry truncation is below the requested n_max");
    }
    const ModeRegistry &reg = *registry;
    std::array<size_t, 4> slots{reg.slot(a, Pol::H), reg.slot(a, Pol::V), reg.slot(b, Pol::H), reg.slot(b, Pol::V)};
    const int budget = n_max - 2;

    Su11Report report;
    std::array<int, 4> c{};
    for (c[0] = 0; c[0] <= budget; c[0]++) {
        for (c[1] = 0; c[0] + c[1] <= budget; c[1]++) {
            for (c[2] = 0; c[0] + c[1] + c[2] <= budget; c[2]++) {
                for (c[3] = 0; c[0] + c[1] + c[2] + c[3] <= budget; c[3]++) {
                    Occupation occ(reg.num_slots());
                    for (int k = 0; k < 4; k++) {
                        occ.counts[slots[k]] = static_cast<uint8_t>(c[k]);
                    }
                    FockState psi(registry);
                    psi.add(occ, 1.0);

                    FockState comm = pair_lower(pair_raise(psi, a, b), a, b) +
                                     (-1.0) * pair_raise(pair_lower(psi, a, b), a, b);
                    FockState r1 = comm + (-2.0) * pair_weight(psi, a, b);

                    FockState w_raise = pair_weight(pair_raise(psi, a, b), a, b) +
                                        (-1.0) * pair_raise(pair_weight(psi, a, b), a, b);
                    FockState r2 = w_raise + (-1.0) * pair_raise(psi, a, b);

                    FockState w_lower = pair_weight(pair_lower(psi, a, b), a, b) +
                                        (-1.0) * pair_lower(pair_weight(psi, a, b), a, b);
                    FockState r3 = w_lower + pair_lower(psi, a, b);

                    report.entries.push_back({occ, r1.norm(), r2.norm(), r3.norm()});
                }
            }
        }
    }
    return report;
}

}  // namespace qrepeat
