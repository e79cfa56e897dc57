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

#ifndef QREPEAT_SOURCES_H
#define QREPEAT_SOURCES_H

#include <string>
#include <string_view>
#include <vector>

#include "qrepeat/fock.h"

namespace qrepeat {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char *bell_name(BellKind kind);

/// Polarization operation on the second photon turning Phi+ into `kind`.
Eigen::Matrix2cd bell_rotation(BellKind kind);

/// Adds one Bell pair to the (empty) modes `a` and `b` of `state`.
/// Phi+- = (HH +- VV)/sqrt2, Psi+- = (HV +- VH)/sqrt2, first letter on `a`.
FockState add_bell_pair(const FockState &state, std::string_view a, std::string_view b, BellKind kind);
FockState bell_state(RegistryPtr registry, std::string_view a, std::string_view b, BellKind kind);

/// Triggered pair source: one Bell pair with probability p_s, vacuum otherwise.
/// Photon on mode `a` carries `freq_a`, photon on mode `b` carries `freq_b`.
struct GunParams {
    double p_s = 0.9;
    BellKind kind = BellKind::PhiPlus;
    std::string freq_a = "w1";
    std::string freq_b = "w2";
};

struct GunBranch {
    bool fired;
    double probability;
    FockState state;
};

std::vector<GunBranch> fire_gun(
    const FockState &into, std::string_view a, std::string_view b, const GunParams &params,
    const SamplingPolicy &policy);
std::vector<GunBranch> fire_gun(
    RegistryPtr registry, std::string_view a, std::string_view b, const GunParams &params,
    const SamplingPolicy &policy);

/// How the down-converter's pair expansion weighs the unit-normalized n-pair
/// states |n> = N_n (L+)^n |0>, with N_n = 1/sqrt(n!(n+1)!).
enum class PdcExpansion {
    /// |n> carries amplitude N_n eps^n.
    NormalizedSectors,
    /// sum_n N_n (eps L+)^n |0>, so |n> carries eps^n.
    LiteralSeries,
    /// Disentangled exp(eps L+ - eps* L-)|0>: (eps L+)^n / n!, so |n> carries sqrt(n+1) eps^n.
    SqueezedVacuum,
};

const char *expansion_name(PdcExpansion expansion);

struct PdcParams {
    Amplitude epsilon = 0.0;
    int n_max = 2;  ///< highest pair number kept
    PdcExpansion expansion = PdcExpansion::NormalizedSectors;
};

/// 1 / sqrt(n! (n+1)!).
double pair_normalization(int n);

/// Unnormalized amplitudes of the unit n-pair states, n = 0..n_max.
std::vector<Amplitude> pdc_sector_amplitudes(const PdcParams &params);

/// L+ = a_H^dag b_V^dag - a_V^dag b_H^dag.
FockState pair_raise(const FockState &state, std::string_view a, std::string_view b);
/// L- = a_H b_V - a_V b_H.
FockState pair_lower(const FockState &state, std::string_view a, std::string_view b);
/// L0 = (N_a + N_b + 2) / 2.
FockState pair_weight(const FockState &state, std::string_view a, std::string_view b);

/// Normalized truncated down-converter output on modes `a` and `b`.
FockState pdc_state(RegistryPtr registry, std::string_view a, std::string_view b, const PdcParams &params);

struct Su11Residual {
    Occupation basis_state;
    double lower_raise;  ///< |([L-, L+] - 2 L0) psi|
    double weight_raise; ///< |([L0, L+] - L+) psi|
    double weight_lower; ///< |([L0, L-] + L-) psi|
};

struct Su11Report {
    std::vector<Su11Residual> entries;
    double max_residual() const;
};

/// Commutator residuals on every basis state of modes `a`, `b` holding at most
/// n_max - 2 photons in total.
Su11Report su11_residuals(RegistryPtr registry, std::string_view a, std::string_view b, int n_max);

}  // namespace qrepeat

#endif
