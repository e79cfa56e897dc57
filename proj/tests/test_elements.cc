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

#include <gtest/gtest.h>
#include <random>

#include "dense_oracle.h"

using namespace qrepeat;

namespace {

RegistryPtr ports(const char *fa = "w1", const char *fb = "w1", int n_max = 4) {
    return ModeRegistry::Builder().add("a", fa).add("b", fb).truncation(n_max).build();
}

FockState photon(RegistryPtr reg, const char *mode, Pol p) {
    return apply_creation(make_vacuum(std::move(reg)), mode, p);
}

FockState random_state(RegistryPtr reg, int photons, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    FockState out(reg);
    oracle::DenseBasis basis(reg->num_slots(), photons, [&](const oracle::Counts &c) {
        int t = 0;
        for (int x : c) {
            t += x;
        }
        return t == photons;
    });
    for (size_t i = 0; i < basis.dim(); i++) {
        Occupation o(reg->num_slots());
        for (size_t s = 0; s < reg->num_slots(); s++) {
            o.counts[s] = static_cast<uint8_t>(basis.state(i)[s]);
        }
        out.add(o, Amplitude(g(rng), g(rng)));
    }
    return out.normalized();
}

// Dense two-port oracle comparison for a 4x4 single-photon transform on slots 0..3.
void expect_matches_oracle(const FockState &in, const FockState &out, const Eigen::MatrixXcd &u, int photons) {
    oracle::DenseBasis basis(4, photons, [&](const oracle::Counts &c) { return c[0] + c[1] + c[2] + c[3] == photons; });
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
    for (const auto &[occ, amp] : in.terms()) {
        v(basis.index({occ.counts[0], occ.counts[1], occ.counts[2], occ.counts[3]})) = amp;
    }
    Eigen::VectorXcd w = oracle::passive_unitary(basis, u) * v;
    for (size_t i = 0; i < basis.dim(); i++) {
        const auto &c = basis.state(i);
        Occupation o(4);
        for (int s = 0; s < 4; s++) {
            o.counts[s] = static_cast<uint8_t>(c[s]);
        }
        EXPECT_NEAR(std::abs(out.amplitude(o) - w(i)), 0.0, 1e-10);
    }
}

Eigen::MatrixXcd pbs_single_photon(SplitterBasis basis) {
    Eigen::Matrix2cd b = basis == SplitterBasis::Linear ? waveplate::identity() : waveplate::circular_basis();
    Eigen::Vector2cd t = b.col(0);
    Eigen::Vector2cd r = b.col(1);
    Eigen::Matrix2cd pt = t * t.adjoint();
    Eigen::Matrix2cd pr = r * r.adjoint();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u.block(0, 0, 2, 2) = pt;
    u.block(2, 2, 2, 2) = pt;
    u.block(0, 2, 2, 2) = pr;
    u.block(2, 0, 2, 2) = pr;
    return u;
}

}  // namespace

TEST(Waveplates, are_unitary) {
    for (const auto &m : {waveplate::identity(), waveplate::x(), waveplate::z(), waveplate::xz(), waveplate::hadamard(),
                          waveplate::phase_s(), waveplate::circular_basis()}) {
        EXPECT_TRUE(is_unitary(m));
    }
    EXPECT_THROW(apply_local_unitary(make_vacuum(ports()), "a", 2.0 * waveplate::x()), ContractViolation);
}

TEST(Pbs, linear_routes_h_and_v) {
    RegistryPtr reg = ports();
    FockState h = apply_pbs(photon(reg, "a", Pol::H), "a", "b", SplitterBasis::Linear);
    EXPECT_NEAR(fidelity(h, photon(reg, "a", Pol::H)), 1.0, 1e-15);
    FockState v = apply_pbs(photon(reg, "a", Pol::V), "a", "b", SplitterBasis::Linear);
    EXPECT_NEAR(fidelity(v, photon(reg, "b", Pol::V)), 1.0, 1e-15);
}

TEST(Pbs, circular_routes_r_and_l) {
    RegistryPtr reg = ports();
    const double s = 1 / std::sqrt(2.0);
    FockState r = s * (photon(reg, "a", Pol::H) + Amplitude(0, 1) * photon(reg, "a", Pol::V));
    FockState l = s * (photon(reg, "a", Pol::H) + Amplitude(0, -1) * photon(reg, "a", Pol::V));
    EXPECT_NEAR(fidelity(apply_pbs(r, "a", "b", SplitterBasis::Circular), r), 1.0, 1e-15);
    FockState l_out = apply_pbs(l, "a", "b", SplitterBasis::Circular);
    EXPECT_EQ(l_out.max_photons_in_mode("a"), 0);
    EXPECT_EQ(l_out.max_photons_in_mode("b"), 1);
}

TEST(Pbs, is_an_involution_on_random_states) {
    std::mt19937_64 rng(5);
    RegistryPtr reg = ports();
    for (int photons = 1; photons <= 3; photons++) {
        for (auto basis : {SplitterBasis::Linear, SplitterBasis::Circular}) {
            FockState psi = random_state(reg, photons, rng);
            FockState twice = apply_pbs(apply_pbs(psi, "a", "b", basis), "a", "b", basis);
            EXPECT_NEAR(fidelity(twice, psi), 1.0, 1e-12);
            EXPECT_NEAR(std::abs(inner_product(psi, twice) - Amplitude(1)), 0.0, 1e-12);
        }
    }
}

TEST(Pbs, matches_dense_oracle) {
    std::mt19937_64 rng(11);
    RegistryPtr reg = ports();
    for (int photons = 1; photons <= 3; photons++) {
        for (auto basis : {SplitterBasis::Linear, SplitterBasis::Circular}) {
            FockState psi = random_state(reg, photons, rng);
            expect_matches_oracle(psi, apply_pbs(psi, "a", "b", basis), pbs_single_photon(basis), photons);
        }
    }
}

TEST(BeamSplitter, matches_dense_oracle_and_preserves_norm) {
    std::mt19937_64 rng(12);
    RegistryPtr reg = ports();
    for (double t : {0.5, 0.3}) {
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
        Amplitude r(0, std::sqrt(1 - t));
        for (int p = 0; p < 2; p++) {
            u(p, p) = std::sqrt(t);
            u(p + 2, p + 2) = std::sqrt(t);
            u(p + 2, p) = r;
            u(p, p + 2) = r;
        }
        for (int photons = 1; photons <= 3; photons++) {
            FockState psi = random_state(reg, photons, rng);
            FockState out = apply_beam_splitter(psi, "a", "b", t);
            EXPECT_NEAR(out.norm(), 1.0, 1e-12);
            expect_matches_oracle(psi, out, u, photons);
        }
    }
}

TEST(BeamSplitter, hong_ou_mandel_dip) {
    RegistryPtr reg = ports();
    FockState in = apply_creation(photon(reg, "a", Pol::H), "b", Pol::H);
    FockState out = apply_beam_splitter(in, "a", "b");
    Occupation coincidence(4);
    coincidence.counts[0] = 1;
    coincidence.counts[2] = 1;
    EXPECT_NEAR(std::abs(out.amplitude(coincidence)), 0.0, 1e-15);
}

TEST(FrequencySafety, mismatched_ports_raise) {
    RegistryPtr reg = ports("w1", "w2");
    FockState psi = photon(reg, "a", Pol::H);
    EXPECT_THROW(apply_pbs(psi, "a", "b", SplitterBasis::Linear), FrequencyMismatch);
    EXPECT_THROW(apply_beam_splitter(psi, "a", "b"), FrequencyMismatch);
    EXPECT_NO_THROW(apply_pbs(make_vacuum(reg), "a", "b", SplitterBasis::Linear));
}

TEST(Dichroic, routes_by_frequency_tag) {
    RegistryPtr reg = ModeRegistry::Builder()
                          .add("in0", "w1", "in")
                          .add("in1", "w2", "in")
                          .add("lo", "w1")
                          .add("hi", "w2")
                          .build();
    FockState psi = apply_creation(apply_creation(make_vacuum(reg), "in0", Pol::H), "in1", Pol::V);
    FockState out = dichroic_split(psi, "in", "lo", "hi");
    EXPECT_EQ(out.max_photons_in_mode("lo"), 1);
    EXPECT_EQ(out.max_photons_in_mode("hi"), 1);
    EXPECT_EQ(out.max_photons_in_mode("in0"), 0);

    RegistryPtr odd = ModeRegistry::Builder().add("in0", "w3", "in").add("lo", "w1").add("hi", "w2").build();
    EXPECT_THROW(dichroic_split(apply_creation(make_vacuum(odd), "in0", Pol::H), "in", "lo", "hi"), RoutingError);
}

TEST(Detector, click_probabilities_follow_efficiency) {
    RegistryPtr reg = ports();
    const double eta = 0.7;
    auto branches = detect(photon(reg, "a", Pol::H), "a", SplitterBasis::Linear, eta, SamplingPolicy::exhaustive());
    double clicked = 0;
    double total = 0;
    for (const auto &b : branches) {
        total += b.probability;
        if (b.record.clicked) {
            clicked += b.probability;
            ASSERT_TRUE(b.record.resolved_pol.has_value());
            EXPECT_EQ(*b.record.resolved_pol, ResolvedPol::H);
        }
        EXPECT_EQ(b.post.branches().front().state.max_photons_in_mode("a"), 0);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(clicked, eta, 1e-12);
}

TEST(Detector, two_photons_give_a_double_click) {
    RegistryPtr reg = ports();
    FockState hv = apply_creation(photon(reg, "a", Pol::H), "a", Pol::V);
    double double_click = 0;
    for (const auto &b : detect(hv, "a", SplitterBasis::Linear, 0.5, SamplingPolicy::exhaustive())) {
        if (b.record.double_click()) {
            double_click += b.probability;
        }
    }
    EXPECT_NEAR(double_click, 0.25, 1e-12);
}

TEST(Detector, circular_basis_resolves_r) {
    RegistryPtr reg = ports();
    FockState r = (1 / std::sqrt(2.0)) * (photon(reg, "a", Pol::H) + Amplitude(0, 1) * photon(reg, "a", Pol::V));
    auto branches = detect(r, "a", SplitterBasis::Circular, 1.0, SamplingPolicy::exhaustive());
    ASSERT_EQ(branches.size(), 1u);
    EXPECT_EQ(*branches[0].record.resolved_pol, ResolvedPol::R);
}

TEST(Channel, transit_branches) {
    RegistryPtr reg = ports("w1", "w2");
    FockState pair = apply_creation(photon(reg, "a", Pol::H), "b", Pol::H);
    ChannelParams ch{0.5, std::sqrt(0.5)};
    double total = 0;
    for (const auto &b : channel_transit(pair, "b", ch, SamplingPolicy::exhaustive())) {
        total += b.probability;
        if (!b.survived) {
            EXPECT_NEAR(b.probability, 1 - std::sqrt(0.5), 1e-15);
        } else if (b.dephased) {
            EXPECT_NEAR(b.probability, std::sqrt(0.5) * 0.5, 1e-15);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_THROW(channel_transit(make_vacuum(reg), "b", ch, SamplingPolicy::exhaustive()), ContractViolation);
    EXPECT_THROW(channel_transit(pair, "b", ChannelParams{1.5, 1}, SamplingPolicy::exhaustive()), DomainError);
}
