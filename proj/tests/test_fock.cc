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

#include <gtest/gtest.h>

using namespace qrepeat;

namespace {

RegistryPtr two_modes(int n_max = 4) {
    return ModeRegistry::Builder().add("a", "w1").add("b", "w2").truncation(n_max).build();
}

}  // namespace

TEST(ModeRegistry, slots_follow_mode_order) {
    RegistryPtr reg = two_modes();
    EXPECT_EQ(reg->num_slots(), 4u);
    EXPECT_EQ(reg->slot("a", Pol::H), 0u);
    EXPECT_EQ(reg->slot("a", Pol::V), 1u);
    EXPECT_EQ(reg->slot("b", Pol::H), 2u);
    EXPECT_EQ(reg->slot("b", Pol::V), 3u);
    EXPECT_EQ(reg->mode("b").frequency, "w2");
}

TEST(ModeRegistry, rejects_bad_definitions) {
    EXPECT_THROW(ModeRegistry::Builder().add("a", "w1").add("a", "w1").build(), RegistryError);
    EXPECT_THROW(ModeRegistry::Builder().add("a", "").build(), RegistryError);
    EXPECT_THROW(ModeRegistry::Builder().frequencies({"w1"}).add("a", "w9").build(), RegistryError);
    EXPECT_THROW(two_modes()->index_of("zz"), RegistryError);
    EXPECT_THROW(make_vacuum(ModeRegistry::Builder().build()), ConfigError);
}

TEST(ModeRegistry, merged_and_extended) {
    RegistryPtr a = ModeRegistry::Builder().add("a", "w1").build();
    RegistryPtr b = ModeRegistry::Builder().add("b", "w2", "grp").build();
    RegistryPtr m = ModeRegistry::merged(*a, *b);
    EXPECT_EQ(m->size(), 2u);
    EXPECT_EQ(m->group_members("grp"), std::vector<size_t>{1});
    EXPECT_THROW(ModeRegistry::merged(*a, *a), RegistryError);
    RegistryPtr e = ModeRegistry::extended(*a, {{"c", "w3", ""}});
    EXPECT_EQ(e->mode("c").frequency, "w3");
}

TEST(FockState, creation_and_annihilation_factors) {
    RegistryPtr reg = two_modes();
    FockState s = apply_creation(apply_creation(make_vacuum(reg), "a", Pol::H), "a", Pol::H);
    EXPECT_NEAR(s.norm_squared(), 2.0, 1e-15);
    FockState t = apply_annihilation(s, "a", Pol::H);
    EXPECT_NEAR(t.norm_squared(), 4.0, 1e-14);
    EXPECT_TRUE(apply_annihilation(make_vacuum(reg), "b", Pol::V).empty());
}

TEST(FockState, truncation_overflow_raises) {
    RegistryPtr reg = two_modes(2);
    FockState s = make_vacuum(reg);
    s = apply_creation(s, "a", Pol::H);
    s = apply_creation(s, "a", Pol::H);
    EXPECT_THROW(apply_creation(s, "a", Pol::H), TruncationError);
    EXPECT_NO_THROW(apply_creation(s, "a", Pol::V));
}

TEST(FockState, slot_transform_overflow_raises) {
    RegistryPtr reg = two_modes(1);
    FockState s = apply_creation(apply_creation(make_vacuum(reg), "a", Pol::H), "b", Pol::H);
    Eigen::MatrixXcd u(2, 2);
    const double r = 1 / std::sqrt(2.0);
    u << r, r, r, -r;
    std::array<size_t, 2> slots{reg->slot("a", Pol::H), reg->slot("b", Pol::H)};
    EXPECT_THROW(apply_slot_transform(s, slots, u), TruncationError);
}

TEST(FockState, pruning_threshold) {
    RegistryPtr reg = ModeRegistry::Builder().add("a", "w1").prune_threshold(1e-6).build();
    FockState s = make_vacuum(reg) + 1e-8 * apply_creation(make_vacuum(reg), "a", Pol::H);
    EXPECT_EQ(s.pruned().terms().size(), 1u);
    RegistryPtr keep = ModeRegistry::Builder().add("a", "w1").prune_threshold(0).build();
    FockState t = make_vacuum(keep) + 1e-30 * apply_creation(make_vacuum(keep), "a", Pol::H);
    EXPECT_EQ(t.pruned().terms().size(), 2u);
}

TEST(FockState, inner_product_and_fidelity) {
    RegistryPtr reg = two_modes();
    FockState h = apply_creation(make_vacuum(reg), "a", Pol::H);
    FockState v = apply_creation(make_vacuum(reg), "a", Pol::V);
    FockState d = (1 / std::sqrt(2.0)) * (h + v);
    EXPECT_NEAR(fidelity(d, h), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(inner_product(h, v)), 0.0, 1e-15);
    MixedState mix({{0.5, h}, {0.5, v}});
    EXPECT_NEAR(fidelity(mix, h), 0.5, 1e-15);
}

TEST(FockState, states_on_different_registries_do_not_mix) {
    FockState a = make_vacuum(two_modes());
    FockState b = make_vacuum(ModeRegistry::Builder().add("x", "w1").build());
    EXPECT_THROW(a + b, RegistryError);
    EXPECT_THROW(inner_product(a, b), RegistryError);
}

TEST(FockState, to_string_is_stable) {
    RegistryPtr reg = ModeRegistry::Builder().add("a", "w1").build();
    FockState s = apply_creation(make_vacuum(reg), "a", Pol::V);
    EXPECT_EQ(s.to_string(), "a:H=0,a:V=1 1 0\n");
}

TEST(FockState, tensor_embed_restrict) {
    RegistryPtr ra = ModeRegistry::Builder().add("a", "w1").build();
    RegistryPtr rb = ModeRegistry::Builder().add("b", "w2").build();
    FockState t = tensor(apply_creation(make_vacuum(ra), "a", Pol::H), apply_creation(make_vacuum(rb), "b", Pol::V));
    EXPECT_EQ(t.registry().size(), 2u);
    EXPECT_EQ(t.max_total_photons(), 2);

    RegistryPtr wide = ModeRegistry::Builder().add("x", "w1").add("b", "w2").add("c", "w3").build();
    FockState e = embed(t, wide, {{"a", "x"}});
    EXPECT_EQ(e.max_photons_in_mode("x"), 1);
    EXPECT_EQ(e.max_photons_in_mode("c"), 0);
    EXPECT_THROW(restrict_to(e, rb), ContractViolation);

    RegistryPtr wrong = ModeRegistry::Builder().add("a", "w9").add("b", "w2").build();
    EXPECT_THROW(embed(t, wrong), RegistryError);
}

TEST(Measurement, photon_number_branches_sum_to_one) {
    RegistryPtr reg = two_modes();
    FockState one = apply_creation(make_vacuum(reg), "a", Pol::H);
    FockState two = apply_creation(one, "a", Pol::V);
    FockState psi = (std::sqrt(0.25) * make_vacuum(reg) + std::sqrt(0.75) * two).normalized();
    auto branches = measure_photon_number(psi, "a", SamplingPolicy::exhaustive());
    double total = 0;
    for (const auto &b : branches) {
        total += b.probability;
        EXPECT_NEAR(b.post_state.norm(), 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    ASSERT_EQ(branches.size(), 2u);
    EXPECT_EQ(branches[0].count, 0);
    EXPECT_NEAR(branches[0].probability, 0.25, 1e-12);
}

TEST(Measurement, sampling_is_seeded) {
    RegistryPtr reg = two_modes();
    FockState psi = (make_vacuum(reg) + apply_creation(make_vacuum(reg), "a", Pol::H)).normalized();
    Rng r1(42);
    Rng r2(42);
    for (int k = 0; k < 50; k++) {
        auto b1 = measure_photon_number(psi, "a", SamplingPolicy::sampled(r1));
        auto b2 = measure_photon_number(psi, "a", SamplingPolicy::sampled(r2));
        ASSERT_EQ(b1.size(), 1u);
        EXPECT_EQ(b1[0].count, b2[0].count);
    }
}

TEST(MixedState, weights_must_sum_to_one) {
    FockState v = make_vacuum(two_modes());
    EXPECT_THROW(MixedState({{0.5, v}}), ContractViolation);
    EXPECT_THROW(MixedState({{1.5, v}, {-0.5, v}}), ContractViolation);
    EXPECT_NO_THROW(MixedState({{0.25, v}, {0.75, v}}));
}
