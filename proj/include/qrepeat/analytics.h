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

#ifndef QREPEAT_ANALYTICS_H
#define QREPEAT_ANALYTICS_H

#include <cstdint>
#include <string>
#include <vector>

namespace qrepeat {

/// Device and channel parameters of the repeater.
struct NoiseParams {
    double p_s = 0.9;
    double eta = 1.0;
    double gamma = 0.5;
    double zeta = 0.70710678118654752440;
    double p_cnot = 0.25;
    double p_qnd = 0.125;

    /// Throws DomainError naming the first parameter outside [0, 1].
    void validate() const;
};

/// Purification success probability
///   p_s^6 eta^10 (1 - gamma)^2 zeta^2 p_cnot^2 p_qnd,
/// with the p_qnd factor dropped when `include_qnd` is false.
double p_pur(const NoiseParams &params, bool include_qnd);

/// Swap success probability eta^2 / 2.
double p_swap(double eta);

/// The two ways of turning p_pur into N_pur. Without QND reproduces the
/// published component table; with QND is the literal product formula.
enum class Convention { WithoutQnd, WithQnd };
const char *convention_name(Convention convention);
bool includes_qnd(Convention convention);

struct Table1Row {
    double eta;
    double n_pur;
    double n_swap;
    double n_total;
    Convention convention;
};

/// Published values of the component table, keyed by eta.
struct PublishedRow {
    double eta;
    double n_pur;
    double n_swap;
    double n_total_order;
};
const std::vector<PublishedRow> &published_table1();

std::vector<double> default_table1_etas();

/// n_pur = 1/p_pur, n_swap = 1/p_swap, n_total = 2 n_pur n_swap.
std::vector<Table1Row> table1(const NoiseParams &params, const std::vector<double> &etas, Convention convention);

/// Rounds to one significant figure, the precision of the published table.
double paper_round(double value);

struct ComponentTally {
    int64_t guns = 0;
    int64_t detectors = 0;
    int64_t purifiers = 0;
    int64_t swappers = 0;

    ComponentTally &operator+=(const ComponentTally &other);
    bool operator==(const ComponentTally &) const = default;
};
ComponentTally operator+(ComponentTally a, const ComponentTally &b);
ComponentTally operator*(int64_t k, const ComponentTally &t);

/// Two link sources, two in the QND device, one per CNOT; four QND detectors
/// and three per CNOT.
ComponentTally tally_purifier();
/// Two-fold coincidence of the Bell analyzer.
ComponentTally tally_swapper();
/// One purifier per link and one swapper per repeater node.
ComponentTally tally_chain(int n_links);

/// Expected number of components to deliver one end-to-end pair over
/// `n_links` links: n_links * N_pur * N_swap^(n_links - 1). Equals
/// 2 N_pur N_swap for a single repeater node.
double expected_components(double p_pur, double p_swap, int n_links);

}  // namespace qrepeat

#endif
