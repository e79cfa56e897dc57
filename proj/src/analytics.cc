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

#include "qrepeat/analytics.h"

#include <cmath>

#include "qrepeat/errors.h"

namespace qrepeat {

namespace {

void require_unit(double value, const char *name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError(std::string(name) + " = " + std::to_string(value) + " is outside [0, 1]");
    }
}

}  // namespace

void NoiseParams::validate() const {
    require_unit(p_s, "p_s");
    require_unit(eta, "eta");
    require_unit(gamma, "gamma");
    require_unit(zeta, "zeta");
    require_unit(p_cnot, "p_cnot");
    require_unit(p_qnd, "p_qnd");
}

double p_pur(const NoiseParams &params, bool include_qnd) {
    params.validate();
    double p = std::pow(params.p_s, 6) * std::pow(params.eta, 10) * std::pow(1 - params.gamma, 2) *
               std::pow(params.zeta, 2) * std::pow(params.p_cnot, 2);
    return include_qnd ? p * params.p_qnd : p;
}

double p_swap(double eta) {
    require_unit(eta, "eta");
    return eta * eta / 2;
}

const char *convention_name(Convention convention) {
    return convention == Convention::WithQnd ? "with_qnd" : "without_qnd";
}

bool includes_qnd(Convention convention) {
    return convention == Convention::WithQnd;
}

const std::vector<PublishedRow> &published_table1() {
    static const std::vector<PublishedRow> rows{
        {0.3, 3e7, 20, 1e9},
        {0.8, 2e3, 3, 1e4},
        {1.0, 250, 2, 1e3},
    };
    return rows;
}

std::vector<double> default_table1_etas() {
    return {0.3, 0.8, 1.0};
}

std::vector<Table1Row> table1(const NoiseParams &params, const std::vector<double> &etas, Convention convention) {
    std::vector<Table1Row> rows;
    for (double eta : etas) {
        NoiseParams p = params;
        p.eta = eta;
        double n_pur = 1.0 / p_pur(p, includes_qnd(convention));
        double n_swap = 1.0 / p_swap(eta);
        rows.push_back({eta, n_pur, n_swap, 2 * n_pur * n_swap, convention});
    }
    return rows;
}

double paper_round(double value) {
    if (value == 0 || !std::isfinite(value)) {
        return value;
    }
    double scale = std::pow(10.0, std::floor(std::log10(std::abs(value))));
    return std::round(value / scale) * scale;
}

ComponentTally &ComponentTally::operator+=(const ComponentTally &other) {
    guns += other.guns;
    detectors += other.detectors;
    purifiers += other.purifiers;
    swappers += other.swappers;
    return *this;
}

ComponentTally operator+(ComponentTally a, const ComponentTally &b) {
    a += b;
    return a;
}

ComponentTally operator*(int64_t k, const ComponentTally &t) {
    return {k * t.guns, k * t.detectors, k * t.purifiers, k * t.swappers};
}

ComponentTally tally_purifier() {
    return {6, 10, 1, 0};
}

ComponentTally tally_swapper() {
    return {0, 2, 0, 1};
}

ComponentTally tally_chain(int n_links) {
    if (n_links < 1) {
        throw ConfigError("a chain needs at least one link");
    }
    return static_cast<int64_t>(n_links) * tally_purifier() + static_cast<int64_t>(n_links - 1) * tally_swapper();
}

double expected_components(double p_pur, double p_swap, int n_links) {
    if (n_links < 1) {
        throw ConfigError("a chain needs at least one link");
    }
    return n_links * (1.0 / p_pur) * std::pow(1.0 / p_swap, n_links - 1);
}

}  // namespace qrepeat
