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

#include "qrepeat/cli.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrepeat/gates.h"
#include "qrepeat/sources.h"

namespace qrepeat {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string &v) {
    const char *begin = v.c_str();
    char *end = nullptr;
    double x = std::strtod(begin, &end);
    if (v.empty() || end != begin + v.size() || !std::isfinite(x)) {
        throw ConfigError("'" + v + "' is not a number");
    }
    return x;
}

double parse_probability(const std::string &key, const std::string &v) {
    double x = parse_double(v);
    if (x < 0 || x > 1) {
        throw ConfigError(key + " = " + v + " is outside [0, 1]");
    }
    return x;
}

int64_t parse_int(const std::string &v) {
    int64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("'" + v + "' is not an integer");
    }
    return x;
}

uint64_t parse_uint(const std::string &v) {
    uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("'" + v + "' is not an unsigned integer");
    }
    return x;
}

bool parse_bool(const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("'" + v + "' is not a boolean");
}

using Setter = std::function<void(RunConfig &, const std::string &key, const std::string &value)>;

const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table{
        {"p_s", [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.p_s = parse_probability(k, v); }},
        {"eta", [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.eta = parse_probability(k, v); }},
        {"gamma",
         [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.gamma = parse_probability(k, v); }},
        {"zeta", [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.zeta = parse_probability(k, v); }},
        {"p_cnot",
         [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.p_cnot = parse_probability(k, v); }},
        {"p_qnd",
         [](RunConfig &c, const std::string &k, const std::string &v) { c.chain.params.p_qnd = parse_probability(k, v); }},
        {"n_links",
         [](RunConfig &c, const std::string &, const std::string &v) {
             int64_t n = parse_int(v);
             if (n < 1 || n > 64) {
                 throw ConfigError("n_links must lie in [1, 64]");
             }
             c.chain.n_links = static_cast<int>(n);
         }},
        {"trials",
         [](RunConfig &c, const std::string &, const std::string &v) {
             int64_t n = parse_int(v);
             if (n < 1) {
                 throw ConfigError("trials must be at least 1");
             }
             c.chain.trials = n;
         }},
        {"seed", [](RunConfig &c, const std::string &, const std::string &v) { c.chain.seed = parse_uint(v); }},
        {"threads",
         [](RunConfig &c, const std::string &, const std::string &v) {
             int64_t n = parse_int(v);
             if (n < 1 || n > 1024) {
                 throw ConfigError("threads must lie in [1, 1024]");
             }
             c.chain.threads = static_cast<int>(n);
         }},
        {"stage",
         [](RunConfig &c, const std::string &, const std::string &v) {
             if (v == "chain") {
                 c.chain.stage = Stage::Chain;
             } else if (v == "purify") {
                 c.chain.stage = Stage::Purify;
             } else if (v == "swap") {
                 c.chain.stage = Stage::Swap;
             } else {
                 throw ConfigError("stage must be chain, purify or swap");
             }
         }},
        {"table1_convention",
         [](RunConfig &c, const std::string &, const std::string &v) { c.chain.table1_convention = parse_bool(v); }},
        {"output_format",
         [](RunConfig &c, const std::string &, const std::string &v) {
             if (v == "json") {
                 c.output_format = OutputFormat::Json;
             } else if (v == "csv") {
                 c.output_format = OutputFormat::Csv;
             } else {
                 throw ConfigError("output_format must be csv or json");
             }
         }},
        {"output_path",
         [](RunConfig &c, const std::string &, const std::string &v) {
             if (v.empty()) {
                 c.output_path.reset();
             } else {
                 c.output_path = v;
             }
         }},
        {"event_log",
         [](RunConfig &c, const std::string &, const std::string &v) {
             if (v.empty()) {
                 c.event_log.reset();
             } else {
                 c.event_log = v;
             }
         }},
        {"paper_style", [](RunConfig &c, const std::string &, const std::string &v) { c.paper_style = parse_bool(v); }},
        {"etas",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             std::vector<double> etas;
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) {
                 etas.push_back(parse_probability(k, trim(item)));
             }
             if (etas.empty()) {
                 throw ConfigError("etas needs at least one value");
             }
             c.etas = std::move(etas);
         }},
    };
    return table;
}

void apply_setting(RunConfig &config, const std::string &key, const std::string &value, const std::string &where) {
    auto it = setters().find(key);
    if (it == setters().end()) {
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
    try {
        it->second(config, key, value);
    } catch (const ConfigError &e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::pair<std::string, std::string> split_assignment(const std::string &line, const std::string &where) {
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
        throw ConfigError(where + ": expected 'key = value'");
    }
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

// ---------------------------------------------------------------- formatting

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json params_json(const NoiseParams &p) {
    return Json{{"p_s", p.p_s}, {"eta", p.eta}, {"gamma", p.gamma}, {"zeta", p.zeta}, {"p_cnot", p.p_cnot}, {"p_qnd", p.p_qnd}};
}

Json tally_json(const ComponentTally &t) {
    return Json{{"guns", t.guns}, {"detectors", t.detectors}, {"purifiers", t.purifiers}, {"swappers", t.swappers}};
}

// ---------------------------------------------------------------- verification suites

struct Check {
    std::string name;
    std::string expected;
    std::string observed;
    bool pass;
};

Check numeric_check(std::string name, double expected, double observed, double tolerance = 1e-12) {
    bool pass = std::abs(expected - observed) <= tolerance;
    return {std::move(name), fmt17(expected), fmt17(observed), pass};
}

std::string pol_word(int c, int t) {
    std::string s;
    s += c ? 'V' : 'H';
    s += t ? 'V' : 'H';
    return s;
}

std::string table_string(const CnotCorrectionTable &t) {
    std::string s = t.target_waveplate;
    for (const auto &e : t.entries) {
        s += std::string(";") + resolved_name(e.herald.d1) + resolved_name(e.herald.d2) + ":" + e.control_tag + "," +
             e.target_tag;
    }
    return s;
}

std::string table_string(const std::vector<SwapCorrection> &t) {
    std::string s;
    for (const auto &e : t) {
        if (!s.empty()) {
            s += ";";
        }
        s += e.pattern + ":" + bell_outcome_name(e.outcome) + ":" + e.tag;
    }
    return s;
}

std::vector<Check> verify_cnot() {
    RegistryPtr reg = ModeRegistry::Builder().add("c", kFreqLow).add("t", kFreqHigh).build();
    GunParams ancilla{1.0, BellKind::PhiPlus, kFreqLow, kFreqHigh};
    auto product = [&](int c, int t) {
        return apply_creation(apply_creation(make_vacuum(reg), "c", static_cast<Pol>(c)), "t", static_cast<Pol>(t));
    };
    std::vector<Check> checks;
    for (int c = 0; c < 2; c++) {
        for (int t = 0; t < 2; t++) {
            double acceptance = 0;
            double fid = 0;
            FockState expected = product(c, c ^ t);
            for (const auto &o : pittman_cnot(MixedState(product(c, t)), "c", "t", ancilla, 1.0, SamplingPolicy::exhaustive())) {
                if (o.success) {
                    acceptance += o.branch_probability;
                    fid += o.branch_probability * fidelity(o.post_state, expected);
                }
            }
            std::string label = pol_word(c, t) + "->" + pol_word(c, c ^ t);
            checks.push_back(numeric_check("acceptance " + label, 0.25, acceptance));
            checks.push_back(numeric_check("fidelity " + label, 1.0, acceptance > 0 ? fid / acceptance : 0));
        }
    }
    FockState plus = (1.0 / std::sqrt(2.0)) * (product(0, 0) + product(1, 0));
    FockState phi = bell_state(reg, "c", "t", BellKind::PhiPlus);
    double acceptance = 0;
    double fid = 0;
    for (const auto &o : pittman_cnot(MixedState(plus), "c", "t", ancilla, 1.0, SamplingPolicy::exhaustive())) {
        if (o.success) {
            acceptance += o.branch_probability;
            fid += o.branch_probability * fidelity(o.post_state, phi);
        }
    }
    checks.push_back(numeric_check("acceptance (H+V)H->phi+", 0.25, acceptance));
    checks.push_back(numeric_check("fidelity (H+V)H->phi+", 1.0, fid / acceptance));
    std::string frozen = table_string(cnot_correction_table());
    std::string derived = table_string(derive_cnot_corrections());
    checks.push_back({"correction table", frozen, derived, frozen == derived});
    return checks;
}

std::vector<Check> verify_pdc() {
    std::vector<Check> checks;
    RegistryPtr reg = ModeRegistry::Builder().add("a", kFreqLow).add("b", kFreqHigh).truncation(4).build();
    Su11Report su = su11_residuals(reg, "a", "b", 4);
    checks.push_back({"su11 max residual", "<1e-12", fmt17(su.max_residual()), su.max_residual() < 1e-12});

    const double eps = 0.3;
    PdcParams params{eps, 3, PdcExpansion::NormalizedSectors};
    FockState psi = pdc_state(reg, "a", "b", params);
    FockState ladder = make_vacuum(reg);
    Amplitude a0 = 0;
    double power = 1;
    for (int n = 0; n <= 3; n++) {
        if (n > 0) {
            ladder = pair_raise(ladder, "a", "b");
            power *= eps;
        }
        FockState unit = pair_normalization(n) * ladder;
        checks.push_back(numeric_check("unit norm n=" + std::to_string(n), 1.0, unit.norm()));
        Amplitude an = inner_product(unit, psi);
        if (n == 0) {
            a0 = an;
        }
        checks.push_back(
            numeric_check("sector ratio n=" + std::to_string(n), power * pair_normalization(n), std::abs(an / a0)));
    }
    return checks;
}

std::vector<Check> verify_bell() {
    std::vector<Check> checks;
    RegistryPtr reg = ModeRegistry::Builder().add("a", kFreqHigh).add("b", kFreqHigh).build();
    auto probability_of = [&](BellKind kind, BellOutcome wanted) {
        double p = 0;
        for (const auto &b : bell_analyzer(
                 MixedState(bell_state(reg, "a", "b", kind)), "a", "b", 1.0, SamplingPolicy::exhaustive())) {
            if (b.outcome == wanted) {
                p += b.herald.branch_probability;
            }
        }
        return p;
    };
    checks.push_back(numeric_check("psi- -> psi-", 1.0, probability_of(BellKind::PsiMinus, BellOutcome::PsiMinus)));
    checks.push_back(numeric_check("psi+ -> psi+", 1.0, probability_of(BellKind::PsiPlus, BellOutcome::PsiPlus)));
    checks.push_back(numeric_check("phi+ -> fail", 1.0, probability_of(BellKind::PhiPlus, BellOutcome::Fail)));
    checks.push_back(numeric_check("phi- -> fail", 1.0, probability_of(BellKind::PhiMinus, BellOutcome::Fail)));
    double uniform = 0;
    for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
        uniform += 0.25 * (1 - probability_of(k, BellOutcome::Fail));
    }
    checks.push_back(numeric_check("uniform identification", 0.5, uniform));
    std::string frozen = table_string(swap_correction_table());
    std::string derived = table_string(derive_swap_corrections());
    checks.push_back({"swap correction table", frozen, derived, frozen == derived});
    return checks;
}

int emit_checks(const std::string &suite, const std::vector<Check> &checks, OutputFormat format, std::ostream &out) {
    bool all = true;
    for (const auto &c : checks) {
        all = all && c.pass;
    }
    if (format == OutputFormat::Csv) {
        out << "check,expected,observed,pass\n";
        for (const auto &c : checks) {
            out << c.name << "," << c.expected << "," << c.observed << "," << (c.pass ? "true" : "false") << "\n";
        }
    } else {
        Json j;
        j["suite"] = suite;
        j["checks"] = Json::array();
        for (const auto &c : checks) {
            j["checks"].push_back(
                Json{{"check", c.name}, {"expected", c.expected}, {"observed", c.observed}, {"pass", c.pass}});
        }
        j["pass"] = all;
        out << j.dump(2) << "\n";
    }
    return all ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- reports

int run_analytic(const RunConfig &config, std::ostream &out) {
    const NoiseParams &p = config.params();
    double with = p_pur(p, true);
    double without = p_pur(p, false);
    double ps = p_swap(p.eta);
    if (config.output_format == OutputFormat::Csv) {
        out << "quantity,convention,value\n";
        out << "p_pur,with_qnd," << fmt9(with) << "\n";
        out << "n_pur,with_qnd," << fmt9(1 / with) << "\n";
        out << "p_pur,without_qnd," << fmt9(without) << "\n";
        out << "n_pur,without_qnd," << fmt9(1 / without) << "\n";
        out << "p_swap,," << fmt9(ps) << "\n";
        out << "n_swap,," << fmt9(1 / ps) << "\n";
        return kExitOk;
    }
    Json j;
    j["params"] = params_json(p);
    j["with_qnd"] = Json{{"p_pur", with}, {"n_pur", 1 / with}};
    j["without_qnd"] = Json{{"p_pur", without}, {"n_pur", 1 / without}};
    j["p_swap"] = ps;
    j["n_swap"] = 1 / ps;
    j["convention_ratio"] = without / with;
    out << j.dump(2) << "\n";
    return kExitOk;
}

const PublishedRow *published_row(double eta) {
    for (const auto &r : published_table1()) {
        if (std::abs(r.eta - eta) < 1e-12) {
            return &r;
        }
    }
    return nullptr;
}

int run_table1(const RunConfig &config, std::ostream &out, std::ostream &err) {
    std::vector<Table1Row> rows = table1(config.params(), config.etas, Convention::WithoutQnd);
    for (auto &r : table1(config.params(), config.etas, Convention::WithQnd)) {
        rows.push_back(r);
    }
    auto shown = [&](double v) { return config.paper_style ? paper_round(v) : v; };
    const double ratio = 1.0 / config.params().p_qnd;
    const std::string mismatch = "convention-mismatch: with_qnd n_pur exceeds the published table by 1/p_qnd = " +
                                 fmt9(ratio);
    if (config.output_format == OutputFormat::Csv) {
        out << "eta,n_pur,n_swap,n_total,convention\n";
        for (const auto &r : rows) {
            out << fmt9(r.eta) << "," << fmt9(shown(r.n_pur)) << "," << fmt9(shown(r.n_swap)) << ","
                << fmt9(shown(r.n_total)) << "," << convention_name(r.convention) << "\n";
        }
        err << "note: " << mismatch << "\n";
        return kExitOk;
    }
    Json j;
    j["columns"] = Json::array({"eta", "n_pur", "n_swap", "n_total", "convention"});
    j["paper_style"] = config.paper_style;
    j["params"] = params_json(config.params());
    j["rows"] = Json::array();
    for (const auto &r : rows) {
        Json row{
            {"eta", r.eta},
            {"n_pur", shown(r.n_pur)},
            {"n_swap", shown(r.n_swap)},
            {"n_total", shown(r.n_total)},
            {"convention", convention_name(r.convention)}};
        const PublishedRow *pub = published_row(r.eta);
        if (pub != nullptr) {
            row["published"] = Json{{"n_pur", pub->n_pur}, {"n_swap", pub->n_swap}, {"n_total_order", pub->n_total_order}};
            row["n_pur_ratio_to_published"] = r.n_pur / pub->n_pur;
        } else {
            row["published"] = nullptr;
            row["n_pur_ratio_to_published"] = nullptr;
        }
        row["annotation"] = r.convention == Convention::WithQnd ? mismatch : "published convention";
        j["rows"].push_back(std::move(row));
    }
    j["convention_ratio"] = ratio;
    j["notes"] = Json::array(
        {mismatch, "the published n_pur at eta=0.3 is 3e7; the formula gives about 4.1e7",
         "n_total at eta=0.3 is two orders above the ~1e7 transistors of a desktop processor"});
    out << j.dump(2) << "\n";
    return kExitOk;
}

Json report_json(const RateReport &r) {
    Json j;
    j["stage"] = stage_name(r.stage);
    j["n_links"] = r.n_links;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["convention"] = convention_name(r.convention);
    j["params"] = params_json(r.params);
    j["successes"] = r.successes;
    j["accepted"] = r.accepted;
    j["success_frequency"] = r.success_frequency;
    j["standard_error"] = r.standard_error;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["analytic_probability"] = r.analytic_probability;
    j["z_score"] = r.z_score;
    j["within_3sigma"] = r.within_3sigma;
    j["accepted_frequency"] = r.accepted_frequency;
    j["mean_accepted_fidelity"] = r.mean_accepted_fidelity;
    j["fidelity_weighted_rate"] = r.fidelity_weighted_rate;
    j["purify_attempts"] = r.purify_attempts;
    j["purify_successes"] = r.purify_successes;
    j["swap_attempts"] = r.swap_attempts;
    j["swap_successes"] = r.swap_successes;
    j["tally_per_trial"] = tally_json(r.tally_per_trial);
    j["attempts_per_pair"] = r.attempts_per_pair;
    j["analytic_attempts_per_pair"] = r.analytic_attempts_per_pair;
    j["expected_components"] = r.expected_components;
    j["analytic_expected_components"] = r.analytic_expected_components;
    return j;
}

int run_simulate(const RunConfig &config, std::ostream &out) {
    std::vector<std::string> log;
    RateReport report = run_chain(config.chain, config.event_log ? &log : nullptr);
    if (config.event_log) {
        std::ofstream f(*config.event_log);
        if (!f) {
            throw ConfigError("cannot write event log '" + *config.event_log + "'");
        }
        f << "trial,station,component,outcome,probability\n";
        for (const auto &l : log) {
            f << l << "\n";
        }
    }
    Json j = report_json(report);
    if (config.output_format == OutputFormat::Csv) {
        std::string header;
        std::string values;
        for (const auto &[k, v] : j.items()) {
            if (v.is_object()) {
                for (const auto &[k2, v2] : v.items()) {
                    header += (header.empty() ? "" : ",") + k + "." + k2;
                    values += (values.empty() ? "" : ",") + v2.dump();
                }
                continue;
            }
            header += (header.empty() ? "" : ",") + k;
            values += (values.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
        }
        out << header << "\n" << values << "\n";
    } else {
        out << j.dump(2) << "\n";
    }
    return report.within_3sigma ? kExitOk : kExitFailure;
}

int run_resources(const RunConfig &config, std::ostream &out) {
    const NoiseParams &p = config.params();
    const int n = config.chain.n_links;
    ComponentTally chain = tally_chain(n);
    if (config.output_format == OutputFormat::Csv) {
        out << "component,guns,detectors,purifiers,swappers\n";
        auto row = [&](const std::string &name, const ComponentTally &t) {
            out << name << "," << t.guns << "," << t.detectors << "," << t.purifiers << "," << t.swappers << "\n";
        };
        row("purifier", tally_purifier());
        row("swapper", tally_swapper());
        row("chain", chain);
        return kExitOk;
    }
    Json j;
    j["purifier"] = tally_json(tally_purifier());
    j["swapper"] = tally_json(tally_swapper());
    j["chain"] = tally_json(chain);
    j["n_links"] = n;
    j["params"] = params_json(p);
    Json expected;
    for (Convention c : {Convention::WithoutQnd, Convention::WithQnd}) {
        double pp = p_pur(p, includes_qnd(c));
        double ps = p_swap(p.eta);
        expected[convention_name(c)] = Json{
            {"n_pur", 1 / pp}, {"n_swap", 1 / ps}, {"expected_components", expected_components(pp, ps, n)}};
    }
    j["expected_components"] = expected;
    out << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

const std::vector<std::string> &subcommands() {
    static const std::vector<std::string> names{
        "analytic", "table1", "verify-cnot", "verify-pdc", "verify-bell", "simulate", "resources"};
    return names;
}

const std::vector<std::pair<std::string, std::string>> &config_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys{
        {"p_s", "0.9"},
        {"eta", "1"},
        {"gamma", "0.5"},
        {"zeta", "0.70710678118654752"},
        {"p_cnot", "0.25"},
        {"p_qnd", "0.125"},
        {"n_links", "1"},
        {"trials", "100000"},
        {"seed", std::string("$") + kSeedEnv + " or 1"},
        {"threads", "1"},
        {"stage", "chain"},
        {"table1_convention", "false"},
        {"output_format", "json"},
        {"output_path", "(stdout)"},
        {"event_log", "(none)"},
        {"paper_style", "false"},
        {"etas", "0.3,0.8,1"},
    };
    return keys;
}

RunConfig parse_config(
    const std::string &subcommand, const std::string &text, const std::string &source,
    const std::vector<std::string> &overrides) {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    RunConfig config;
    config.subcommand = subcommand;
    if (const char *env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        try {
            config.chain.seed = parse_uint(env);
        } catch (const ConfigError &e) {
            throw ConfigError(std::string(kSeedEnv) + ": " + e.what());
        }
    }
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        number++;
        std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        std::string where = source + ":" + std::to_string(number);
        auto [key, value] = split_assignment(body, where);
        apply_setting(config, key, value, where);
    }
    for (const auto &o : overrides) {
        std::string where = "override '" + o + "'";
        auto [key, value] = split_assignment(o, where);
        apply_setting(config, key, value, where);
    }
    try {
        config.chain.validate();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    return config;
}

RunConfig load_config(
    const std::string &subcommand, const std::optional<std::string> &path, const std::vector<std::string> &overrides) {
    std::string text;
    std::string source = "<none>";
    if (path) {
        std::ifstream f(*path);
        if (!f) {
            throw ConfigError("cannot read config file '" + *path + "'");
        }
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
        source = *path;
    }
    return parse_config(subcommand, text, source, overrides);
}

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
    std::ofstream file;
    std::ostream *dest = &out;
    if (config.output_path) {
        file.open(*config.output_path);
        if (!file) {
            err << "error: cannot write '" << *config.output_path << "'\n";
            return kExitConfig;
        }
        dest = &file;
    }
    try {
        const std::string &cmd = config.subcommand;
        if (cmd == "analytic") {
            return run_analytic(config, *dest);
        }
        if (cmd == "table1") {
            return run_table1(config, *dest, err);
        }
        if (cmd == "verify-cnot") {
            return emit_checks("cnot", verify_cnot(), config.output_format, *dest);
        }
        if (cmd == "verify-pdc") {
            return emit_checks("pdc", verify_pdc(), config.output_format, *dest);
        }
        if (cmd == "verify-bell") {
            return emit_checks("bell", verify_bell(), config.output_format, *dest);
        }
        if (cmd == "simulate") {
            return run_simulate(config, *dest);
        }
        if (cmd == "resources") {
            return run_resources(config, *dest);
        }
        err << "error: unknown subcommand '" << cmd << "'\n";
        return kExitConfig;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Linear-optics quantum repeater simulator"};
    app.require_subcommand(1);
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> positional;
    std::string keys_help = "Config keys (default):";
    for (const auto &[k, v] : config_keys()) {
        keys_help += "\n  " + k + " (" + v + ")";
    }
    app.footer(keys_help);
    for (const auto &name : subcommands()) {
        CLI::App *sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "key = value config file");
        sub->add_option("-s,--set", overrides, "key=value override, may repeat");
        sub->add_option("overrides", positional, "key=value overrides");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    std::string name = app.get_subcommands().front()->get_name();
    overrides.insert(overrides.end(), positional.begin(), positional.end());
    RunConfig config;
    try {
        config = load_config(name, config_path, overrides);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return run(config, out, err);
}

}  // namespace qrepeat
