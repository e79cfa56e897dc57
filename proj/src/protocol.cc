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

#include "qrepeat/protocol.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <thread>
#include <unordered_map>

namespace qrepeat {

namespace {

const SamplingPolicy kExhaustive = SamplingPolicy::exhaustive();

const std::string &frequency_of(const LinkPair &pair, std::string_view end) {
    return pair.state.registry().mode(end).frequency;
}

// Merges components that agree up to a global phase and renormalizes weights.
MixedState compact(const std::vector<WeightedState> &components) {
    std::vector<WeightedState> out;
    double total = 0;
    for (const auto &c : components) {
        total += c.weight;
        bool merged = false;
        for (auto &o : out) {
            if (fidelity(c.state, o.state) > 1 - 1e-12) {
                o.weight += c.weight;
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back(c);
        }
    }
    for (auto &o : out) {
        o.weight /= total;
    }
    return MixedState(std::move(out));
}

// Product of two mixtures, each moved onto its own renamed modes.
MixedState combine(
    const MixedState &a, RegistryPtr reg_a, const std::map<std::string, std::string> &rename_a, const MixedState &b,
    RegistryPtr reg_b, const std::map<std::string, std::string> &rename_b) {
    std::vector<WeightedState> out;
    for (const auto &x : a.branches()) {
        FockState ex = embed(x.state, reg_a, rename_a);
        for (const auto &y : b.branches()) {
            out.push_back({x.weight * y.weight, tensor(ex, embed(y.state, reg_b, rename_b))});
        }
    }
    return MixedState(std::move(out));
}

std::string serialize(const MixedState &state) {
    std::string out;
    for (const auto &m : state.registry().modes()) {
        out += m.label + "@" + m.frequency + ";";
    }
    char buf[32];
    for (const auto &b : state.branches()) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", b.weight);
        out += buf;
        out += b.state.to_string();
    }
    return out;
}

std::string param_key(std::initializer_list<double> values) {
    std::string out;
    char buf[32];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g|", v);
        out += buf;
    }
    return out;
}

// Weighted components collected for one outcome class.
struct Bucket {
    double probability = 0;
    std::vector<WeightedState> components;
};

struct TableEntry {
    std::string outcome;
    double probability;
    MixedState post;  // empty unless a pair is produced
};

const std::vector<std::string> kPurifyClasses{
    "accepted-HH", "accepted-VV", "antiparallel", "no-coincidence", "cnot-fail", "qnd-fail"};

std::vector<TableEntry> purify_table(
    const LinkPair &pair1, const LinkPair &pair2, double eta, double p_s, double p_qnd) {
    const std::string &f1l = frequency_of(pair1, "left");
    const std::string &f1r = frequency_of(pair1, "right");
    const std::string &f2l = frequency_of(pair2, "left");
    const std::string &f2r = frequency_of(pair2, "right");
    if (f1l == f2l || f1r == f2r) {
        throw FrequencyMismatch("the target pair of a purifier must carry the opposite frequency orientation");
    }
    RegistryPtr reg_c = ModeRegistry::Builder().add("c_l", f1l).add("c_r", f1r).build();
    RegistryPtr reg_t = ModeRegistry::Builder().add("t_l", f2l).add("t_r", f2r).build();
    RegistryPtr out_reg = link_registry(f1l, f1r);
    MixedState input = combine(
        pair1.state, reg_c, {{"left", "c_l"}, {"right", "c_r"}}, pair2.state, reg_t,
        {{"left", "t_l"}, {"right", "t_r"}});

    std::map<std::string, Bucket> buckets;
    QndModel qnd{p_qnd, p_s};
    GunParams anc_left{p_s, BellKind::PhiPlus, f1l, f2l};
    GunParams anc_right{p_s, BellKind::PhiPlus, f1r, f2r};
    for (const auto &q : qnd_presence(input, "c_l", eta, qnd, kExhaustive)) {
        if (!q.success) {
            buckets["qnd-fail"].probability += q.branch_probability;
            continue;
        }
        for (const auto &cl : pittman_cnot(q.post_state, "c_l", "t_l", anc_left, eta, kExhaustive)) {
            double p_cl = q.branch_probability * cl.branch_probability;
            if (!cl.success) {
                buckets["cnot-fail"].probability += p_cl;
                continue;
            }
            for (const auto &cr : pittman_cnot(cl.post_state, "c_r", "t_r", anc_right, eta, kExhaustive)) {
                double p_cr = p_cl * cr.branch_probability;
                if (!cr.success) {
                    buckets["cnot-fail"].probability += p_cr;
                    continue;
                }
                for (const auto &dl : detect(cr.post_state, "t_l", SplitterBasis::Linear, eta, kExhaustive)) {
                    for (const auto &dr : detect(dl.post, "t_r", SplitterBasis::Linear, eta, kExhaustive)) {
                        double p = p_cr * dl.probability * dr.probability;
                        const auto &a = dl.record.resolved_pol;
                        const auto &b = dr.record.resolved_pol;
                        if (!a || !b) {
                            buckets["no-coincidence"].probability += p;
                        } else if (*a != *b) {
                            buckets["antiparallel"].probability += p;
                        } else {
                            Bucket &acc = buckets[*a == ResolvedPol::H ? "accepted-HH" : "accepted-VV"];
                            acc.probability += p;
                            for (const auto &c : dr.post.branches()) {
                                acc.components.push_back(
                                    {p * c.weight, embed(c.state, out_reg, {{"c_l", "left"}, {"c_r", "right"}})});
                            }
                        }
                    }
                }
            }
        }
    }
    std::vector<TableEntry> table;
    for (const auto &name : kPurifyClasses) {
        auto it = buckets.find(name);
        if (it == buckets.end() || it->second.probability <= 0) {
            continue;
        }
        MixedState post = it->second.components.empty() ? MixedState() : compact(it->second.components);
        table.push_back({name, it->second.probability, std::move(post)});
    }
    return table;
}

std::string pattern_key(const std::vector<DetectorRecord> &records) {
    std::string out;
    for (const auto &r : records) {
        if (!out.empty()) {
            out += "|";
        }
        out += !r.clicked ? "-" : r.resolved_pol ? resolved_name(*r.resolved_pol) : "HV";
    }
    return out;
}

struct RawSwap {
    std::string pattern;
    BellOutcome outcome;
    double probability;
    MixedState post;  // uncorrected outer pair, empty on failure
};

std::vector<RawSwap> swap_raw(const LinkPair &left, const LinkPair &right, double eta) {
    if (left.station_right != right.station_left) {
        throw TopologyError(
            "swap needs adjacent pairs: " + std::to_string(left.station_right) +
            " != " + std::to_string(right.station_left));
    }
    const std::string &fa = frequency_of(left, "left");
    const std::string &fc = frequency_of(right, "right");
    RegistryPtr reg_l = ModeRegistry::Builder().add("a", fa).add("m1", frequency_of(left, "right")).build();
    RegistryPtr reg_r = ModeRegistry::Builder().add("m2", frequency_of(right, "left")).add("c", fc).build();
    RegistryPtr out_reg = link_registry(fa, fc);
    MixedState input =
        combine(left.state, reg_l, {{"left", "a"}, {"right", "m1"}}, right.state, reg_r, {{"left", "m2"}, {"right", "c"}});

    std::vector<RawSwap> out;
    for (auto &b : bell_analyzer(input, "m1", "m2", eta, kExhaustive)) {
        if (b.outcome == BellOutcome::Fail) {
            out.push_back({"", b.outcome, b.herald.branch_probability, MixedState()});
            continue;
        }
        MixedState post = b.herald.post_state.map(
            [&](const FockState &s) { return embed(s, out_reg, {{"a", "left"}, {"c", "right"}}); });
        out.push_back({pattern_key(b.herald.records), b.outcome, b.herald.branch_probability, std::move(post)});
    }
    return out;
}

struct SwapEntry {
    BellOutcome outcome;
    double probability;
    MixedState post;
};

std::vector<SwapEntry> swap_table(const LinkPair &left, const LinkPair &right, double eta) {
    const auto &table = swap_correction_table();
    std::map<BellOutcome, Bucket> buckets;
    for (auto &raw : swap_raw(left, right, eta)) {
        Bucket &bucket = buckets[raw.outcome];
        bucket.probability += raw.probability;
        if (raw.outcome == BellOutcome::Fail) {
            continue;
        }
        auto it = std::find_if(table.begin(), table.end(), [&](const SwapCorrection &c) { return c.pattern == raw.pattern; });
        if (it == table.end()) {
            throw ContractViolation("no swap correction for pattern " + raw.pattern);
        }
        Eigen::Matrix2cd u = local_op_matrix(it->tag);
        for (const auto &c : raw.post.branches()) {
            bucket.components.push_back({raw.probability * c.weight, apply_local_unitary(c.state, "right", u)});
        }
    }
    std::vector<SwapEntry> out;
    for (BellOutcome o : {BellOutcome::PsiMinus, BellOutcome::PsiPlus, BellOutcome::Fail}) {
        auto it = buckets.find(o);
        if (it == buckets.end() || it->second.probability <= 0) {
            continue;
        }
        MixedState post = it->second.components.empty() ? MixedState() : compact(it->second.components);
        out.push_back({o, it->second.probability, std::move(post)});
    }
    return out;
}

// Per-thread memo of exhaustive branch tables; sampling draws from them.
template <typename Entry>
const std::vector<Entry> &memo(
    std::unordered_map<std::string, std::vector<Entry>> &cache, const std::string &key,
    const std::function<std::vector<Entry>()> &compute) {
    auto it = cache.find(key);
    if (it == cache.end()) {
        if (cache.size() > 4096) {
            cache.clear();
        }
        it = cache.emplace(key, compute()).first;
    }
    return it->second;
}

std::vector<ClassicalMessage> exchange(StationId a, StationId b, const std::string &payload, int round) {
    return {{a, b, payload, round}, {b, a, payload, round}};
}

}  // namespace

int LinkPair::last_round() const {
    int r = 0;
    for (const auto &m : provenance) {
        r = std::max(r, m.round);
    }
    return r;
}

RegistryPtr link_registry(const std::string &freq_left, const std::string &freq_right) {
    thread_local std::map<std::pair<std::string, std::string>, RegistryPtr> cache;
    auto key = std::make_pair(freq_left, freq_right);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, ModeRegistry::Builder().add("left", freq_left).add("right", freq_right).build()).first;
    }
    return it->second;
}

FockState link_target(RegistryPtr registry) {
    return bell_state(std::move(registry), "left", "right", BellKind::PhiPlus);
}

LinkPair make_link_pair(StationId left, StationId right, MixedState state, bool dephasing_free) {
    LinkPair pair;
    pair.station_left = left;
    pair.station_right = right;
    pair.fidelity_cache = fidelity(state, link_target(state.registry_ptr()));
    pair.state = std::move(state);
    pair.dephasing_free = dephasing_free;
    return pair;
}

GunParams link_source(int link_index, double p_s, bool reversed) {
    bool low_left = (link_index % 2 == 0) != reversed;
    GunParams g;
    g.p_s = p_s;
    g.freq_a = low_left ? kFreqLow : kFreqHigh;
    g.freq_b = low_left ? kFreqHigh : kFreqLow;
    return g;
}

std::vector<DistributeBranch> distribute_pair(
    StationId left, StationId right, const GunParams &source, const ChannelParams &channel,
    const SamplingPolicy &policy) {
    RegistryPtr reg = link_registry(source.freq_a, source.freq_b);
    std::vector<DistributeBranch> out;
    for (auto &gun : fire_gun(reg, "left", "right", source, policy)) {
        if (!gun.fired) {
            out.push_back({std::nullopt, gun.probability, "no-fire"});
            continue;
        }
        FockState pair = apply_local_unitary(gun.state, "right", bell_rotation(source.kind).adjoint());
        for (auto &t : channel_transit(pair, "right", channel, policy)) {
            double p = gun.probability * t.probability;
            if (!t.survived) {
                out.push_back({std::nullopt, p, "lost"});
                continue;
            }
            out.push_back({make_link_pair(left, right, std::move(t.post), !t.dephased), p, t.dephased ? "dephased" : "clean"});
        }
    }
    return out;
}

std::vector<PurifyBranch> purify(
    const LinkPair &pair1, const LinkPair &pair2, const NoiseParams &params, const SamplingPolicy &policy,
    bool include_qnd) {
    params.validate();
    if (pair1.station_left != pair2.station_left || pair1.station_right != pair2.station_right) {
        throw TopologyError("purification needs two pairs spanning the same stations");
    }
    double p_qnd = include_qnd ? params.p_qnd : 1.0;
    thread_local std::unordered_map<std::string, std::vector<TableEntry>> cache;
    std::string key = serialize(pair1.state) + "#" + serialize(pair2.state) + "#" + param_key({params.eta, params.p_s, p_qnd});
    const auto &table = memo<TableEntry>(
        cache, key, [&] { return purify_table(pair1, pair2, params.eta, params.p_s, p_qnd); });

    const int round = std::max(pair1.last_round(), pair2.last_round()) + 1;
    std::vector<PurifyBranch> out;
    for (const auto &e : table) {
        PurifyBranch b;
        b.probability = e.probability;
        b.outcome = e.outcome;
        b.tally = tally_purifier();
        b.messages = exchange(pair1.station_left, pair1.station_right, "purify:" + e.outcome, round);
        if (!e.post.empty()) {
            LinkPair p = make_link_pair(
                pair1.station_left, pair1.station_right, e.post, pair1.dephasing_free && pair2.dephasing_free);
            p.provenance = pair1.provenance;
            p.provenance.insert(p.provenance.end(), pair2.provenance.begin(), pair2.provenance.end());
            p.provenance.insert(p.provenance.end(), b.messages.begin(), b.messages.end());
            b.pair = std::move(p);
        }
        out.push_back(std::move(b));
    }
    return policy.resolve(std::move(out), [](const PurifyBranch &b) { return b.probability; });
}

// Frozen output of derive_swap_corrections(); protocol tests re-derive and compare.
const std::vector<SwapCorrection> &swap_correction_table() {
    static const std::vector<SwapCorrection> table{
        {"-|HV", BellOutcome::PsiPlus, "X"},
        {"HV|-", BellOutcome::PsiPlus, "X"},
        {"H|V", BellOutcome::PsiMinus, "X.Z"},
        {"V|H", BellOutcome::PsiMinus, "X.Z"},
    };
    return table;
}

std::vector<SwapCorrection> derive_swap_corrections() {
    RegistryPtr reg_l = link_registry(link_source(0, 1).freq_a, link_source(0, 1).freq_b);
    RegistryPtr reg_r = link_registry(link_source(1, 1).freq_a, link_source(1, 1).freq_b);
    LinkPair left = make_link_pair(0, 1, MixedState(link_target(reg_l)));
    LinkPair right = make_link_pair(1, 2, MixedState(link_target(reg_r)));
    std::vector<SwapCorrection> out;
    for (const auto &raw : swap_raw(left, right, 1.0)) {
        if (raw.outcome == BellOutcome::Fail) {
            continue;
        }
        FockState target = link_target(raw.post.registry_ptr());
        bool found = false;
        for (const auto &op : clifford_ops()) {
            MixedState fixed = raw.post.map([&](const FockState &s) { return apply_local_unitary(s, "right", op.matrix); });
            if (fidelity(fixed, target) > 1 - 1e-12) {
                out.push_back({raw.pattern, raw.outcome, op.tag});
                found = true;
                break;
            }
        }
        if (!found) {
            throw ContractViolation("no single-photon correction restores Phi+ after pattern " + raw.pattern);
        }
    }
    return out;
}

std::vector<SwapBranch> swap(const LinkPair &left, const LinkPair &right, double eta, const SamplingPolicy &policy) {
    require_probability(eta, "detector efficiency");
    thread_local std::unordered_map<std::string, std::vector<SwapEntry>> cache;
    std::string key = serialize(left.state) + "#" + serialize(right.state) + "#" + param_key({eta}) +
                      std::to_string(left.station_right - right.station_left);
    const auto &table = memo<SwapEntry>(cache, key, [&] { return swap_table(left, right, eta); });

    const int round = std::max(left.last_round(), right.last_round()) + 1;
    const StationId node = left.station_right;
    std::vector<SwapBranch> out;
    for (const auto &e : table) {
        SwapBranch b;
        b.probability = e.probability;
        b.outcome = e.outcome;
        b.tally = tally_swapper();
        std::string payload = std::string("swap:") + bell_outcome_name(e.outcome);
        b.messages = {{node, left.station_left, payload, round}, {node, right.station_right, payload, round}};
        if (!e.post.empty()) {
            LinkPair p = make_link_pair(
                left.station_left, right.station_right, e.post, left.dephasing_free && right.dephasing_free);
            p.provenance = left.provenance;
            p.provenance.insert(p.provenance.end(), right.provenance.begin(), right.provenance.end());
            p.provenance.insert(p.provenance.end(), b.messages.begin(), b.messages.end());
            b.pair = std::move(p);
        }
        out.push_back(std::move(b));
    }
    return policy.resolve(std::move(out), [](const SwapBranch &b) { return b.probability; });
}

const char *stage_name(Stage stage) {
    switch (stage) {
        case Stage::Chain:
            return "chain";
        case Stage::Purify:
            return "purify";
        case Stage::Swap:
            return "swap";
    }
    return "?";
}

void ChainConfig::validate() const {
    if (n_links < 1) {
        throw ConfigError("n_links must be at least 1");
    }
    if (trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    params.validate();
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct TrialResult {
    bool accepted = false;
    bool success = false;
    double fidelity = 0;
    int purify_attempts = 0;
    int purify_successes = 0;
    int swap_attempts = 0;
    int swap_successes = 0;
};

class TrialLog {
  public:
    TrialLog(int64_t trial, std::vector<std::string> *lines) : trial_(trial), lines_(lines) {
    }
    void add(const std::string &station, const char *component, const std::string &outcome, double probability) {
        if (lines_ == nullptr) {
            return;
        }
        char buf[256];
        std::snprintf(
            buf, sizeof(buf), "%lld,%s,%s,%s,%.9g", static_cast<long long>(trial_), station.c_str(), component,
            outcome.c_str(), probability);
        lines_->push_back(buf);
    }

  private:
    int64_t trial_;
    std::vector<std::string> *lines_;
};

std::string station_name(StationId s) {
    return "S" + std::to_string(s);
}

TrialResult run_trial(const ChainConfig &config, int64_t index, std::vector<std::string> *lines) {
    Rng rng(trial_seed(config.seed, static_cast<uint64_t>(index)));
    SamplingPolicy policy = SamplingPolicy::sampled(rng);
    TrialLog log(index, lines);
    const NoiseParams &params = config.params;
    TrialResult r;

    if (config.stage == Stage::Swap) {
        GunParams g0 = link_source(0, 1);
        GunParams g1 = link_source(1, 1);
        LinkPair left = make_link_pair(0, 1, MixedState(link_target(link_registry(g0.freq_a, g0.freq_b))));
        LinkPair right = make_link_pair(1, 2, MixedState(link_target(link_registry(g1.freq_a, g1.freq_b))));
        SwapBranch b = swap(left, right, params.eta, policy).front();
        log.add(station_name(1), "swapper", bell_outcome_name(b.outcome), b.probability);
        r.swap_attempts = 1;
        r.swap_successes = b.pair ? 1 : 0;
        r.accepted = r.success = b.pair.has_value();
        r.fidelity = b.pair ? b.pair->fidelity_cache : 0;
        return r;
    }

    const int n = config.stage == Stage::Purify ? 1 : config.n_links;
    const ChannelParams channel{params.gamma, params.zeta};
    std::vector<std::optional<LinkPair>> links(n);
    for (int k = 0; k < n; k++) {
        std::string source_station = "E" + std::to_string(k);
        DistributeBranch d1 = distribute_pair(k, k + 1, link_source(k, params.p_s), channel, policy).front();
        log.add(source_station, "source", d1.outcome, d1.probability);
        DistributeBranch d2 = distribute_pair(k, k + 1, link_source(k, params.p_s, true), channel, policy).front();
        log.add(source_station, "source", d2.outcome, d2.probability);
        r.purify_attempts++;
        std::string purifier_station = station_name(k) + "-" + station_name(k + 1);
        if (!d1.pair || !d2.pair) {
            log.add(purifier_station, "purifier", "missing-input", 1.0);
            continue;
        }
        PurifyBranch p = purify(*d1.pair, *d2.pair, params, policy, !config.table1_convention).front();
        log.add(purifier_station, "purifier", p.outcome, p.probability);
        if (p.pair) {
            r.purify_successes += p.pair->dephasing_free ? 1 : 0;
            links[k] = std::move(p.pair);
        }
    }

    std::optional<LinkPair> current = std::move(links[0]);
    for (int k = 1; k < n; k++) {
        if (!current || !links[k]) {
            current.reset();
            continue;
        }
        r.swap_attempts++;
        SwapBranch b = swap(*current, *links[k], params.eta, policy).front();
        log.add(station_name(k), "swapper", bell_outcome_name(b.outcome), b.probability);
        if (b.pair) {
            r.swap_successes++;
        }
        current = std::move(b.pair);
    }
    r.accepted = current.has_value();
    r.success = r.accepted && current->dephasing_free;
    r.fidelity = current ? current->fidelity_cache : 0;
    return r;
}

double safe_ratio(int64_t num, int64_t den) {
    return den == 0 ? std::nan("") : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

uint64_t trial_seed(uint64_t seed, uint64_t index) {
    return splitmix64(splitmix64(seed) + index);
}

RateReport run_chain(const ChainConfig &config, std::vector<std::string> *event_log) {
    config.validate();
    const int64_t trials = config.trials;
    std::vector<TrialResult> results(static_cast<size_t>(trials));
    std::vector<std::vector<std::string>> logs(event_log != nullptr ? static_cast<size_t>(trials) : 0);

    const int threads = static_cast<int>(std::min<int64_t>(config.threads, trials));
    std::vector<std::exception_ptr> errors(threads);
    auto worker = [&](int t) {
        try {
            for (int64_t i = t; i < trials; i += threads) {
                results[i] = run_trial(config, i, event_log != nullptr ? &logs[i] : nullptr);
            }
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) {
            pool.emplace_back(worker, t);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    RateReport rep;
    rep.stage = config.stage;
    rep.n_links = config.stage == Stage::Chain ? config.n_links : config.stage == Stage::Purify ? 1 : 2;
    rep.trials = trials;
    rep.seed = config.seed;
    rep.convention = config.table1_convention ? Convention::WithoutQnd : Convention::WithQnd;
    rep.params = config.params;

    double fidelity_sum = 0;
    double accepted_fidelity_sum = 0;
    for (const auto &r : results) {
        rep.successes += r.success;
        rep.accepted += r.accepted;
        rep.purify_attempts += r.purify_attempts;
        rep.purify_successes += r.purify_successes;
        rep.swap_attempts += r.swap_attempts;
        rep.swap_successes += r.swap_successes;
        fidelity_sum += r.fidelity;
        if (r.accepted) {
            accepted_fidelity_sum += r.fidelity;
        }
    }
    if (event_log != nullptr) {
        for (auto &l : logs) {
            event_log->insert(event_log->end(), l.begin(), l.end());
        }
    }

    const double n = static_cast<double>(trials);
    const double f = rep.successes / n;
    rep.success_frequency = f;
    rep.standard_error = std::sqrt(f * (1 - f) / n);
    const double z = 3.0;
    const double denom = 1 + z * z / n;
    const double centre = (f + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(f * (1 - f) / n + z * z / (4 * n * n)) / denom;
    rep.ci_low = std::max(0.0, centre - half);
    rep.ci_high = std::min(1.0, centre + half);

    const bool with_qnd = includes_qnd(rep.convention);
    const double pp = p_pur(config.params, with_qnd);
    const double ps = p_swap(config.params.eta);
    switch (config.stage) {
        case Stage::Swap:
            rep.analytic_probability = ps;
            rep.tally_per_trial = tally_swapper();
            break;
        case Stage::Purify:
            rep.analytic_probability = pp;
            rep.tally_per_trial = tally_purifier();
            break;
        case Stage::Chain:
            rep.analytic_probability = std::pow(pp, config.n_links) * std::pow(ps, config.n_links - 1);
            rep.tally_per_trial = tally_chain(config.n_links);
            break;
    }
    const double p = rep.analytic_probability;
    const double sigma = std::sqrt(p * (1 - p) / n);
    rep.z_score = sigma > 0 ? (f - p) / sigma : (f == p ? 0.0 : INFINITY);
    rep.within_3sigma = std::abs(rep.z_score) <= 3.0;

    rep.accepted_frequency = rep.accepted / n;
    rep.mean_accepted_fidelity = rep.accepted > 0 ? accepted_fidelity_sum / rep.accepted : std::nan("");
    rep.fidelity_weighted_rate = fidelity_sum / n;

    rep.attempts_per_pair = rep.successes > 0 ? n / rep.successes : INFINITY;
    rep.analytic_attempts_per_pair = 1.0 / p;
    if (config.stage == Stage::Swap) {
        rep.expected_components = 1.0 / safe_ratio(rep.swap_successes, rep.swap_attempts);
        rep.analytic_expected_components = 1.0 / ps;
    } else {
        double emp_pur = safe_ratio(rep.purify_successes, rep.purify_attempts);
        double emp_swap = rep.n_links > 1 ? safe_ratio(rep.swap_successes, rep.swap_attempts) : 1.0;
        rep.expected_components = expected_components(emp_pur, emp_swap, rep.n_links);
        rep.analytic_expected_components = expected_components(pp, ps, rep.n_links);
    }
    return rep;
}

}  // namespace qrepeat
