#pragma once

#include "pmc/errors.hpp"
#include "pmc/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace pmc {

constexpr const char* kTauLabel = "tau";

// Zero-test sets and stopping-criterion members are bitmasks over counters;
// bit (i-1) stands for counter i (1-based in the surface syntax).
using CounterSet = std::uint64_t;

inline bool set_contains(CounterSet s, int counter_1based) {
    return (s >> (counter_1based - 1)) & 1u;
}
inline CounterSet full_set(int d) {
    return d >= 64 ? ~CounterSet(0) : ((CounterSet(1) << d) - 1);
}

struct Rule {
    int src = 0;
    std::vector<int> delta;      // entries in {-1,0,1}, length d
    CounterSet zero_test = 0;    // exact zero-set required to fire
    int dst = 0;
    std::string label = kTauLabel;
    std::uint64_t weight = 1;
};

enum class PmcKind { general, pvass };

struct Configuration {
    int state = 0;
    std::vector<std::uint64_t> counters;

    bool operator==(const Configuration& o) const {
        return state == o.state && counters == o.counters;
    }
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const {
        std::size_t h = std::hash<int>()(c.state);
        for (auto v : c.counters) h = h * 1099511628211ull + std::hash<std::uint64_t>()(v);
        return h;
    }
};

// A probabilistic multi-counter automaton. States are indexed densely; the
// surface names live in `state_names`. Rules keep their input order, which
// every downstream analysis treats as the deterministic tie-break order.
struct Pmc {
    int dimension = 1;
    std::vector<std::string> state_names;
    std::vector<Rule> rules;
    PmcKind kind = PmcKind::general;
    std::string name;

    int state_count() const { return static_cast<int>(state_names.size()); }

    int state_index(const std::string& name) const {
        for (int i = 0; i < state_count(); ++i)
            if (state_names[i] == name) return i;
        throw ValidationError("unknown state: " + name);
    }

    void validate() const;
};

inline void Pmc::validate() const {
    if (dimension < 1 || dimension > 63) throw ValidationError("dimension must be in [1,63]");
    if (state_names.empty()) throw ValidationError("model has no states");
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const Rule& rule = rules[r];
        std::string where = "rule #" + std::to_string(r + 1);
        if (rule.src < 0 || rule.src >= state_count() || rule.dst < 0 || rule.dst >= state_count())
            throw ValidationError(where + ": state index out of range");
        if (static_cast<int>(rule.delta.size()) != dimension)
            throw ValidationError(where + ": delta length does not match dimension");
        for (int x : rule.delta)
            if (x < -1 || x > 1) throw ValidationError(where + ": delta entry outside {-1,0,1}");
        if (rule.zero_test & ~full_set(dimension))
            throw ValidationError(where + ": zero-test index out of range");
        if (rule.weight == 0) throw ValidationError(where + ": weight must be positive");
    }
    if (kind == PmcKind::pvass) {
        // Every (src, delta, dst, label, weight) group must carry all 2^d zero-test variants.
        struct Key {
            int src, dst;
            std::vector<int> delta;
            std::string label;
            std::uint64_t weight;
            bool operator==(const Key& o) const {
                return src == o.src && dst == o.dst && delta == o.delta && label == o.label &&
                       weight == o.weight;
            }
        };
        std::vector<std::pair<Key, std::vector<CounterSet>>> groups;
        for (const Rule& rule : rules) {
            Key k{rule.src, rule.dst, rule.delta, rule.label, rule.weight};
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == k; });
            if (it == groups.end()) groups.push_back({k, {rule.zero_test}});
            else it->second.push_back(rule.zero_test);
        }
        std::size_t expect = std::size_t(1) << dimension;
        for (auto& [k, sets] : groups) {
            std::sort(sets.begin(), sets.end());
            sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
            if (sets.size() != expect)
                throw ValidationError("pvass model: rule group lacks some zero-test variants");
        }
    }
}

// ---------------------------------------------------------------------------
// Stopping criteria

struct StoppingCriterion {
    std::vector<CounterSet> members; // non-empty, pairwise incomparable

    static StoppingCriterion all(int d) {
        StoppingCriterion z;
        for (int i = 1; i <= d; ++i) z.members.push_back(CounterSet(1) << (i - 1));
        return z;
    }
    static StoppingCriterion all_minus(int d, int i) {
        StoppingCriterion z;
        for (int j = 1; j <= d; ++j)
            if (j != i) z.members.push_back(CounterSet(1) << (j - 1));
        return z;
    }

    void validate(int d) const {
        if (members.empty()) throw ValidationError("stopping criterion is empty");
        for (CounterSet m : members) {
            if (m == 0) throw ValidationError("stopping criterion has an empty member");
            if (m & ~full_set(d)) throw ValidationError("stopping criterion member out of range");
        }
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < members.size(); ++b)
                if (a != b && (members[a] & members[b]) == members[a])
                    throw ValidationError("stopping criterion members must be incomparable");
    }
};

struct CaseI {};
struct CaseII {
    int free_counter; // 1-based
};
struct Undecidable {
    char reason; // 'a': some member has >= 2 elements, 'b': two counters untouched
};
using CriterionClass = std::variant<CaseI, CaseII, Undecidable>;

inline CriterionClass classify_criterion(int d, const StoppingCriterion& z) {
    z.validate(d);
    for (CounterSet m : z.members)
        if ((m & (m - 1)) != 0) return Undecidable{'a'};
    CounterSet touched = 0;
    for (CounterSet m : z.members) touched |= m;
    CounterSet untouched = full_set(d) & ~touched;
    int missing = 0, missing_index = 0;
    for (int i = 1; i <= d; ++i)
        if (set_contains(untouched, i)) { ++missing; missing_index = i; }
    if (missing == 0) return CaseI{};
    if (missing == 1) return CaseII{missing_index};
    return Undecidable{'b'};
}

// ---------------------------------------------------------------------------
// Operational semantics

inline CounterSet zero_set(const Configuration& cfg) {
    CounterSet s = 0;
    for (std::size_t i = 0; i < cfg.counters.size(); ++i)
        if (cfg.counters[i] == 0) s |= CounterSet(1) << i;
    return s;
}

inline bool criterion_hit(const StoppingCriterion& z, CounterSet zeros) {
    for (CounterSet m : z.members)
        if ((m & zeros) == m) return true;
    return false;
}

// Rules enabled in cfg: exact zero-set match plus no decrement on a zero counter.
inline std::vector<int> enabled_rule_indices(const Pmc& pmc, const Configuration& cfg) {
    CounterSet zeros = zero_set(cfg);
    std::vector<int> out;
    for (std::size_t r = 0; r < pmc.rules.size(); ++r) {
        const Rule& rule = pmc.rules[r];
        if (rule.src != cfg.state || rule.zero_test != zeros) continue;
        bool ok = true;
        for (int i = 0; i < pmc.dimension; ++i)
            if (rule.delta[i] == -1 && cfg.counters[i] == 0) { ok = false; break; }
        if (ok) out.push_back(static_cast<int>(r));
    }
    return out;
}

inline std::vector<Rule> enabled_rules(const Pmc& pmc, const Configuration& cfg) {
    std::vector<Rule> out;
    for (int r : enabled_rule_indices(pmc, cfg)) out.push_back(pmc.rules[r]);
    return out;
}

inline Configuration apply_delta(const Pmc& pmc, const Configuration& cfg, const Rule& rule) {
    Configuration next = cfg;
    next.state = rule.dst;
    for (int i = 0; i < pmc.dimension; ++i) {
        if (rule.delta[i] > 0) {
            if (cfg.counters[i] == std::numeric_limits<std::uint64_t>::max())
                throw OverflowError("counter overflow applying rule delta");
            next.counters[i] = cfg.counters[i] + 1;
        } else if (rule.delta[i] < 0) {
            if (cfg.counters[i] == 0)
                throw PreconditionError("decrement of a zero counter");
            next.counters[i] = cfg.counters[i] - 1;
        }
    }
    return next;
}

struct Transition {
    int rule_index; // -1 for the implicit tau self-loop
    std::string label;
    Configuration target;
    Rational prob;
};

// One entry per enabled rule with probability weight/total; the implicit
// self-loop when nothing is enabled. Probabilities sum to exactly 1.
inline std::vector<Transition> transition_distribution(const Pmc& pmc, const Configuration& cfg) {
    std::vector<int> enabled = enabled_rule_indices(pmc, cfg);
    std::vector<Transition> out;
    if (enabled.empty()) {
        out.push_back(Transition{-1, kTauLabel, cfg, Rational(1)});
        return out;
    }
    Integer total = 0;
    for (int r : enabled) total += pmc.rules[r].weight;
    for (int r : enabled) {
        const Rule& rule = pmc.rules[r];
        out.push_back(Transition{r, rule.label, apply_delta(pmc, cfg, rule),
                                 Rational(Integer(rule.weight), total)});
    }
    return out;
}

// True iff no member of z is covered at any configuration except the last.
// The path must be connected by actual transitions.
inline bool is_safe_prefix(const Pmc& pmc, const std::vector<Configuration>& path,
                           const StoppingCriterion& z) {
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        bool connected = false;
        for (const Transition& t : transition_distribution(pmc, path[k]))
            if (t.target == path[k + 1]) { connected = true; break; }
        if (!connected) throw PreconditionError("disconnected path at step " + std::to_string(k));
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        if (criterion_hit(z, zero_set(path[k]))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Counter forgetting

inline CounterSet project_set(CounterSet s, int forget_1based) {
    CounterSet low = s & ((CounterSet(1) << (forget_1based - 1)) - 1);
    CounterSet high = s >> forget_1based;
    return low | (high << (forget_1based - 1));
}

// Drop counter i (1-based), merging rules whose projections coincide and
// summing their weights. Merged rules lose their labels.
inline Pmc forget_counter(const Pmc& pmc, int i) {
    if (pmc.dimension < 2) throw PreconditionError("forget_counter needs dimension >= 2");
    if (i < 1 || i > pmc.dimension) throw PreconditionError("forget_counter: bad counter index");
    Pmc out;
    out.dimension = pmc.dimension - 1;
    out.state_names = pmc.state_names;
    out.kind = pmc.kind;
    out.name = pmc.name.empty() ? "" : pmc.name + "-minus" + std::to_string(i);
    for (const Rule& rule : pmc.rules) {
        Rule proj;
        proj.src = rule.src;
        proj.dst = rule.dst;
        proj.zero_test = project_set(rule.zero_test, i);
        proj.weight = rule.weight;
        for (int j = 0; j < pmc.dimension; ++j)
            if (j != i - 1) proj.delta.push_back(rule.delta[j]);
        auto same = [&](const Rule& r) {
            return r.src == proj.src && r.dst == proj.dst && r.zero_test == proj.zero_test &&
                   r.delta == proj.delta;
        };
        auto it = std::find_if(out.rules.begin(), out.rules.end(), same);
        if (it == out.rules.end()) out.rules.push_back(proj);
        else it->weight += proj.weight;
    }
    out.validate();
    return out;
}

// Smallest positive single-transition probability over all zero-test classes.
inline Rational min_transition_probability(const Pmc& pmc) {
    // Group rules by (src, zero_test); within a class the probability of a rule
    // is weight / class total, except that decrement-blocking can shrink the
    // class at low counters, which only raises probabilities. The minimum over
    // full classes is therefore the global minimum.
    Rational best(1);
    for (int s = 0; s < pmc.state_count(); ++s) {
        std::unordered_map<CounterSet, Integer> totals;
        for (const Rule& r : pmc.rules)
            if (r.src == s) totals[r.zero_test] += r.weight;
        for (const Rule& r : pmc.rules) {
            if (r.src != s) continue;
            Rational p(Integer(r.weight), totals[r.zero_test]);
            if (p < best) best = p;
        }
    }
    return best;
}

} // namespace pmc
