#include "pmc/model.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pmc;
using testutil::cfg;

TEST_CASE("classify_criterion recognizes the decidable cases") {
    StoppingCriterion z_all = StoppingCriterion::all(3);
    CHECK(std::holds_alternative<CaseI>(classify_criterion(3, z_all)));

    StoppingCriterion z_minus3 = StoppingCriterion::all_minus(3, 3);
    auto c2 = classify_criterion(3, z_minus3);
    REQUIRE(std::holds_alternative<CaseII>(c2));
    CHECK(std::get<CaseII>(c2).free_counter == 3);

    StoppingCriterion pair{{CounterSet(0b11)}};
    auto ua = classify_criterion(3, pair);
    REQUIRE(std::holds_alternative<Undecidable>(ua));
    CHECK(std::get<Undecidable>(ua).reason == 'a');

    // two untouched counters
    StoppingCriterion sparse{{CounterSet(1)}};
    auto ub = classify_criterion(3, sparse);
    REQUIRE(std::holds_alternative<Undecidable>(ub));
    CHECK(std::get<Undecidable>(ub).reason == 'b');

    // (a) wins the tie-break even when (b) also applies
    StoppingCriterion both{{CounterSet(0b11)}};
    auto tie = classify_criterion(4, both);
    REQUIRE(std::holds_alternative<Undecidable>(tie));
    CHECK(std::get<Undecidable>(tie).reason == 'a');
}

TEST_CASE("classify_criterion rejects malformed criteria") {
    CHECK_THROWS_AS(classify_criterion(2, StoppingCriterion{}), ValidationError);
    CHECK_THROWS_AS(classify_criterion(2, StoppingCriterion{{CounterSet(0)}}), ValidationError);
    // comparable members
    StoppingCriterion cmp{{CounterSet(0b1), CounterSet(0b11)}};
    CHECK_THROWS_AS(classify_criterion(2, cmp), ValidationError);
    // out-of-range index
    StoppingCriterion big{{CounterSet(0b100)}};
    CHECK_THROWS_AS(classify_criterion(2, big), ValidationError);
}

TEST_CASE("zero_set lists exactly the zero counters") {
    CHECK(zero_set(cfg(0, {2, 3})) == CounterSet(0));
    CHECK(zero_set(cfg(0, {0, 5})) == CounterSet(1));
    CHECK(zero_set(cfg(0, {0, 0})) == CounterSet(3));
}

TEST_CASE("enabled_rules on the fig1 net") {
    Pmc m = testutil::fig1();

    auto at_23 = enabled_rule_indices(m, cfg(0, {2, 3}));
    REQUIRE(at_23.size() == 5);
    for (int r : at_23) CHECK(m.rules[r].zero_test == CounterSet(0));

    auto at_05 = enabled_rule_indices(m, cfg(0, {0, 5}));
    REQUIRE(at_05.size() == 3);
    std::vector<std::string> labels;
    for (int r : at_05) labels.push_back(m.rules[r].label);
    CHECK(labels == std::vector<std::string>{"p1", "p2", "t2"});

    // no rule carries the zero-test {1,2} in a model without such rules
    Pmc tiny;
    tiny.dimension = 2;
    tiny.state_names = {"q"};
    tiny.rules.push_back(Rule{0, {1, 1}, 0, 0, "u", 1});
    tiny.validate();
    CHECK(enabled_rules(tiny, cfg(0, {0, 0})).empty());
}

TEST_CASE("enabled_rules blocks decrements on zero counters") {
    // brute-force re-check of the enabledness predicate on fig1 configs
    Pmc m = testutil::fig1();
    for (std::uint64_t a : {0, 1, 2})
        for (std::uint64_t b : {0, 1, 2}) {
            Configuration c = cfg(0, {a, b});
            auto enabled = enabled_rule_indices(m, c);
            for (std::size_t r = 0; r < m.rules.size(); ++r) {
                const Rule& rule = m.rules[r];
                bool expect = rule.zero_test == zero_set(c);
                for (int i = 0; i < 2 && expect; ++i)
                    if (rule.delta[i] == -1 && c.counters[i] == 0) expect = false;
                bool got = std::find(enabled.begin(), enabled.end(), static_cast<int>(r)) != enabled.end();
                CHECK(expect == got);
            }
        }
}

TEST_CASE("transition_distribution normalizes weights exactly") {
    Pmc m = testutil::fig1();
    auto dist = transition_distribution(m, cfg(0, {2, 3}));
    REQUIRE(dist.size() == 5);
    Rational total(0);
    for (const auto& t : dist) total += t.prob;
    CHECK(total == Rational(1));
    CHECK(dist[0].label == "mid");
    CHECK(dist[0].prob == make_rational(100, 122));
    CHECK(dist[1].prob == make_rational(1, 122));
    CHECK(dist[3].prob == make_rational(10, 122));

    // no enabled rule: the tau self-loop with probability 1
    Pmc tiny;
    tiny.dimension = 1;
    tiny.state_names = {"q"};
    tiny.rules.push_back(Rule{0, {1}, 0, 0, kTauLabel, 1});
    tiny.validate();
    auto loop = transition_distribution(tiny, cfg(0, {0}));
    REQUIRE(loop.size() == 1);
    CHECK(loop[0].rule_index == -1);
    CHECK(loop[0].target == cfg(0, {0}));
    CHECK(loop[0].prob == Rational(1));

    // single enabled rule gets probability 1
    auto single = transition_distribution(tiny, cfg(0, {4}));
    REQUIRE(single.size() == 1);
    CHECK(single[0].prob == Rational(1));
    CHECK(single[0].target == cfg(0, {5}));
}

TEST_CASE("transition probabilities sum to one on sampled reachable configs") {
    Pmc m = testutil::fig1();
    std::vector<Configuration> frontier{cfg(0, {1, 1})};
    for (int depth = 0; depth < 4; ++depth) {
        std::vector<Configuration> next;
        for (const auto& c : frontier) {
            Rational sum(0);
            for (const auto& t : transition_distribution(m, c)) {
                sum += t.prob;
                next.push_back(t.target);
            }
            CHECK(sum == Rational(1));
        }
        frontier = std::move(next);
    }
}

TEST_CASE("is_safe_prefix exempts the last configuration") {
    Pmc m = testutil::gambler_down();
    StoppingCriterion z = StoppingCriterion::all(1);

    std::vector<Configuration> ok{cfg(0, {2}), cfg(0, {3}), cfg(0, {2})};
    CHECK(is_safe_prefix(m, ok, z));

    std::vector<Configuration> mid_zero{cfg(0, {1}), cfg(0, {0}), cfg(0, {1})};
    CHECK_FALSE(is_safe_prefix(m, mid_zero, z));

    std::vector<Configuration> end_zero{cfg(0, {2}), cfg(0, {1}), cfg(0, {0})};
    CHECK(is_safe_prefix(m, end_zero, z));

    std::vector<Configuration> gap{cfg(0, {1}), cfg(0, {4})};
    CHECK_THROWS_AS(is_safe_prefix(m, gap, z), PreconditionError);
}

TEST_CASE("forget_counter merges projected rules and sums weights") {
    Pmc m;
    m.dimension = 2;
    m.state_names = {"q", "r"};
    m.rules.push_back(Rule{0, {1, 1}, 0, 1, "a", 3});
    m.rules.push_back(Rule{0, {1, -1}, 0, 1, "b", 4});
    m.rules.push_back(Rule{0, {0, 1}, 0, 0, "c", 5});
    m.validate();

    Pmc f = forget_counter(m, 2);
    REQUIRE(f.dimension == 1);
    REQUIRE(f.rules.size() == 2);
    CHECK(f.rules[0].delta == std::vector<int>{1});
    CHECK(f.rules[0].weight == 7); // 3 + 4 merged
    CHECK(f.rules[1].weight == 5);

    // forgetting a counter no rule touches keeps weights unchanged
    Pmc g = forget_counter(m, 1);
    bool any_merge = false;
    for (const Rule& r : g.rules) any_merge |= (r.weight > 5);
    CHECK_FALSE(any_merge);
    CHECK(g.rules.size() == 3);
}

TEST_CASE("forget_counter preserves outgoing weight per state and zero-test") {
    Pmc m = testutil::fig1();
    Pmc f = forget_counter(m, 1);
    REQUIRE(f.dimension == 1);
    // total weight per (state, projected zero test) is preserved
    for (CounterSet c : {CounterSet(0), CounterSet(1)}) {
        std::uint64_t before = 0, after = 0;
        for (const Rule& r : m.rules)
            if (project_set(r.zero_test, 1) == c) before += r.weight;
        for (const Rule& r : f.rules)
            if (r.zero_test == c) after += r.weight;
        CHECK(before == after);
    }
}

TEST_CASE("counter overflow is a hard error") {
    Pmc m;
    m.dimension = 1;
    m.state_names = {"q"};
    m.rules.push_back(Rule{0, {1}, 0, 0, kTauLabel, 1});
    m.validate();
    Configuration top = cfg(0, {std::numeric_limits<std::uint64_t>::max()});
    CHECK_THROWS_AS(transition_distribution(m, top), OverflowError);
}

TEST_CASE("pvass kind: enabled weights are independent of the zero set") {
    Pmc m;
    m.dimension = 2;
    m.state_names = {"q"};
    for (CounterSet c = 0; c < 4; ++c) {
        m.rules.push_back(Rule{0, {1, 0}, c, 0, "u", 2});
        m.rules.push_back(Rule{0, {0, 1}, c, 0, "v", 3});
    }
    m.kind = PmcKind::pvass;
    m.validate();
    // aside from decrement blocking (none here), the enabled weight multiset
    // does not depend on which counters are zero
    for (auto counters : {std::vector<std::uint64_t>{0, 0}, {0, 3}, {2, 0}, {2, 3}}) {
        auto dist = transition_distribution(m, cfg(0, counters));
        REQUIRE(dist.size() == 2);
        CHECK(dist[0].prob == make_rational(2, 5));
        CHECK(dist[1].prob == make_rational(3, 5));
    }

    // closure violation is rejected
    m.rules.pop_back();
    CHECK_THROWS_AS(m.validate(), ValidationError);
}
