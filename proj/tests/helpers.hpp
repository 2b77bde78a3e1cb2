#pragma once

#include "pmc/model.hpp"
#include "pmc/text_format.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

inline std::string models_dir() {
    if (const char* env = std::getenv("MODELS_DIR")) return env;
    return "models";
}

inline pmc::Pmc load_model(const std::string& file) {
    std::ifstream in(models_dir() + "/" + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return pmc::parse_pmc(buf.str());
}

inline pmc::Configuration cfg(int state, std::vector<std::uint64_t> counters) {
    return pmc::Configuration{state, std::move(counters)};
}

// Fig. 1 net: one state, joint consumer w=100, two producers w=1, two
// single-place pumps w=10 (enabled only while their place is non-empty).
inline pmc::Pmc fig1() {
    pmc::Pmc m;
    m.dimension = 2;
    m.name = "fig1";
    m.state_names = {"s"};
    auto add = [&](std::vector<int> delta, pmc::CounterSet zero, std::uint64_t w, std::string label) {
        m.rules.push_back(pmc::Rule{0, std::move(delta), zero, 0, std::move(label), w});
    };
    add({-1, -1}, 0, 100, "mid");
    for (pmc::CounterSet c : {pmc::CounterSet(0), pmc::CounterSet(1), pmc::CounterSet(2), pmc::CounterSet(3)})
        add({1, 0}, c, 1, "p1");
    for (pmc::CounterSet c : {pmc::CounterSet(0), pmc::CounterSet(1), pmc::CounterSet(2), pmc::CounterSet(3)})
        add({0, 1}, c, 1, "p2");
    add({1, 0}, 0, 10, "t1");
    add({1, 0}, 2, 10, "t1"); // zero set {2}
    add({0, 1}, 0, 10, "t2");
    add({0, 1}, 1, 10, "t2"); // zero set {1}
    m.validate();
    return m;
}

// One state, one counter: up-weight wu at positive counters, down-weight wd,
// and an up rule at zero so the walk restarts.
inline pmc::Pmc birth_death(std::uint64_t wu, std::uint64_t wd) {
    pmc::Pmc m;
    m.dimension = 1;
    m.name = "walk";
    m.state_names = {"q"};
    m.rules.push_back(pmc::Rule{0, {1}, 0, 0, "up", wu});
    m.rules.push_back(pmc::Rule{0, {-1}, 0, 0, "down", wd});
    m.rules.push_back(pmc::Rule{0, {1}, 1, 0, "restart", 1});
    m.validate();
    return m;
}

inline pmc::Pmc gambler_up() { return birth_death(2, 1); }
inline pmc::Pmc gambler_down() { return birth_death(1, 2); }

} // namespace testutil
