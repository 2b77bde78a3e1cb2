#pragma once

#include "pmc/model.hpp"

#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace pmc {

// Parse failure with a 1-based source location and an expected-token hint.
struct ParseError : std::runtime_error {
    int line;
    int column;
    std::string message;
    std::string expected;

    ParseError(int line_, int col_, std::string msg, std::string expect = "")
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + msg +
                             (expect.empty() ? "" : " (expected " + expect + ")")),
          line(line_), column(col_), message(std::move(msg)), expected(std::move(expect)) {}
};

namespace detail {

// Line-oriented tokenizer. Punctuation [],{},-> are their own tokens; columns
// are 1-based byte offsets into the line.
struct LineLexer {
    const std::string& text;
    int line_no;
    std::size_t pos = 0;

    LineLexer(const std::string& t, int line) : text(t), line_no(line) {}

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    int column() const { return static_cast<int>(pos) + 1; }

    bool done() {
        skip_space();
        return pos >= text.size() || text[pos] == '#';
    }

    std::string next(const std::string& expect) {
        skip_space();
        if (done()) throw ParseError(line_no, column(), "unexpected end of line", expect);
        char c = text[pos];
        if (c == '[' || c == ']' || c == '{' || c == '}' || c == ',') {
            ++pos;
            return std::string(1, c);
        }
        if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '>') {
            pos += 2;
            return "->";
        }
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '[' && text[pos] != ']' && text[pos] != '{' && text[pos] != '}' &&
               text[pos] != ',' && text[pos] != '#')
            ++pos;
        return text.substr(start, pos - start);
    }

    void expect_token(const std::string& tok) {
        skip_space();
        int col = column();
        std::string got = next("'" + tok + "'");
        if (got != tok) throw ParseError(line_no, col, "unexpected token '" + got + "'", "'" + tok + "'");
    }

    long long next_int(const std::string& what) {
        skip_space();
        int col = column();
        std::string tok = next(what);
        try {
            std::size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(line_no, col, "not an integer: '" + tok + "'", what);
        }
    }
};

inline std::vector<int> parse_vec(LineLexer& lex, int dimension) {
    lex.expect_token("[");
    std::vector<int> out;
    while (true) {
        lex.skip_space();
        int col = lex.column();
        long long v = lex.next_int("delta entry");
        if (v < -1 || v > 1)
            throw ParseError(lex.line_no, col, "delta entry outside {-1,0,1}", "-1, 0 or 1");
        out.push_back(static_cast<int>(v));
        std::string tok = lex.next("',' or ']'");
        if (tok == "]") break;
        if (tok != ",")
            throw ParseError(lex.line_no, lex.column(), "unexpected token '" + tok + "'", "',' or ']'");
    }
    if (static_cast<int>(out.size()) != dimension)
        throw ParseError(lex.line_no, lex.column(), "delta has " + std::to_string(out.size()) +
                         " entries, model dimension is " + std::to_string(dimension));
    return out;
}

inline CounterSet parse_set(LineLexer& lex, int dimension) {
    lex.expect_token("{");
    CounterSet out = 0;
    lex.skip_space();
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '}') {
        ++lex.pos;
        return out;
    }
    while (true) {
        lex.skip_space();
        int col = lex.column();
        long long v = lex.next_int("counter index");
        if (v < 1 || v > dimension)
            throw ParseError(lex.line_no, col, "zero-test index out of range",
                             "index in [1," + std::to_string(dimension) + "]");
        out |= CounterSet(1) << (v - 1);
        std::string tok = lex.next("',' or '}'");
        if (tok == "}") break;
        if (tok != ",")
            throw ParseError(lex.line_no, lex.column(), "unexpected token '" + tok + "'", "',' or '}'");
    }
    return out;
}

} // namespace detail

// Model grammar (line oriented, # comments):
//   pmc [name] dimension INT
//   state IDENT
//   rule SRC -> DST delta [x,...] zero {i,...} weight INT [label IDENT]
//   pvass rule SRC -> DST delta [x,...] weight INT [label IDENT]
// A `pvass rule` expands to all 2^d zero-test variants with equal weight.
inline Pmc parse_pmc(const std::string& text) {
    Pmc model;
    bool saw_header = false;
    bool any_plain_rule = false;
    bool any_pvass_rule = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        detail::LineLexer lex(raw, line_no);
        if (lex.done()) continue;
        int col = lex.column();
        std::string head = lex.next("directive");

        if (!saw_header) {
            if (head != "pmc")
                throw ParseError(line_no, col, "file must start with a 'pmc' header", "'pmc'");
            lex.skip_space();
            std::string tok = lex.next("'dimension'");
            if (tok != "dimension") {
                model.name = tok;
                lex.expect_token("dimension");
            }
            long long d = lex.next_int("dimension value");
            if (d < 1 || d > 63)
                throw ParseError(line_no, lex.column(), "dimension must be in [1,63]");
            model.dimension = static_cast<int>(d);
            saw_header = true;
            continue;
        }

        if (head == "state") {
            lex.skip_space();
            int scol = lex.column();
            std::string name = lex.next("state name");
            for (const auto& existing : model.state_names)
                if (existing == name)
                    throw ParseError(line_no, scol, "duplicate state '" + name + "'");
            model.state_names.push_back(name);
            continue;
        }

        bool pvass_line = false;
        if (head == "pvass") {
            pvass_line = true;
            lex.expect_token("rule");
        } else if (head != "rule") {
            throw ParseError(line_no, col, "unknown directive '" + head + "'",
                             "'state', 'rule' or 'pvass'");
        }

        auto state_of = [&](const std::string& name, int at_col) {
            for (int i = 0; i < model.state_count(); ++i)
                if (model.state_names[i] == name) return i;
            throw ParseError(line_no, at_col, "undeclared state '" + name + "'");
        };

        lex.skip_space();
        int scol = lex.column();
        int src = state_of(lex.next("source state"), scol);
        lex.expect_token("->");
        lex.skip_space();
        scol = lex.column();
        int dst = state_of(lex.next("target state"), scol);
        lex.expect_token("delta");
        std::vector<int> delta = detail::parse_vec(lex, model.dimension);
        CounterSet zero = 0;
        if (!pvass_line) {
            lex.expect_token("zero");
            zero = detail::parse_set(lex, model.dimension);
        }
        lex.expect_token("weight");
        lex.skip_space();
        int wcol = lex.column();
        long long w = lex.next_int("weight");
        if (w <= 0) throw ParseError(line_no, wcol, "weight must be a positive integer");
        std::string label = kTauLabel;
        if (!lex.done()) {
            lex.expect_token("label");
            lex.skip_space();
            label = lex.next("label");
        }
        if (!lex.done())
            throw ParseError(line_no, lex.column(), "trailing tokens on rule line");

        if (pvass_line) {
            any_pvass_rule = true;
            for (CounterSet c = 0; c <= full_set(model.dimension); ++c) {
                Rule r{src, delta, c, dst, label, static_cast<std::uint64_t>(w)};
                model.rules.push_back(r);
                if (c == full_set(model.dimension)) break;
            }
        } else {
            any_plain_rule = true;
            model.rules.push_back(Rule{src, delta, zero, dst, label, static_cast<std::uint64_t>(w)});
        }
    }
    if (!saw_header) throw ParseError(1, 1, "empty input", "'pmc' header");
    model.kind = (any_pvass_rule && !any_plain_rule) ? PmcKind::pvass : PmcKind::general;
    model.validate();
    return model;
}

inline std::string serialize_set(CounterSet s, int d) {
    std::string out = "{";
    bool first = true;
    for (int i = 1; i <= d; ++i)
        if (set_contains(s, i)) {
            if (!first) out += ",";
            out += std::to_string(i);
            first = false;
        }
    return out + "}";
}

// Deterministic round-trip form: states in order, then rules in input order.
// Pvass-kind models are re-grouped into compact `pvass rule` lines.
inline std::string serialize_pmc(const Pmc& model) {
    std::ostringstream out;
    out << "pmc ";
    if (!model.name.empty()) out << model.name << " ";
    out << "dimension " << model.dimension << "\n";
    for (const auto& s : model.state_names) out << "state " << s << "\n";

    auto emit_tail = [&](const Rule& r) {
        out << " weight " << r.weight;
        if (r.label != kTauLabel) out << " label " << r.label;
        out << "\n";
    };
    auto emit_delta = [&](const Rule& r) {
        out << " delta [";
        for (int i = 0; i < model.dimension; ++i) {
            if (i) out << ",";
            out << r.delta[i];
        }
        out << "]";
    };

    if (model.kind == PmcKind::pvass) {
        std::vector<bool> emitted(model.rules.size(), false);
        for (std::size_t r = 0; r < model.rules.size(); ++r) {
            if (emitted[r]) continue;
            const Rule& rule = model.rules[r];
            for (std::size_t r2 = r; r2 < model.rules.size(); ++r2) {
                const Rule& o = model.rules[r2];
                if (o.src == rule.src && o.dst == rule.dst && o.delta == rule.delta &&
                    o.label == rule.label && o.weight == rule.weight)
                    emitted[r2] = true;
            }
            out << "pvass rule " << model.state_names[rule.src] << " -> "
                << model.state_names[rule.dst];
            emit_delta(rule);
            emit_tail(rule);
        }
        return out.str();
    }

    for (const Rule& rule : model.rules) {
        out << "rule " << model.state_names[rule.src] << " -> " << model.state_names[rule.dst];
        emit_delta(rule);
        out << " zero " << serialize_set(rule.zero_test, model.dimension);
        emit_tail(rule);
    }
    return out.str();
}

inline bool structurally_equal(const Pmc& a, const Pmc& b) {
    if (a.dimension != b.dimension || a.state_names != b.state_names || a.kind != b.kind)
        return false;
    if (a.rules.size() != b.rules.size()) return false;
    // Rule order may differ for pvass models (expansion order is canonical);
    // compare as multisets.
    auto key = [](const Pmc& m, const Rule& r) {
        std::ostringstream k;
        k << r.src << "|" << r.dst << "|" << r.zero_test << "|" << r.weight << "|" << r.label;
        for (int x : r.delta) k << "|" << x;
        return k.str();
    };
    std::vector<std::string> ka, kb;
    for (const Rule& r : a.rules) ka.push_back(key(a, r));
    for (const Rule& r : b.rules) kb.push_back(key(b, r));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

} // namespace pmc
