#pragma once

#include "pmc/errors.hpp"
#include "pmc/linalg.hpp"
#include "pmc/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace pmc {

// Numeric policy for the chain solvers: exact rational up to a node cap,
// float (with iterative refinement) up to a dense cap, Gauss-Seidel beyond.
struct SolvePolicy {
    std::size_t exact_cap = 2000;
    std::size_t dense_cap = 2000;
    double tol = 1e-12;
    std::size_t iter_cap = 2000000;
};

// Explicit finite Markov chain. Every node must have at least one outgoing
// transition and its probabilities must sum to 1 (exactly in rational mode).
template <class P>
struct FiniteChain {
    struct Edge {
        int to;
        P prob;
    };
    std::vector<std::vector<Edge>> out;
    std::vector<std::string> labels;

    int add_node(std::string label = "") {
        out.emplace_back();
        labels.push_back(std::move(label));
        return static_cast<int>(out.size()) - 1;
    }
    void add_edge(int from, int to, P prob) { out[from].push_back(Edge{to, prob}); }
    int size() const { return static_cast<int>(out.size()); }

    void validate() const {
        for (std::size_t v = 0; v < out.size(); ++v) {
            if (out[v].empty())
                throw ValidationError("chain node " + std::to_string(v) + " has no transitions");
            P sum(0);
            for (const Edge& e : out[v]) {
                if (e.to < 0 || e.to >= size()) throw ValidationError("chain edge out of range");
                sum += e.prob;
            }
            if constexpr (std::is_same_v<P, double>) {
                if (std::abs(sum - 1.0) > 1e-9)
                    throw ValidationError("chain row " + std::to_string(v) + " does not sum to 1");
            } else {
                if (sum != P(1))
                    throw ValidationError("chain row " + std::to_string(v) + " does not sum to 1");
            }
        }
    }
};

struct SccDecomposition {
    std::vector<std::vector<int>> components; // reverse topological: bottoms first
    std::vector<bool> is_bottom;
    std::vector<int> component_of;
};

// Tarjan, iterative. Components come out bottoms-first (reverse topological
// order of the condensation), deterministically for a fixed input order.
template <class P>
inline SccDecomposition scc_decomposition(const FiniteChain<P>& chain) {
    const int n = chain.size();
    SccDecomposition out;
    out.component_of.assign(n, -1);

    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < chain.out[f.v].size()) {
                int w = chain.out[f.v][f.edge++].to;
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    for (int w : comp) out.component_of[w] = static_cast<int>(out.components.size());
                    out.components.push_back(std::move(comp));
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }

    out.is_bottom.assign(out.components.size(), true);
    for (int v = 0; v < n; ++v)
        for (const auto& e : chain.out[v])
            if (out.component_of[e.to] != out.component_of[v])
                out.is_bottom[out.component_of[v]] = false;
    return out;
}

template <class P>
inline std::vector<std::vector<int>> bottom_components(const FiniteChain<P>& chain) {
    SccDecomposition d = scc_decomposition(chain);
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < d.components.size(); ++c)
        if (d.is_bottom[c]) out.push_back(d.components[c]);
    return out;
}

namespace detail {

// Check the component is closed and strongly connected under the chain edges.
template <class P>
inline void require_bscc(const FiniteChain<P>& chain, const std::vector<int>& comp) {
    if (comp.empty()) throw PreconditionError("empty component");
    std::vector<int> pos(chain.size(), -1);
    for (std::size_t i = 0; i < comp.size(); ++i) pos[comp[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> fwd(comp.size()), bwd(comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
        for (const auto& e : chain.out[comp[i]]) {
            if (pos[e.to] < 0) throw PreconditionError("component is not bottom");
            fwd[i].push_back(pos[e.to]);
            bwd[pos[e.to]].push_back(static_cast<int>(i));
        }
    auto full_reach = [&](const std::vector<std::vector<int>>& adj) {
        std::vector<bool> seen(comp.size(), false);
        std::vector<int> todo{0};
        seen[0] = true;
        while (!todo.empty()) {
            int i = todo.back();
            todo.pop_back();
            for (int j : adj[i])
                if (!seen[j]) {
                    seen[j] = true;
                    todo.push_back(j);
                }
        }
        return std::count(seen.begin(), seen.end(), true) == static_cast<long>(comp.size());
    };
    if (!full_reach(fwd) || !full_reach(bwd))
        throw PreconditionError("component is not strongly connected");
}

} // namespace detail

// Invariant distribution of a BSCC: solves mu P = mu, sum mu = 1.
// Exact rational when P is Rational and |comp| fits the cap.
template <class P>
inline std::vector<P> stationary_distribution(const FiniteChain<P>& chain,
                                              const std::vector<int>& comp,
                                              const SolvePolicy& policy = {}) {
    detail::require_bscc(chain, comp);
    const std::size_t n = comp.size();
    std::vector<int> pos(chain.size(), -1);
    for (std::size_t i = 0; i < n; ++i) pos[comp[i]] = static_cast<int>(i);

    // A = (I - P^T) with the last row replaced by the normalization sum row.
    Matrix<P> A(n, n);
    for (std::size_t i = 0; i < n; ++i) A(i, i) = P(1);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : chain.out[comp[i]]) A(pos[e.to], i) -= e.prob;
    std::vector<P> b(n, P(0));
    for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = P(1);
    b[n - 1] = P(1);

    std::vector<P> mu;
    if constexpr (std::is_same_v<P, double>) {
        mu = gauss_solve_refined(A, b);
    } else {
        if (n > policy.exact_cap) throw ResourceExhausted("stationary: component above exact cap");
        mu = gauss_solve(A, b);
    }
    for (const P& x : mu)
        if (x < P(0) || x > P(1))
            throw PreconditionError("stationary solve produced values outside [0,1]");
    return mu;
}

inline double to_double_prob(const Rational& p) { return to_double(p); }
inline double to_double_prob(double p) { return p; }

// Double variant usable on rational chains past the exact cap.
template <class P>
inline std::vector<double> stationary_distribution_float(const FiniteChain<P>& chain,
                                                         const std::vector<int>& comp) {
    detail::require_bscc(chain, comp);
    const std::size_t n = comp.size();
    std::vector<int> pos(chain.size(), -1);
    for (std::size_t i = 0; i < n; ++i) pos[comp[i]] = static_cast<int>(i);
    Matrix<double> A(n, n);
    for (std::size_t i = 0; i < n; ++i) A(i, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : chain.out[comp[i]]) A(pos[e.to], i) -= to_double_prob(e.prob);
    std::vector<double> b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = 1.0;
    b[n - 1] = 1.0;
    return gauss_solve_refined(A, b);
}

namespace detail {

// States that can reach a target along the edges.
template <class P>
inline std::vector<bool> can_reach(const FiniteChain<P>& chain, const std::vector<bool>& target) {
    const int n = chain.size();
    std::vector<std::vector<int>> rev(n);
    for (int v = 0; v < n; ++v)
        for (const auto& e : chain.out[v]) rev[e.to].push_back(v);
    std::vector<bool> seen(n, false);
    std::vector<int> todo;
    for (int v = 0; v < n; ++v)
        if (target[v]) {
            seen[v] = true;
            todo.push_back(v);
        }
    while (!todo.empty()) {
        int v = todo.back();
        todo.pop_back();
        for (int u : rev[v])
            if (!seen[u]) {
                seen[u] = true;
                todo.push_back(u);
            }
    }
    return seen;
}

} // namespace detail

// Least solution of the reachability system with targets made absorbing,
// returned for every node at once. Exact (Rational chains under the cap),
// dense float, or sparse Gauss-Seidel depending on size.
template <class P>
inline std::vector<P> reach_probabilities_exact(const FiniteChain<P>& chain,
                                                const std::vector<bool>& target,
                                                const SolvePolicy& policy = {}) {
    static_assert(!std::is_same_v<P, double>, "exact solve needs rational probabilities");
    const int n = chain.size();
    std::vector<bool> alive = detail::can_reach(chain, target);
    std::vector<int> sys_index(n, -1);
    std::vector<int> sys_nodes;
    for (int v = 0; v < n; ++v)
        if (alive[v] && !target[v]) {
            sys_index[v] = static_cast<int>(sys_nodes.size());
            sys_nodes.push_back(v);
        }
    if (sys_nodes.size() > policy.exact_cap)
        throw ResourceExhausted("reachability: system above exact cap");

    const std::size_t m = sys_nodes.size();
    Matrix<P> A(m, m);
    std::vector<P> b(m, P(0));
    for (std::size_t i = 0; i < m; ++i) {
        A(i, i) = P(1);
        for (const auto& e : chain.out[sys_nodes[i]]) {
            if (target[e.to]) b[i] += e.prob;
            else if (alive[e.to]) A(i, sys_index[e.to]) -= e.prob;
        }
    }
    std::vector<P> x = m ? gauss_solve(A, b) : std::vector<P>{};
    std::vector<P> out(n, P(0));
    for (int v = 0; v < n; ++v) {
        if (target[v]) out[v] = P(1);
        else if (sys_index[v] >= 0) out[v] = x[sys_index[v]];
    }
    return out;
}

template <class P>
inline std::vector<double> reach_probabilities(const FiniteChain<P>& chain,
                                               const std::vector<bool>& target,
                                               const SolvePolicy& policy = {}) {
    const int n = chain.size();
    if constexpr (!std::is_same_v<P, double>) {
        if (static_cast<std::size_t>(n) <= policy.exact_cap) {
            std::vector<P> exact = reach_probabilities_exact(chain, target, policy);
            std::vector<double> out(n);
            for (int v = 0; v < n; ++v) out[v] = to_double_prob(exact[v]);
            return out;
        }
    }
    std::vector<bool> alive = detail::can_reach(chain, target);
    std::vector<int> sys_index(n, -1);
    std::vector<int> sys_nodes;
    for (int v = 0; v < n; ++v)
        if (alive[v] && !target[v]) {
            sys_index[v] = static_cast<int>(sys_nodes.size());
            sys_nodes.push_back(v);
        }
    const std::size_t m = sys_nodes.size();
    std::vector<double> out(n, 0.0);
    for (int v = 0; v < n; ++v)
        if (target[v]) out[v] = 1.0;
    if (m == 0) return out;

    if (m <= policy.dense_cap) {
        Matrix<double> A(m, m);
        std::vector<double> b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            A(i, i) = 1.0;
            for (const auto& e : chain.out[sys_nodes[i]]) {
                double p = to_double_prob(e.prob);
                if (target[e.to]) b[i] += p;
                else if (alive[e.to]) A(i, sys_index[e.to]) -= p;
            }
        }
        std::vector<double> x = gauss_solve_refined(A, b);
        for (std::size_t i = 0; i < m; ++i) out[sys_nodes[i]] = std::clamp(x[i], 0.0, 1.0);
        return out;
    }

    // Gauss-Seidel from below; monotone for these substochastic systems.
    std::vector<double> x(m, 0.0);
    for (std::size_t sweep = 0; sweep < policy.iter_cap; ++sweep) {
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0, self = 0.0;
            for (const auto& e : chain.out[sys_nodes[i]]) {
                double p = to_double_prob(e.prob);
                if (target[e.to]) acc += p;
                else if (alive[e.to]) {
                    int j = sys_index[e.to];
                    if (static_cast<std::size_t>(j) == i) self += p;
                    else acc += p * x[j];
                }
            }
            double next = self < 1.0 ? acc / (1.0 - self) : acc;
            change = std::max(change, std::abs(next - x[i]));
            x[i] = next;
        }
        if (change <= policy.tol * 0.01) break;
        if (sweep + 1 == policy.iter_cap)
            throw ResourceExhausted("reachability: Gauss-Seidel iteration cap hit");
    }
    for (std::size_t i = 0; i < m; ++i) out[sys_nodes[i]] = std::clamp(x[i], 0.0, 1.0);
    return out;
}

template <class P>
inline P reach_probability_exact(const FiniteChain<P>& chain, const std::vector<int>& targets,
                                 int start, const SolvePolicy& policy = {}) {
    std::vector<bool> t(chain.size(), false);
    for (int v : targets) t[v] = true;
    return reach_probabilities_exact(chain, t, policy)[start];
}

template <class P>
inline double reach_probability(const FiniteChain<P>& chain, const std::vector<int>& targets,
                                int start, const SolvePolicy& policy = {}) {
    std::vector<bool> t(chain.size(), false);
    for (int v : targets) t[v] = true;
    return reach_probabilities(chain, t, policy)[start];
}

} // namespace pmc
