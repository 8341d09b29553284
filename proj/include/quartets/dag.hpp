#pragma once

// Causal DAGs: construction and validation, topological ordering, path
// enumeration, d-separation, the backdoor criterion and minimal adjustment
// sets, plus Graphviz export.

#include "quartets/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace quartets {

struct Node {
    std::string name;
    std::optional<int> time;
    bool observed = true;
};

struct Edge {
    std::string from;
    std::string to;
};

using NodeSet = std::set<std::string>;

namespace detail {

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

inline std::string brace_set(const std::vector<std::string>& items) {
    return "{" + join(items, ", ") + "}";
}

} // namespace detail

class Dag {
public:
    Dag() = default;

    // Validates every invariant: unique identifier names, known endpoints,
    // no duplicate edges or self loops, no cycles, and time indices that
    // never decrease along an edge.
    static Dag build(std::vector<Node> nodes, std::vector<Edge> edges) {
        Dag dag;
        dag.nodes_ = std::move(nodes);
        dag.edges_ = std::move(edges);
        const std::size_t k = dag.nodes_.size();
        if (k == 0) fail(ErrorKind::Parse, "a DAG needs at least one node");

        for (std::size_t i = 0; i < k; ++i) {
            const auto& name = dag.nodes_[i].name;
            if (!detail::is_identifier(name))
                fail(ErrorKind::Parse, "node name '" + name + "' is not an identifier");
            if (!dag.index_.emplace(name, i).second)
                fail(ErrorKind::DuplicateName, "duplicate node name '" + name + "'");
        }

        dag.parents_.assign(k, {});
        dag.children_.assign(k, {});
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& e : dag.edges_) {
            auto from = dag.find(e.from);
            auto to = dag.find(e.to);
            if (!from) fail(ErrorKind::Parse, "edge references unknown node '" + e.from + "'");
            if (!to) fail(ErrorKind::Parse, "edge references unknown node '" + e.to + "'");
            if (*from == *to) fail(ErrorKind::Cycle, "self loop on '" + e.from + "'");
            if (!seen.emplace(*from, *to).second)
                fail(ErrorKind::DuplicateName, "duplicate edge " + e.from + " -> " + e.to);
            const auto& tf = dag.nodes_[*from].time;
            const auto& tt = dag.nodes_[*to].time;
            if (tf && tt && *tf > *tt) {
                fail(ErrorKind::TimeOrder, "edge " + e.from + " (time " + std::to_string(*tf) + ") -> " + e.to +
                                               " (time " + std::to_string(*tt) + ") points into the past");
            }
            dag.parents_[*to].push_back(*from);
            dag.children_[*from].push_back(*to);
        }
        auto by_name = [&dag](std::size_t a, std::size_t b) { return dag.nodes_[a].name < dag.nodes_[b].name; };
        for (std::size_t i = 0; i < k; ++i) {
            std::sort(dag.parents_[i].begin(), dag.parents_[i].end(), by_name);
            std::sort(dag.children_[i].begin(), dag.children_[i].end(), by_name);
        }
        dag.compute_order();
        return dag;
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const Node& node(std::string_view name) const { return nodes_[index_of(name)]; }
    const std::string& name(std::size_t i) const { return nodes_[i].name; }

    std::optional<std::size_t> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(std::string_view name) const {
        auto i = find(name);
        if (!i) fail(ErrorKind::UnknownNode, "unknown node '" + std::string(name) + "'");
        return *i;
    }

    bool contains(std::string_view name) const { return find(name).has_value(); }

    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }

    bool has_edge(std::size_t from, std::size_t to) const {
        const auto& c = children_[from];
        return std::find(c.begin(), c.end(), to) != c.end();
    }

    // Topological order as node indices; ties broken by node name.
    const std::vector<std::size_t>& order() const { return order_; }

private:
    void compute_order() {
        const std::size_t k = nodes_.size();
        std::vector<std::size_t> indegree(k);
        for (std::size_t i = 0; i < k; ++i) indegree[i] = parents_[i].size();
        auto later = [this](std::size_t a, std::size_t b) { return nodes_[a].name > nodes_[b].name; };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
        for (std::size_t i = 0; i < k; ++i)
            if (indegree[i] == 0) ready.push(i);
        order_.clear();
        while (!ready.empty()) {
            auto i = ready.top();
            ready.pop();
            order_.push_back(i);
            for (auto c : children_[i])
                if (--indegree[c] == 0) ready.push(c);
        }
        if (order_.size() != k) {
            std::vector<std::string> stuck;
            for (std::size_t i = 0; i < k; ++i)
                if (indegree[i] > 0) stuck.push_back(nodes_[i].name);
            std::sort(stuck.begin(), stuck.end());
            fail(ErrorKind::Cycle, "directed cycle through " + detail::brace_set(stuck));
        }
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> order_;
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline nlohmann::json parse_json_text(std::string_view text) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, "line " + std::to_string(line_of(text, e.byte)) + ": malformed config: " + e.what());
    }
}

inline const nlohmann::json& require_member(const nlohmann::json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ErrorKind::Parse, std::string(where) + ": missing '" + key + "'");
    return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, std::string_view where) {
    const auto& v = require_member(obj, key, where);
    if (!v.is_string()) fail(ErrorKind::Parse, std::string(where) + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace detail

// Builds a Dag from an already-parsed config object. Edge `coef` fields are
// ignored here; the SEM parser reads them.
inline Dag dag_from_json(const nlohmann::json& config) {
    if (!config.is_object()) fail(ErrorKind::Parse, "config must be a JSON object");
    const auto& jnodes = detail::require_member(config, "nodes", "config");
    if (!jnodes.is_array()) fail(ErrorKind::Parse, "config: 'nodes' must be an array");

    std::vector<Node> nodes;
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const auto& jn = jnodes[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (!jn.is_object()) fail(ErrorKind::Parse, where + " must be an object");
        Node n;
        n.name = detail::require_string(jn, "name", where);
        if (auto t = jn.find("time"); t != jn.end() && !t->is_null()) {
            if (!t->is_number_integer()) fail(ErrorKind::Parse, where + ": 'time' must be an integer");
            n.time = t->get<int>();
        }
        if (auto o = jn.find("observed"); o != jn.end()) {
            if (!o->is_boolean()) fail(ErrorKind::Parse, where + ": 'observed' must be a boolean");
            n.observed = o->get<bool>();
        }
        nodes.push_back(std::move(n));
    }

    std::vector<Edge> edges;
    if (auto je = config.find("edges"); je != config.end()) {
        if (!je->is_array()) fail(ErrorKind::Parse, "config: 'edges' must be an array");
        for (std::size_t i = 0; i < je->size(); ++i) {
            const auto& e = (*je)[i];
            const std::string where = "edges[" + std::to_string(i) + "]";
            if (!e.is_object()) fail(ErrorKind::Parse, where + " must be an object");
            edges.push_back({detail::require_string(e, "from", where), detail::require_string(e, "to", where)});
        }
    }
    return Dag::build(std::move(nodes), std::move(edges));
}

inline Dag parse_dag(std::string_view config_text) {
    return dag_from_json(detail::parse_json_text(config_text));
}

inline nlohmann::json dag_to_json(const Dag& dag) {
    nlohmann::json out;
    out["nodes"] = nlohmann::json::array();
    for (const auto& n : dag.nodes()) {
        nlohmann::json jn{{"name", n.name}};
        if (n.time) jn["time"] = *n.time;
        if (!n.observed) jn["observed"] = false;
        out["nodes"].push_back(std::move(jn));
    }
    out["edges"] = nlohmann::json::array();
    for (const auto& e : dag.edges()) out["edges"].push_back({{"from", e.from}, {"to", e.to}});
    return out;
}

// ---------------------------------------------------------------------------
// Ordering and reachability

inline std::vector<std::string> topological_order(const Dag& dag) {
    std::vector<std::string> out;
    out.reserve(dag.size());
    for (auto i : dag.order()) out.push_back(dag.name(i));
    return out;
}

// Flags for strict descendants of `source` (source itself excluded).
inline std::vector<bool> descendant_flags(const Dag& dag, std::size_t source) {
    std::vector<bool> flag(dag.size(), false);
    std::vector<std::size_t> stack{source};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto c : dag.children(v)) {
            if (!flag[c]) {
                flag[c] = true;
                stack.push_back(c);
            }
        }
    }
    return flag;
}

inline NodeSet descendants(const Dag& dag, std::string_view name) {
    auto flags = descendant_flags(dag, dag.index_of(name));
    NodeSet out;
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (flags[i]) out.insert(dag.name(i));
    return out;
}

// ---------------------------------------------------------------------------
// Undirected paths

enum class PathRole { Chain, Fork, Collider };

constexpr std::string_view to_string(PathRole r) {
    switch (r) {
    case PathRole::Chain: return "chain";
    case PathRole::Fork: return "fork";
    case PathRole::Collider: return "collider";
    }
    return "?";
}

struct UndirectedPath {
    std::vector<std::string> nodes;
    // forward[i] is true when the edge runs nodes[i] -> nodes[i+1].
    std::vector<bool> forward;
    // roles[i] describes interior node nodes[i+1].
    std::vector<PathRole> roles;

    bool starts_into_source() const { return !forward.empty() && !forward.front(); }

    std::string to_string() const {
        std::string out = nodes.empty() ? std::string{} : nodes.front();
        for (std::size_t i = 0; i < forward.size(); ++i) {
            out += forward[i] ? " -> " : " <- ";
            out += nodes[i + 1];
        }
        return out;
    }
};

// Every simple path between a and b in the undirected skeleton, in
// depth-first order with neighbours visited by name.
inline std::vector<UndirectedPath> all_paths(const Dag& dag, std::string_view a, std::string_view b) {
    const auto src = dag.index_of(a);
    const auto dst = dag.index_of(b);
    if (src == dst) fail(ErrorKind::InvalidArgument, "path endpoints must differ");

    std::vector<std::vector<std::pair<std::size_t, bool>>> adj(dag.size());
    for (std::size_t v = 0; v < dag.size(); ++v) {
        for (auto c : dag.children(v)) adj[v].emplace_back(c, true);
        for (auto p : dag.parents(v)) adj[v].emplace_back(p, false);
        std::sort(adj[v].begin(), adj[v].end(),
                  [&](const auto& x, const auto& y) { return dag.name(x.first) < dag.name(y.first); });
    }

    std::vector<UndirectedPath> out;
    std::vector<std::size_t> stack{src};
    std::vector<bool> dirs;
    std::vector<bool> on_path(dag.size(), false);
    on_path[src] = true;

    std::function<void(std::size_t)> walk = [&](std::size_t v) {
        for (const auto& [w, fwd] : adj[v]) {
            if (on_path[w]) continue;
            stack.push_back(w);
            dirs.push_back(fwd);
            if (w == dst) {
                UndirectedPath p;
                for (auto i : stack) p.nodes.push_back(dag.name(i));
                p.forward = dirs;
                for (std::size_t i = 0; i + 1 < dirs.size(); ++i) {
                    const bool into_from_left = dirs[i];
                    const bool into_from_right = !dirs[i + 1];
                    if (into_from_left && into_from_right)
                        p.roles.push_back(PathRole::Collider);
                    else if (!into_from_left && !into_from_right)
                        p.roles.push_back(PathRole::Fork);
                    else
                        p.roles.push_back(PathRole::Chain);
                }
                out.push_back(std::move(p));
            } else {
                on_path[w] = true;
                walk(w);
                on_path[w] = false;
            }
            stack.pop_back();
            dirs.pop_back();
        }
    };
    walk(src);
    return out;
}

struct PathVerdict {
    bool blocked = false;
    // Human-readable account of the first blocking node, or of each opened
    // collider when the path is open.
    std::string reason;
};

// Applies the blocking rules to one path: a chain or fork node blocks when
// conditioned on; a collider blocks unless it or one of its descendants is
// conditioned on.
inline PathVerdict evaluate_path(const Dag& dag, const UndirectedPath& path, const NodeSet& given) {
    std::vector<std::string> opened;
    for (std::size_t i = 0; i < path.roles.size(); ++i) {
        const auto& v = path.nodes[i + 1];
        const bool in_given = given.count(v) > 0;
        if (path.roles[i] == PathRole::Collider) {
            if (in_given) {
                opened.push_back("collider " + v + " opened");
                continue;
            }
            auto desc = descendant_flags(dag, dag.index_of(v));
            std::optional<std::string> via;
            for (const auto& g : given) {
                if (desc[dag.index_of(g)]) {
                    via = g;
                    break;
                }
            }
            if (!via) return {true, "blocked at collider " + v};
            opened.push_back("collider " + v + " opened via descendant " + *via);
        } else if (in_given) {
            return {true, "blocked at " + std::string(to_string(path.roles[i])) + " " + v};
        }
    }
    return {false, opened.empty() ? "open" : detail::join(opened, "; ")};
}

// ---------------------------------------------------------------------------
// d-separation by reachability

namespace detail {

// Reachability from `source` along active trails given the conditioning
// flags. When `cut_out_of` is set, edges leaving that node are treated as
// absent (the backdoor graph).
inline std::vector<bool> active_reach(const Dag& dag, std::size_t source, const std::vector<bool>& given,
                                      std::optional<std::size_t> cut_out_of = std::nullopt) {
    const std::size_t k = dag.size();
    auto edge_present = [&](std::size_t from) { return !cut_out_of || from != *cut_out_of; };

    // Ancestors of the conditioning set, the set itself included.
    std::vector<bool> anc(k, false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < k; ++i)
        if (given[i]) {
            anc[i] = true;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto p : dag.parents(v)) {
            if (!edge_present(p) || anc[p]) continue;
            anc[p] = true;
            stack.push_back(p);
        }
    }

    // Traverse (node, direction) states; `up` means the trail arrived from a child.
    std::vector<bool> seen_up(k, false), seen_down(k, false), reach(k, false);
    std::vector<std::pair<std::size_t, bool>> todo{{source, true}};
    while (!todo.empty()) {
        auto [v, up] = todo.back();
        todo.pop_back();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = true;
        if (!given[v]) reach[v] = true;

        if (up && !given[v]) {
            for (auto p : dag.parents(v))
                if (edge_present(p)) todo.emplace_back(p, true);
            if (edge_present(v))
                for (auto c : dag.children(v)) todo.emplace_back(c, false);
        } else if (!up) {
            if (!given[v] && edge_present(v))
                for (auto c : dag.children(v)) todo.emplace_back(c, false);
            if (anc[v])
                for (auto p : dag.parents(v))
                    if (edge_present(p)) todo.emplace_back(p, true);
        }
    }
    reach[source] = false;
    return reach;
}

inline std::vector<bool> given_flags(const Dag& dag, const NodeSet& given) {
    std::vector<bool> flags(dag.size(), false);
    for (const auto& g : given) flags[dag.index_of(g)] = true;
    return flags;
}

} // namespace detail

inline bool d_separated(const Dag& dag, std::string_view a, std::string_view b, const NodeSet& given) {
    const auto ia = dag.index_of(a);
    const auto ib = dag.index_of(b);
    if (ia == ib) fail(ErrorKind::InvalidArgument, "d-separation endpoints must differ");
    if (given.count(std::string(a)) || given.count(std::string(b)))
        fail(ErrorKind::InvalidArgument, "conditioning set must not contain the endpoints");
    auto flags = detail::given_flags(dag, given);
    return !detail::active_reach(dag, ia, flags)[ib];
}

struct DSeparationReport {
    bool separated = false;
    std::vector<std::pair<UndirectedPath, PathVerdict>> paths;
};

// Path-by-path account used for human-facing output. The verdict itself is
// taken from the reachability algorithm.
inline DSeparationReport explain_d_separation(const Dag& dag, std::string_view a, std::string_view b,
                                              const NodeSet& given) {
    DSeparationReport report;
    report.separated = d_separated(dag, a, b, given);
    for (auto& p : all_paths(dag, a, b)) {
        auto verdict = evaluate_path(dag, p, given);
        report.paths.emplace_back(std::move(p), std::move(verdict));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Backdoor criterion

enum class ViolationKind { DescendantOfExposure, UnblockedPath, UnobservedMember };

constexpr std::string_view to_string(ViolationKind v) {
    switch (v) {
    case ViolationKind::DescendantOfExposure: return "descendant-of-exposure";
    case ViolationKind::UnblockedPath: return "unblocked-path";
    case ViolationKind::UnobservedMember: return "unobserved-member";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::string detail;  // offending node, or the rendered open path
};

struct AdjustmentReport {
    std::string exposure;
    std::string outcome;
    std::vector<std::string> candidate_set;  // sorted
    bool valid = false;
    std::vector<std::vector<std::string>> open_backdoor_paths;
    std::vector<Violation> violations;
};

inline AdjustmentReport backdoor_valid(const Dag& dag, std::string_view exposure, std::string_view outcome,
                                       const NodeSet& candidate_set) {
    const auto x = dag.index_of(exposure);
    const auto y = dag.index_of(outcome);
    if (x == y) fail(ErrorKind::InvalidArgument, "exposure and outcome must differ");
    for (const auto& c : candidate_set) {
        dag.index_of(c);
        if (c == exposure || c == outcome)
            fail(ErrorKind::InvalidArgument, "candidate set must not contain the exposure or the outcome");
    }

    AdjustmentReport r;
    r.exposure = exposure;
    r.outcome = outcome;
    r.candidate_set.assign(candidate_set.begin(), candidate_set.end());

    const auto desc = descendant_flags(dag, x);
    for (const auto& c : candidate_set)
        if (desc[dag.index_of(c)]) r.violations.push_back({ViolationKind::DescendantOfExposure, c});
    for (const auto& c : candidate_set)
        if (!dag.node(c).observed) r.violations.push_back({ViolationKind::UnobservedMember, c});

    for (const auto& p : all_paths(dag, exposure, outcome)) {
        if (!p.starts_into_source()) continue;
        if (evaluate_path(dag, p, candidate_set).blocked) continue;
        r.open_backdoor_paths.push_back(p.nodes);
        r.violations.push_back({ViolationKind::UnblockedPath, p.to_string()});
    }
    r.valid = r.violations.empty();
    return r;
}

struct EnumerationOptions {
    std::size_t max_candidates = 20;
};

// All inclusion-minimal valid adjustment sets drawn from observed nodes,
// ordered by size then lexicographically. Candidates exclude descendants of
// the exposure, which can never appear in a valid set.
inline std::vector<std::vector<std::string>> minimal_backdoor_sets(const Dag& dag, std::string_view exposure,
                                                                   std::string_view outcome,
                                                                   EnumerationOptions opts = {}) {
    const auto x = dag.index_of(exposure);
    const auto y = dag.index_of(outcome);
    if (x == y) fail(ErrorKind::InvalidArgument, "exposure and outcome must differ");

    const auto desc = descendant_flags(dag, x);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < dag.size(); ++i)
        if (i != x && i != y && !desc[i] && dag.node(i).observed) candidates.push_back(i);
    std::sort(candidates.begin(), candidates.end(), [&](auto a, auto b) { return dag.name(a) < dag.name(b); });
    if (candidates.size() > opts.max_candidates) {
        fail(ErrorKind::EnumerationLimit, std::to_string(candidates.size()) + " candidate nodes exceed the limit of " +
                                              std::to_string(opts.max_candidates));
    }

    // With no descendants of the exposure in the set, blocking every backdoor
    // path is d-separation in the graph without the exposure's outgoing edges.
    auto blocks = [&](const std::vector<std::size_t>& members) {
        std::vector<bool> flags(dag.size(), false);
        for (auto m : members) flags[m] = true;
        return !detail::active_reach(dag, x, flags, x)[y];
    };

    std::vector<std::vector<std::size_t>> found;
    const std::size_t m = candidates.size();
    for (std::size_t size = 0; size <= m; ++size) {
        // Lexicographic combinations of candidate positions.
        std::vector<std::size_t> pos(size);
        for (std::size_t i = 0; i < size; ++i) pos[i] = i;
        while (true) {
            std::vector<std::size_t> members;
            for (auto p : pos) members.push_back(candidates[p]);
            const bool has_valid_subset = std::any_of(found.begin(), found.end(), [&](const auto& f) {
                return std::includes(pos.begin(), pos.end(), f.begin(), f.end());
            });
            if (!has_valid_subset && blocks(members)) found.push_back(pos);

            std::size_t i = size;
            while (i > 0 && pos[i - 1] == m - size + i - 1) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < size; ++j) pos[j] = pos[j - 1] + 1;
        }
    }

    std::vector<std::vector<std::string>> out;
    for (const auto& f : found) {
        std::vector<std::string> names;
        for (auto p : f) names.push_back(dag.name(candidates[p]));
        out.push_back(std::move(names));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Graphviz

inline std::string to_dot(const Dag& dag, const std::map<std::pair<std::string, std::string>, double>& labels = {}) {
    std::ostringstream os;
    os << "digraph dag {\n  rankdir=LR;\n";
    for (auto i : dag.order()) {
        const auto& n = dag.node(i);
        os << "  \"" << n.name << "\"";
        std::vector<std::string> attrs;
        if (n.time) attrs.push_back("label=\"" + n.name + " (t=" + std::to_string(*n.time) + ")\"");
        if (!n.observed) attrs.push_back("style=dashed");
        if (!attrs.empty()) os << " [" << detail::join(attrs, ", ") << "]";
        os << ";\n";
    }
    for (const auto& e : dag.edges()) {
        os << "  \"" << e.from << "\" -> \"" << e.to << "\"";
        if (auto it = labels.find({e.from, e.to}); it != labels.end()) {
            std::ostringstream num;
            num << it->second;
            os << " [label=\"" << num.str() << "\"]";
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace quartets
