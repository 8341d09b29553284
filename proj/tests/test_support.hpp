#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// library's path, reachability or covariance code.

#include "quartets/quartets.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace quartets::testing {

inline std::string node_name(std::size_t i) { return "N" + std::to_string(i); }

// Random DAG over k nodes: a random permutation fixes the causal order and
// each forward pair gets an edge with probability p.
inline Dag random_dag(std::mt19937_64& gen, std::size_t k, double p, double unobserved_rate = 0.0) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    std::bernoulli_distribution edge(p), hidden(unobserved_rate);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < k; ++i) nodes.push_back({node_name(i), std::nullopt, !hidden(gen)});
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (edge(gen)) edges.push_back({node_name(perm[a]), node_name(perm[b])});
    return Dag::build(std::move(nodes), std::move(edges));
}

inline LinearSem random_sem(std::mt19937_64& gen, std::size_t k, double p) {
    auto dag = random_dag(gen, k, p);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), var(0.1, 2.0);
    std::vector<double> c, v;
    for (std::size_t i = 0; i < dag.edges().size(); ++i) c.push_back(coef(gen));
    for (std::size_t i = 0; i < dag.size(); ++i) v.push_back(var(gen));
    return make_sem(std::move(dag), std::move(c), std::move(v));
}

// Plain adjacency view built from the edge list only.
struct Skeleton {
    std::map<std::string, std::set<std::string>> children;
    std::map<std::string, std::set<std::string>> parents;
    std::vector<std::string> names;

    explicit Skeleton(const Dag& dag) {
        for (const auto& n : dag.nodes()) {
            names.push_back(n.name);
            children[n.name];
            parents[n.name];
        }
        for (const auto& e : dag.edges()) {
            children[e.from].insert(e.to);
            parents[e.to].insert(e.from);
        }
    }

    const std::set<std::string>& descendants(const std::string& v) const {
        auto it = desc_cache.find(v);
        if (it != desc_cache.end()) return it->second;
        std::set<std::string> out;
        std::function<void(const std::string&)> go = [&](const std::string& u) {
            for (const auto& c : children.at(u))
                if (out.insert(c).second) go(c);
        };
        go(v);
        return desc_cache.emplace(v, std::move(out)).first->second;
    }

    mutable std::map<std::string, std::set<std::string>> desc_cache;
};

// Every simple undirected path a..b, each as its node sequence.
inline std::vector<std::vector<std::string>> brute_paths(const Skeleton& s, const std::string& a, const std::string& b) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> path{a};
    std::set<std::string> on{a};
    std::function<void(const std::string&)> go = [&](const std::string& v) {
        std::set<std::string> nbrs = s.children.at(v);
        nbrs.insert(s.parents.at(v).begin(), s.parents.at(v).end());
        for (const auto& w : nbrs) {
            if (on.count(w)) continue;
            path.push_back(w);
            if (w == b) {
                out.push_back(path);
            } else {
                on.insert(w);
                go(w);
                on.erase(w);
            }
            path.pop_back();
        }
    };
    go(a);
    return out;
}

inline bool brute_path_open(const Skeleton& s, const std::vector<std::string>& path, const std::set<std::string>& given) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& prev = path[i - 1];
        const auto& v = path[i];
        const auto& next = path[i + 1];
        const bool collider = s.children.at(prev).count(v) && s.children.at(next).count(v);
        if (collider) {
            if (given.count(v)) continue;
            const auto& desc = s.descendants(v);
            const bool any = std::any_of(given.begin(), given.end(), [&](const auto& g) { return desc.count(g) > 0; });
            if (!any) return false;
        } else if (given.count(v)) {
            return false;
        }
    }
    return true;
}

inline bool brute_d_separated(const Dag& dag, const std::string& a, const std::string& b,
                              const std::set<std::string>& given) {
    Skeleton s(dag);
    for (const auto& p : brute_paths(s, a, b))
        if (brute_path_open(s, p, given)) return false;
    return true;
}

// Sum over directed paths of coefficient products, by explicit enumeration.
inline double brute_total_effect(const LinearSem& sem, const std::string& x, const std::string& y) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> out_edges;
    for (std::size_t i = 0; i < sem.coef.size(); ++i)
        out_edges[sem.dag.edges()[i].from].emplace_back(sem.dag.edges()[i].to, sem.coef[i]);
    double total = 0.0;
    std::function<void(const std::string&, double)> go = [&](const std::string& v, double prod) {
        if (v == y) {
            total += prod;
            return;
        }
        for (const auto& [w, c] : out_edges[v]) go(w, prod * c);
    };
    go(x, 1.0);
    return total;
}

// Sigma = (I - B)^-1 D (I - B)^-T by explicit inversion, in declaration order.
inline Eigen::MatrixXd inverse_covariance_oracle(const LinearSem& sem) {
    const auto k = static_cast<Eigen::Index>(sem.dag.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < sem.coef.size(); ++i) {
        const auto& e = sem.dag.edges()[i];
        b(static_cast<Eigen::Index>(sem.dag.index_of(e.to)), static_cast<Eigen::Index>(sem.dag.index_of(e.from))) =
            sem.coef[i];
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) d(i, i) = sem.noise_var[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(k, k) - b).inverse();
    return a * d * a.transpose();
}

// All topological orders by brute-force permutation.
inline std::vector<std::vector<std::string>> all_topological_orders(const Dag& dag) {
    std::vector<std::string> names;
    for (const auto& n : dag.nodes()) names.push_back(n.name);
    std::sort(names.begin(), names.end());
    std::vector<std::vector<std::string>> out;
    do {
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < names.size(); ++i) pos[names[i]] = i;
        bool ok = std::all_of(dag.edges().begin(), dag.edges().end(),
                              [&](const Edge& e) { return pos[e.from] < pos[e.to]; });
        if (ok) out.push_back(names);
    } while (std::next_permutation(names.begin(), names.end()));
    return out;
}

inline std::vector<std::set<std::string>> subsets_of(const std::vector<std::string>& items) {
    std::vector<std::set<std::string>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << items.size()); ++mask) {
        std::set<std::string> s;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (mask >> i & 1u) s.insert(items[i]);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace quartets::testing
