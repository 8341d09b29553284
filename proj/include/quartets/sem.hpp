#pragma once

// Linear-Gaussian structural equation models over a Dag.
//
// Each node is value = noise_mean + sum(coef(parent -> node) * parent) + noise,
// with independent Gaussian noises. Population moments come from the total
// effect matrix T = (I - B)^-1, built row by row in topological order rather
// than by numerical inversion: Sigma = T D T'.

#include "quartets/dag.hpp"
#include "quartets/dataset.hpp"
#include "quartets/error.hpp"
#include "quartets/normal_stream.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quartets {

struct LinearSem {
    Dag dag;
    std::vector<double> coef;        // aligned with dag.edges()
    std::vector<double> noise_var;   // aligned with dag.nodes()
    std::vector<double> noise_mean;  // aligned with dag.nodes()

    std::size_t edge_index(std::string_view from, std::string_view to) const {
        const auto& edges = dag.edges();
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].from == from && edges[i].to == to) return i;
        fail(ErrorKind::UnknownNode, "no edge " + std::string(from) + " -> " + std::string(to));
    }

    double coefficient(std::string_view from, std::string_view to) const { return coef[edge_index(from, to)]; }
    void set_coefficient(std::string_view from, std::string_view to, double v) { coef[edge_index(from, to)] = v; }

    double variance(std::string_view node) const { return noise_var[dag.index_of(node)]; }
};

inline void validate_sem(const LinearSem& sem) {
    if (sem.coef.size() != sem.dag.edges().size())
        fail(ErrorKind::InvalidArgument, "every edge needs exactly one coefficient");
    if (sem.noise_var.size() != sem.dag.size() || sem.noise_mean.size() != sem.dag.size())
        fail(ErrorKind::InvalidArgument, "every node needs a noise variance and mean");
    for (double c : sem.coef)
        if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "edge coefficients must be finite");
    for (std::size_t i = 0; i < sem.dag.size(); ++i) {
        if (!std::isfinite(sem.noise_var[i]) || sem.noise_var[i] < 0.0)
            fail(ErrorKind::InvalidArgument, "noise variance of '" + sem.dag.name(i) + "' must be finite and >= 0");
        if (!std::isfinite(sem.noise_mean[i]))
            fail(ErrorKind::InvalidArgument, "noise mean of '" + sem.dag.name(i) + "' must be finite");
    }
}

inline LinearSem make_sem(Dag dag, std::vector<double> coef, std::vector<double> noise_var,
                          std::vector<double> noise_mean = {}) {
    if (noise_mean.empty()) noise_mean.assign(dag.size(), 0.0);
    LinearSem sem{std::move(dag), std::move(coef), std::move(noise_var), std::move(noise_mean)};
    validate_sem(sem);
    return sem;
}

// ---------------------------------------------------------------------------
// Config: DAG config with `coef` on every edge and a `noise` variance map
// covering every node; `noise_mean` is optional.

inline LinearSem sem_from_json(const nlohmann::json& config) {
    Dag dag = dag_from_json(config);
    std::vector<double> coef;
    const auto& jedges = config.contains("edges") ? config.at("edges") : nlohmann::json::array();
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        auto it = jedges[i].find("coef");
        if (it == jedges[i].end() || !it->is_number())
            fail(ErrorKind::Parse, "edges[" + std::to_string(i) + "]: SEM edges need a numeric 'coef'");
        coef.push_back(it->get<double>());
    }

    std::vector<double> var(dag.size(), 0.0), mean(dag.size(), 0.0);
    auto noise = config.find("noise");
    if (noise == config.end() || !noise->is_object()) fail(ErrorKind::Parse, "config: SEM needs a 'noise' object");
    for (auto it = noise->begin(); it != noise->end(); ++it) {
        if (!it.value().is_number()) fail(ErrorKind::Parse, "noise['" + it.key() + "'] must be a number");
        auto idx = dag.find(it.key());
        if (!idx) fail(ErrorKind::Parse, "noise: unknown node '" + it.key() + "'");
        var[*idx] = it.value().get<double>();
    }
    for (std::size_t i = 0; i < dag.size(); ++i)
        if (!noise->contains(dag.name(i))) fail(ErrorKind::Parse, "noise: missing variance for '" + dag.name(i) + "'");

    if (auto jm = config.find("noise_mean"); jm != config.end()) {
        if (!jm->is_object()) fail(ErrorKind::Parse, "config: 'noise_mean' must be an object");
        for (auto it = jm->begin(); it != jm->end(); ++it) {
            if (!it.value().is_number()) fail(ErrorKind::Parse, "noise_mean['" + it.key() + "'] must be a number");
            auto idx = dag.find(it.key());
            if (!idx) fail(ErrorKind::Parse, "noise_mean: unknown node '" + it.key() + "'");
            mean[*idx] = it.value().get<double>();
        }
    }
    return make_sem(std::move(dag), std::move(coef), std::move(var), std::move(mean));
}

inline LinearSem parse_sem(std::string_view text) { return sem_from_json(detail::parse_json_text(text)); }

inline nlohmann::json sem_to_json(const LinearSem& sem) {
    auto out = dag_to_json(sem.dag);
    for (std::size_t i = 0; i < sem.coef.size(); ++i) out["edges"][i]["coef"] = sem.coef[i];
    out["noise"] = nlohmann::json::object();
    bool any_mean = false;
    for (std::size_t i = 0; i < sem.dag.size(); ++i) {
        out["noise"][sem.dag.name(i)] = sem.noise_var[i];
        any_mean = any_mean || sem.noise_mean[i] != 0.0;
    }
    if (any_mean) {
        for (std::size_t i = 0; i < sem.dag.size(); ++i) out["noise_mean"][sem.dag.name(i)] = sem.noise_mean[i];
    }
    return out;
}

inline std::map<std::pair<std::string, std::string>, double> edge_labels(const LinearSem& sem) {
    std::map<std::pair<std::string, std::string>, double> out;
    for (std::size_t i = 0; i < sem.coef.size(); ++i) out[{sem.dag.edges()[i].from, sem.dag.edges()[i].to}] = sem.coef[i];
    return out;
}

// ---------------------------------------------------------------------------
// Population moments

struct CovarianceMatrix {
    std::vector<std::string> order;  // topological order of the source Dag
    Eigen::MatrixXd values;
    Eigen::VectorXd mean;

    std::size_t index(std::string_view name) const {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i] == name) return i;
        fail(ErrorKind::UnknownNode, "unknown node '" + std::string(name) + "'");
    }

    double operator()(std::string_view a, std::string_view b) const {
        return values(static_cast<Eigen::Index>(index(a)), static_cast<Eigen::Index>(index(b)));
    }
};

namespace detail {

// Total effect matrix in topological coordinates: row i holds the effect of
// every node on node order[i].
inline Eigen::MatrixXd total_effect_matrix(const LinearSem& sem) {
    const auto& order = sem.dag.order();
    const auto k = static_cast<Eigen::Index>(order.size());
    std::vector<Eigen::Index> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<Eigen::Index>(i);

    std::vector<std::vector<std::pair<std::size_t, double>>> in_edges(sem.dag.size());
    for (std::size_t e = 0; e < sem.coef.size(); ++e) {
        const auto& edge = sem.dag.edges()[e];
        in_edges[sem.dag.index_of(edge.to)].emplace_back(sem.dag.index_of(edge.from), sem.coef[e]);
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        t(r, r) = 1.0;
        for (const auto& [parent, c] : in_edges[order[static_cast<std::size_t>(r)]]) t.row(r) += c * t.row(pos[parent]);
    }
    return t;
}

} // namespace detail

inline CovarianceMatrix population_covariance(const LinearSem& sem) {
    validate_sem(sem);
    const auto& order = sem.dag.order();
    const auto k = static_cast<Eigen::Index>(order.size());
    const Eigen::MatrixXd t = detail::total_effect_matrix(sem);

    Eigen::VectorXd d(k), m(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        d(i) = sem.noise_var[order[static_cast<std::size_t>(i)]];
        m(i) = sem.noise_mean[order[static_cast<std::size_t>(i)]];
    }

    CovarianceMatrix cov;
    for (auto i : order) cov.order.push_back(sem.dag.name(i));
    cov.values.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            const double v = (t.row(i).array() * d.transpose().array() * t.row(j).array()).sum();
            cov.values(i, j) = v;
            cov.values(j, i) = v;
        }
    }
    cov.mean = t * m;
    if (!cov.values.allFinite()) fail(ErrorKind::Internal, "population covariance is not finite");
    return cov;
}

inline double implied_correlation(const CovarianceMatrix& cov, std::string_view a, std::string_view b) {
    const double va = cov(a, a);
    const double vb = cov(b, b);
    if (!(va > 0.0)) fail(ErrorKind::ZeroVariance, "node '" + std::string(a) + "' has zero variance");
    if (!(vb > 0.0)) fail(ErrorKind::ZeroVariance, "node '" + std::string(b) + "' has zero variance");
    if (a == b) return 1.0;
    return cov(a, b) / std::sqrt(va * vb);
}

inline double implied_correlation(const LinearSem& sem, std::string_view a, std::string_view b) {
    return implied_correlation(population_covariance(sem), a, b);
}

// Sum over directed paths exposure -> ... -> outcome of coefficient products.
inline double total_effect(const LinearSem& sem, std::string_view exposure, std::string_view outcome) {
    const auto x = sem.dag.index_of(exposure);
    const auto y = sem.dag.index_of(outcome);
    if (x == y) return 1.0;
    std::vector<double> effect(sem.dag.size(), 0.0);
    effect[x] = 1.0;
    std::vector<std::vector<std::pair<std::size_t, double>>> in_edges(sem.dag.size());
    for (std::size_t e = 0; e < sem.coef.size(); ++e) {
        const auto& edge = sem.dag.edges()[e];
        in_edges[sem.dag.index_of(edge.to)].emplace_back(sem.dag.index_of(edge.from), sem.coef[e]);
    }
    for (auto v : sem.dag.order()) {
        if (v == x) continue;
        double acc = 0.0;
        for (const auto& [p, c] : in_edges[v]) acc += c * effect[p];
        effect[v] = acc;
    }
    return effect[y];
}

// ---------------------------------------------------------------------------
// Simulation

// Draws n rows. The noise for (row r, node v) is draw number r of the stream
// keyed by (seed, name of v), so results are reproducible bit for bit and a
// node's column does not move when unrelated nodes are added. Columns come
// out in topological order and include unobserved nodes.
inline Dataset simulate(const LinearSem& sem, std::size_t n, std::uint64_t seed, std::string mechanism = "custom") {
    validate_sem(sem);
    if (n == 0) fail(ErrorKind::InvalidArgument, "simulate needs n >= 1");
    const auto& dag = sem.dag;
    std::vector<std::vector<std::pair<std::size_t, double>>> in_edges(dag.size());
    for (std::size_t e = 0; e < sem.coef.size(); ++e) {
        const auto& edge = dag.edges()[e];
        in_edges[dag.index_of(edge.to)].emplace_back(dag.index_of(edge.from), sem.coef[e]);
    }

    std::vector<std::vector<double>> cols(dag.size(), std::vector<double>(n));
    for (auto v : dag.order()) {
        const auto key = rng::stream_key(seed, dag.name(v));
        const double sd = std::sqrt(sem.noise_var[v]);
        const double mu = sem.noise_mean[v];
        auto& out = cols[v];
        for (std::size_t r = 0; r < n; ++r) {
            double value = mu;
            for (const auto& [p, c] : in_edges[v]) value += c * cols[p][r];
            if (sd > 0.0) value += sd * rng::standard_normal(key, r);
            out[r] = value;
        }
    }

    Dataset data;
    for (auto v : dag.order()) data.add_column(dag.name(v), std::move(cols[v]));
    data.provenance = Provenance{std::move(mechanism), seed, n};
    return data;
}

} // namespace quartets
