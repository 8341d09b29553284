#pragma once

// Inverse design: choose structural coefficients so that population summary
// statistics of a SEM hit prescribed targets.
//
// Solver: damped Newton (Gauss-Newton with minimum-norm steps when there are
// more free coefficients than constraints) on the residuals
// statistic(theta) - target, with a central-difference Jacobian. Starts are
// taken from a fixed grid in lexicographic order; the first start that
// converges wins, which makes the result deterministic.

#include "quartets/error.hpp"
#include "quartets/sem.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace quartets {

enum class StatisticKind { UnadjustedSlope, Correlation };

// unadjusted_slope(a, b) is the population slope of b regressed on a,
// Cov(a, b) / Var(a).
struct Constraint {
    StatisticKind kind = StatisticKind::Correlation;
    std::string a;
    std::string b;
    double target = 0.0;
    double tolerance = 1e-6;
};

struct EdgeRef {
    std::string from;
    std::string to;
};

struct TargetSpec {
    std::vector<Constraint> constraints;
    std::vector<EdgeRef> free_coefficients;
};

struct SolverOptions {
    std::vector<double> start_grid{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    int max_iterations = 100;
    double fd_step = 1e-6;
    double divergence_bound = 1e8;
};

struct Solution {
    std::vector<std::pair<EdgeRef, double>> coefficients;
    std::vector<double> achieved;  // one per constraint, re-evaluated at the solution
    std::size_t start_index = 0;
    int iterations = 0;

    double at(std::string_view from, std::string_view to) const {
        for (const auto& [e, v] : coefficients)
            if (e.from == from && e.to == to) return v;
        fail(ErrorKind::UnknownNode, "edge " + std::string(from) + " -> " + std::string(to) + " was not solved for");
    }
};

inline double evaluate_statistic(const CovarianceMatrix& cov, const Constraint& c) {
    switch (c.kind) {
    case StatisticKind::Correlation: return implied_correlation(cov, c.a, c.b);
    case StatisticKind::UnadjustedSlope: {
        const double va = cov(c.a, c.a);
        if (!(va > 0.0)) fail(ErrorKind::ZeroVariance, "node '" + c.a + "' has zero variance");
        return cov(c.a, c.b) / va;
    }
    }
    return 0.0;
}

inline void validate_target_spec(const LinearSem& sem, const TargetSpec& spec) {
    if (spec.constraints.empty()) fail(ErrorKind::InvalidArgument, "at least one constraint is required");
    if (spec.free_coefficients.empty()) fail(ErrorKind::InvalidArgument, "at least one free coefficient is required");
    if (spec.free_coefficients.size() < spec.constraints.size()) {
        fail(ErrorKind::InvalidArgument, "need at least as many free coefficients as constraints (" +
                                             std::to_string(spec.free_coefficients.size()) + " < " +
                                             std::to_string(spec.constraints.size()) + ")");
    }
    for (const auto& c : spec.constraints) {
        sem.dag.index_of(c.a);
        sem.dag.index_of(c.b);
        if (!(c.tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "constraint tolerances must be positive");
        if (!std::isfinite(c.target)) fail(ErrorKind::InvalidArgument, "constraint targets must be finite");
    }
    for (const auto& e : spec.free_coefficients) sem.edge_index(e.from, e.to);
}

namespace detail {

class StatisticMap {
public:
    StatisticMap(LinearSem sem, const TargetSpec& spec) : sem_(std::move(sem)), spec_(spec) {
        for (const auto& e : spec.free_coefficients) edges_.push_back(sem_.edge_index(e.from, e.to));
    }

    // Statistics at theta, or nullopt where they are undefined.
    std::optional<Eigen::VectorXd> values(const Eigen::VectorXd& theta) {
        for (std::size_t i = 0; i < edges_.size(); ++i) sem_.coef[edges_[i]] = theta(static_cast<Eigen::Index>(i));
        try {
            const auto cov = population_covariance(sem_);
            Eigen::VectorXd out(static_cast<Eigen::Index>(spec_.constraints.size()));
            for (std::size_t i = 0; i < spec_.constraints.size(); ++i)
                out(static_cast<Eigen::Index>(i)) = evaluate_statistic(cov, spec_.constraints[i]);
            if (!out.allFinite()) return std::nullopt;
            return out;
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    std::optional<Eigen::VectorXd> residual(const Eigen::VectorXd& theta) {
        auto v = values(theta);
        if (!v) return std::nullopt;
        for (std::size_t i = 0; i < spec_.constraints.size(); ++i)
            (*v)(static_cast<Eigen::Index>(i)) -= spec_.constraints[i].target;
        return v;
    }

    bool within_tolerance(const Eigen::VectorXd& r, double scale = 1.0) const {
        for (std::size_t i = 0; i < spec_.constraints.size(); ++i)
            if (std::fabs(r(static_cast<Eigen::Index>(i))) > scale * spec_.constraints[i].tolerance) return false;
        return true;
    }

    const LinearSem& sem() const { return sem_; }

private:
    LinearSem sem_;
    const TargetSpec& spec_;
    std::vector<std::size_t> edges_;
};

struct StartResult {
    Eigen::VectorXd theta;
    int iterations = 0;
};

inline std::optional<StartResult> newton_from(StatisticMap& f, Eigen::VectorXd theta, const SolverOptions& opt) {
    const auto m = theta.size();
    auto r = f.residual(theta);
    if (!r) return std::nullopt;
    // Iterate well past the tolerance so reported statistics sit comfortably
    // inside it; success is still judged against the tolerance alone.
    for (int it = 0; it <= opt.max_iterations; ++it) {
        if (f.within_tolerance(*r, 1e-3)) return StartResult{theta, it};
        if (it == opt.max_iterations) break;

        Eigen::MatrixXd jac(r->size(), m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double h = opt.fd_step * std::max(1.0, std::fabs(theta(j)));
            Eigen::VectorXd up = theta, down = theta;
            up(j) += h;
            down(j) -= h;
            auto fu = f.values(up);
            auto fd = f.values(down);
            if (!fu || !fd) return std::nullopt;
            jac.col(j) = (*fu - *fd) / (2.0 * h);
        }
        const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(*r);
        if (!step.allFinite()) return std::nullopt;

        const double base = r->squaredNorm();
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1e-8) {
            Eigen::VectorXd trial = theta + lambda * step;
            auto rt = f.residual(trial);
            if (rt && rt->squaredNorm() < base) {
                theta = std::move(trial);
                r = std::move(rt);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
        if (theta.cwiseAbs().maxCoeff() > opt.divergence_bound) return std::nullopt;
    }
    if (f.within_tolerance(*r)) return StartResult{theta, opt.max_iterations};
    return std::nullopt;
}

// Range of the single-coefficient statistic over the whole real line,
// scanned on theta = tan(pi (u - 1/2)) plus far-out points.
inline std::optional<std::pair<double, double>> scan_range(StatisticMap& f, std::size_t constraint) {
    constexpr double kPi = 3.14159265358979323846;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto visit = [&](double th) {
        Eigen::VectorXd theta(1);
        theta(0) = th;
        if (auto v = f.values(theta)) {
            const double s = (*v)(static_cast<Eigen::Index>(constraint));
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    };
    constexpr int kSteps = 20000;
    for (int i = 1; i < kSteps; ++i) visit(std::tan(kPi * (static_cast<double>(i) / kSteps - 0.5)));
    for (double far : {1e6, 1e9, 1e12}) {
        visit(far);
        visit(-far);
    }
    if (!std::isfinite(lo)) return std::nullopt;
    return std::make_pair(lo, hi);
}

} // namespace detail

inline Solution solve_coefficients(const LinearSem& template_sem, const TargetSpec& spec, const SolverOptions& opt = {}) {
    validate_sem(template_sem);
    validate_target_spec(template_sem, spec);
    if (opt.start_grid.empty()) fail(ErrorKind::InvalidArgument, "start grid must not be empty");

    detail::StatisticMap f(template_sem, spec);
    const auto m = spec.free_coefficients.size();
    const auto g = opt.start_grid.size();
    std::size_t starts = 1;
    for (std::size_t i = 0; i < m; ++i) starts *= g;

    for (std::size_t s = 0; s < starts; ++s) {
        Eigen::VectorXd theta(static_cast<Eigen::Index>(m));
        std::size_t rest = s;
        for (std::size_t i = m; i-- > 0;) {
            theta(static_cast<Eigen::Index>(i)) = opt.start_grid[rest % g];
            rest /= g;
        }
        auto found = detail::newton_from(f, theta, opt);
        if (!found) continue;

        // Re-verify on a freshly built SEM.
        LinearSem solved = template_sem;
        for (std::size_t i = 0; i < m; ++i)
            solved.set_coefficient(spec.free_coefficients[i].from, spec.free_coefficients[i].to,
                                   found->theta(static_cast<Eigen::Index>(i)));
        const auto cov = population_covariance(solved);
        Solution sol;
        bool ok = true;
        for (const auto& c : spec.constraints) {
            const double v = evaluate_statistic(cov, c);
            sol.achieved.push_back(v);
            ok = ok && std::fabs(v - c.target) <= c.tolerance;
        }
        if (!ok) continue;
        for (std::size_t i = 0; i < m; ++i)
            sol.coefficients.emplace_back(spec.free_coefficients[i], found->theta(static_cast<Eigen::Index>(i)));
        sol.start_index = s;
        sol.iterations = found->iterations;
        return sol;
    }

    if (m == 1) {
        for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
            auto range = detail::scan_range(f, i);
            if (!range) continue;
            const auto& c = spec.constraints[i];
            std::ostringstream os;
            os.precision(6);
            os << std::fixed;
            if (c.target > range->second + c.tolerance) {
                os << "target " << c.target << " exceeds the supremum " << range->second << " of the statistic";
                fail(ErrorKind::Infeasible, os.str());
            }
            if (c.target < range->first - c.tolerance) {
                os << "target " << c.target << " is below the infimum " << range->first << " of the statistic";
                fail(ErrorKind::Infeasible, os.str());
            }
        }
    }
    fail(ErrorKind::NonConvergence, "no start converged within " + std::to_string(opt.max_iterations) +
                                        " iterations from " + std::to_string(starts) + " grid starts");
}

// `solve` block of a SEM config:
//   {"free": [{"from", "to"}...],
//    "targets": [{"statistic": "correlation"|"unadjusted_slope", "a", "b", "target", "tolerance"?}...],
//    "start_grid": [..]?}
inline TargetSpec target_spec_from_json(const nlohmann::json& block, SolverOptions* options = nullptr) {
    if (!block.is_object()) fail(ErrorKind::Parse, "'solve' must be an object");
    TargetSpec spec;
    const auto& free = detail::require_member(block, "free", "solve");
    if (!free.is_array()) fail(ErrorKind::Parse, "solve: 'free' must be an array");
    for (const auto& e : free)
        spec.free_coefficients.push_back({detail::require_string(e, "from", "solve.free"),
                                          detail::require_string(e, "to", "solve.free")});
    const auto& targets = detail::require_member(block, "targets", "solve");
    if (!targets.is_array()) fail(ErrorKind::Parse, "solve: 'targets' must be an array");
    for (const auto& t : targets) {
        Constraint c;
        const auto stat = detail::require_string(t, "statistic", "solve.targets");
        if (stat == "correlation")
            c.kind = StatisticKind::Correlation;
        else if (stat == "unadjusted_slope")
            c.kind = StatisticKind::UnadjustedSlope;
        else
            fail(ErrorKind::Parse, "solve.targets: unknown statistic '" + stat + "'");
        c.a = detail::require_string(t, "a", "solve.targets");
        c.b = detail::require_string(t, "b", "solve.targets");
        const auto& target = detail::require_member(t, "target", "solve.targets");
        if (!target.is_number()) fail(ErrorKind::Parse, "solve.targets: 'target' must be a number");
        c.target = target.get<double>();
        if (auto tol = t.find("tolerance"); tol != t.end()) {
            if (!tol->is_number()) fail(ErrorKind::Parse, "solve.targets: 'tolerance' must be a number");
            c.tolerance = tol->get<double>();
        }
        spec.constraints.push_back(std::move(c));
    }
    if (options) {
        if (auto grid = block.find("start_grid"); grid != block.end()) {
            if (!grid->is_array()) fail(ErrorKind::Parse, "solve: 'start_grid' must be an array");
            options->start_grid = grid->get<std::vector<double>>();
        }
    }
    return spec;
}

} // namespace quartets
