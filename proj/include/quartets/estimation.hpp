#pragma once

#include "quartets/dataset.hpp"
#include "quartets/error.hpp"
#include "quartets/sem.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace quartets {

// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct OlsFit {
    std::string outcome;
    std::vector<std::string> regressors;
    double intercept = 0.0;
    std::map<std::string, double> coefficients;
    double residual_variance = 0.0;
    std::size_t n = 0;

    double coefficient(const std::string& name) const {
        auto it = coefficients.find(name);
        if (it == coefficients.end()) fail(ErrorKind::UnknownColumn, "'" + name + "' is not a regressor of this fit");
        return it->second;
    }
};

namespace detail {

inline void check_regressors(std::string_view outcome, const std::vector<std::string>& regressors) {
    std::set<std::string> seen;
    for (const auto& r : regressors) {
        if (r == outcome) fail(ErrorKind::InvalidArgument, "outcome '" + r + "' cannot also be a regressor");
        if (!seen.insert(r).second) fail(ErrorKind::InvalidArgument, "regressor '" + r + "' listed twice");
    }
}

inline void check_rank(const Eigen::MatrixXd& m, const char* what) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return;
    if (!(s(0) > 0.0) || s(s.size() - 1) < kRankTolerance * s(0))
        fail(ErrorKind::RankDeficient, std::string(what) + " is rank deficient; coefficients are not identified");
}

} // namespace detail

// Least squares with an intercept, solved by Householder QR of the design.
inline OlsFit fit_ols(const Dataset& data, const std::string& outcome, const std::vector<std::string>& regressors) {
    detail::check_regressors(outcome, regressors);
    auto y_col = data.column(outcome);
    std::vector<std::span<const double>> x_cols;
    for (const auto& r : regressors) x_cols.push_back(data.column(r));

    const auto n = data.rows();
    const auto p = regressors.size();
    if (n <= p + 1) {
        fail(ErrorKind::InsufficientRows, "need more than " + std::to_string(p + 1) + " rows for " +
                                              std::to_string(p) + " regressors plus intercept, have " +
                                              std::to_string(n));
    }

    const auto rows = static_cast<Eigen::Index>(n);
    const auto width = static_cast<Eigen::Index>(p + 1);
    Eigen::MatrixXd design(rows, width);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) design(i, static_cast<Eigen::Index>(j + 1)) = x_cols[j][static_cast<std::size_t>(i)];
        y(i) = y_col[static_cast<std::size_t>(i)];
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(width).triangularView<Eigen::Upper>();
    detail::check_rank(r, "design matrix");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - design * beta;

    OlsFit fit;
    fit.outcome = outcome;
    fit.regressors = regressors;
    fit.intercept = beta(0);
    for (std::size_t j = 0; j < p; ++j) fit.coefficients[regressors[j]] = beta(static_cast<Eigen::Index>(j + 1));
    fit.residual_variance = resid.squaredNorm() / static_cast<double>(n - p - 1);
    fit.n = n;
    return fit;
}

inline std::vector<double> predict(const OlsFit& fit, const Dataset& data) {
    std::vector<double> out(data.rows(), fit.intercept);
    for (const auto& r : fit.regressors) {
        auto col = data.column(r);
        const double b = fit.coefficients.at(r);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += b * col[i];
    }
    return out;
}

// Large-sample limit of fit_ols: Sigma_RR^-1 Sigma_RY from covariance blocks.
inline std::map<std::string, double> population_ols(const CovarianceMatrix& cov, const std::string& outcome,
                                                    const std::vector<std::string>& regressors) {
    detail::check_regressors(outcome, regressors);
    if (regressors.empty()) return {};
    const auto p = static_cast<Eigen::Index>(regressors.size());
    std::vector<std::size_t> idx;
    for (const auto& r : regressors) idx.push_back(cov.index(r));
    const auto iy = static_cast<Eigen::Index>(cov.index(outcome));

    Eigen::MatrixXd srr(p, p);
    Eigen::VectorXd sry(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j)
            srr(i, j) = cov.values(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                                   static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
        sry(i) = cov.values(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]), iy);
    }
    detail::check_rank(srr, "regressor covariance block");
    const Eigen::VectorXd beta = srr.ldlt().solve(sry);

    std::map<std::string, double> out;
    for (Eigen::Index i = 0; i < p; ++i) out[regressors[static_cast<std::size_t>(i)]] = beta(i);
    return out;
}

namespace detail {

inline std::vector<std::string> ate_regressors(std::string_view exposure, std::string_view outcome,
                                               const std::set<std::string>& adjust) {
    if (exposure == outcome) fail(ErrorKind::InvalidArgument, "exposure and outcome must differ");
    if (adjust.count(std::string(exposure)))
        fail(ErrorKind::InvalidArgument, "exposure '" + std::string(exposure) + "' is inside the adjustment set");
    if (adjust.count(std::string(outcome)))
        fail(ErrorKind::InvalidArgument, "outcome '" + std::string(outcome) + "' is inside the adjustment set");
    std::vector<std::string> regs{std::string(exposure)};
    regs.insert(regs.end(), adjust.begin(), adjust.end());
    return regs;
}

} // namespace detail

// Coefficient on the exposure in the regression of outcome on the exposure
// plus the adjustment set.
inline double ate(const Dataset& data, const std::string& exposure, const std::string& outcome,
                  const std::set<std::string>& adjust = {}) {
    return fit_ols(data, outcome, detail::ate_regressors(exposure, outcome, adjust)).coefficient(exposure);
}

inline double ate(const CovarianceMatrix& cov, const std::string& exposure, const std::string& outcome,
                  const std::set<std::string>& adjust = {}) {
    return population_ols(cov, outcome, detail::ate_regressors(exposure, outcome, adjust)).at(exposure);
}

inline double ate(const LinearSem& sem, const std::string& exposure, const std::string& outcome,
                  const std::set<std::string>& adjust = {}) {
    auto regs = detail::ate_regressors(exposure, outcome, adjust);
    return population_ols(population_covariance(sem), outcome, regs).at(exposure);
}

inline double correlation(const Dataset& data, const std::string& a, const std::string& b) {
    auto xa = data.column(a);
    auto xb = data.column(b);
    const auto n = xa.size();
    if (n < 2) fail(ErrorKind::InsufficientRows, "correlation needs at least two rows");
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += xa[i];
        mb += xb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = xa[i] - ma, db = xb[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (!(saa > 0.0)) fail(ErrorKind::ZeroVariance, "column '" + a + "' is constant");
    if (!(sbb > 0.0)) fail(ErrorKind::ZeroVariance, "column '" + b + "' is constant");
    if (a == b) return 1.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Sample covariance matrix (divisor n - 1) of the listed columns.
inline Eigen::MatrixXd sample_covariance(const Dataset& data, const std::vector<std::string>& columns) {
    const auto k = static_cast<Eigen::Index>(columns.size());
    const auto n = data.rows();
    if (n < 2) fail(ErrorKind::InsufficientRows, "covariance needs at least two rows");
    std::vector<std::span<const double>> cols;
    std::vector<double> means;
    for (const auto& c : columns) {
        cols.push_back(data.column(c));
        double m = 0;
        for (double v : cols.back()) m += v;
        means.push_back(m / static_cast<double>(n));
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            const auto& ci = cols[static_cast<std::size_t>(i)];
            const auto& cj = cols[static_cast<std::size_t>(j)];
            const double mi = means[static_cast<std::size_t>(i)], mj = means[static_cast<std::size_t>(j)];
            double acc = 0;
            for (std::size_t r = 0; r < n; ++r) acc += (ci[r] - mi) * (cj[r] - mj);
            out(i, j) = out(j, i) = acc / static_cast<double>(n - 1);
        }
    }
    return out;
}

} // namespace quartets
