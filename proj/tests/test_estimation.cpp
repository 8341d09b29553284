#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace quartets;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::Internal;
}

Dataset table(std::vector<std::pair<std::string, std::vector<double>>> cols) {
    Dataset d;
    for (auto& [name, v] : cols) d.add_column(name, v);
    return d;
}

// Normal equations (X'X) b = X'y with an intercept column, solved by LDLT.
Eigen::VectorXd normal_equations(const Dataset& d, const std::string& y, const std::vector<std::string>& xs) {
    const auto n = static_cast<Eigen::Index>(d.rows());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(xs.size() + 1));
    Eigen::VectorXd yy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 0; j < xs.size(); ++j)
            x(i, static_cast<Eigen::Index>(j + 1)) = d.column(xs[j])[static_cast<std::size_t>(i)];
        yy(i) = d.column(y)[static_cast<std::size_t>(i)];
    }
    return (x.transpose() * x).ldlt().solve(x.transpose() * yy);
}

std::set<std::string> observed_others(const Dag& dag, const std::string& x, const std::string& y) {
    std::set<std::string> out;
    for (const auto& n : dag.nodes())
        if (n.name != x && n.name != y && n.observed) out.insert(n.name);
    return out;
}

} // namespace

TEST(FitOls, MediatorSlope) {
    const auto data = simulate(canonical_sem(MechanismTag::Mediator), 1'000'000, 99);
    EXPECT_NEAR(fit_ols(data, "Y", {"X"}).coefficient("X"), 1.0, 0.01);
}

TEST(FitOls, ConfounderAdjustedSlope) {
    const auto data = simulate(canonical_sem(MechanismTag::Confounder), 1'000'000, 99);
    const auto fit = fit_ols(data, "Y", {"X", "Z"});
    EXPECT_NEAR(fit.coefficient("X"), 0.5, 0.01);
    EXPECT_NEAR(fit.intercept, 0.0, 0.01);
    EXPECT_NEAR(fit.residual_variance, 1.0, 0.01);
}

TEST(FitOls, ExactFit) {
    const auto d = table({{"a", {1, 2, 3, 5, 8}}, {"b", {1, 2, 3, 5, 8}}});
    const auto fit = fit_ols(d, "b", {"a"});
    EXPECT_NEAR(fit.coefficient("a"), 1.0, 1e-12);
    EXPECT_NEAR(fit.intercept, 0.0, 1e-12);
    EXPECT_NEAR(fit.residual_variance, 0.0, 1e-20);
    EXPECT_EQ(fit.coefficients.size(), 1u);
    EXPECT_EQ(fit.n, 5u);
}

TEST(FitOls, AgreesWithNormalEquations) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sem = quartets::testing::random_sem(gen, 4, 0.6);
        const auto data = simulate(sem, 200, static_cast<std::uint64_t>(trial));
        std::vector<std::string> xs{sem.dag.name(1), sem.dag.name(2), sem.dag.name(3)};
        const auto fit = fit_ols(data, sem.dag.name(0), xs);
        const auto oracle = normal_equations(data, sem.dag.name(0), xs);
        EXPECT_NEAR(fit.intercept, oracle(0), 1e-8);
        for (std::size_t j = 0; j < xs.size(); ++j)
            EXPECT_NEAR(fit.coefficient(xs[j]), oracle(static_cast<Eigen::Index>(j + 1)), 1e-8);
        EXPECT_GE(fit.residual_variance, 0.0);
    }
}

TEST(FitOls, AffineRescalingOfRegressor) {
    const auto data = simulate(canonical_sem(MechanismTag::Confounder), 500, 5);
    const auto base = fit_ols(data, "Y", {"X", "Z"});
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{{2.0, 3.0}, {-0.5, 10.0}, {1e3, -7.0}}) {
        std::vector<double> x(data.column("X").begin(), data.column("X").end());
        for (auto& v : x) v = a * v + b;
        Dataset scaled;
        scaled.add_column("X", x);
        scaled.add_column("Z", std::vector<double>(data.column("Z").begin(), data.column("Z").end()));
        scaled.add_column("Y", std::vector<double>(data.column("Y").begin(), data.column("Y").end()));
        const auto fit = fit_ols(scaled, "Y", {"X", "Z"});
        EXPECT_NEAR(fit.coefficient("X"), base.coefficient("X") / a, 1e-8);
        const auto p0 = predict(base, data);
        const auto p1 = predict(fit, scaled);
        for (std::size_t i = 0; i < p0.size(); ++i) ASSERT_NEAR(p0[i], p1[i], 1e-8);
    }
}

TEST(FitOls, Errors) {
    const auto d = table({{"a", {1, 2, 3, 4}}, {"b", {2, 4, 6, 8}}, {"y", {1, 0, 1, 0}}});
    EXPECT_EQ(kind_of([&] { fit_ols(d, "y", {"a", "b"}); }), ErrorKind::RankDeficient);
    EXPECT_EQ(kind_of([&] { fit_ols(table({{"a", {1, 2}}, {"y", {1, 2}}}), "y", {"a"}); }),
              ErrorKind::InsufficientRows);
    EXPECT_EQ(kind_of([&] { fit_ols(d, "y", {"q"}); }), ErrorKind::UnknownColumn);
    EXPECT_EQ(kind_of([&] { fit_ols(d, "y", {"y"}); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { fit_ols(d, "y", {"a", "a"}); }), ErrorKind::InvalidArgument);
    const auto constant = table({{"c", {1, 1, 1, 1}}, {"y", {1, 2, 3, 5}}});
    EXPECT_EQ(kind_of([&] { fit_ols(constant, "y", {"c"}); }), ErrorKind::RankDeficient);
}

TEST(PopulationOls, Examples) {
    const auto collider = population_covariance(canonical_sem(MechanismTag::Collider));
    EXPECT_NEAR(population_ols(collider, "Y", {"X"}).at("X"), 1.0, 1e-12);

    // Covariance-block oracle: Var(X)=1, Var(Z)=3.0813, Cov(X,Z)=1.22,
    // Cov(X,Y)=1, Cov(Z,Y)=1.99.
    const double sxx = 1, szz = 3.0813, sxz = 1.22, sxy = 1, szy = 1.99;
    const double det = sxx * szz - sxz * sxz;
    const double bx = (szz * sxy - sxz * szy) / det;
    EXPECT_NEAR(det, 1.5929, 1e-12);
    EXPECT_NEAR(szz * sxy - sxz * szy, 0.6535, 1e-12);
    EXPECT_NEAR(population_ols(collider, "Y", {"X", "Z"}).at("X"), bx, 1e-12);
    EXPECT_NEAR(bx, 0.4103, 5e-5);

    const auto mbias = population_covariance(canonical_sem(MechanismTag::MBias));
    EXPECT_NEAR(population_ols(mbias, "Y", {"X", "Z"}).at("X"), 60.0 / 68.0, 1e-12);
    EXPECT_TRUE(population_ols(mbias, "Y", {}).empty());
}

TEST(PopulationOls, SingularBlockRejected) {
    auto sem = canonical_sem(MechanismTag::Mediator);
    sem.noise_var[sem.dag.index_of("Z")] = 0.0;  // Z is then an exact copy of X
    const auto cov = population_covariance(sem);
    EXPECT_EQ(kind_of([&] { population_ols(cov, "Y", {"X", "Z"}); }), ErrorKind::RankDeficient);
}

TEST(PopulationOls, SampleFitsConvergeForCanonicalSems) {
    for (auto tag : kAllTags) {
        const auto sem = canonical_sem(tag);
        const auto data = simulate(sem, 1'000'000, 77);
        const auto cov = population_covariance(sem);
        const auto pop = population_ols(cov, "Y", {"X", "Z"});
        const auto fit = fit_ols(data, "Y", {"X", "Z"});
        for (const auto& [k, v] : pop) EXPECT_NEAR(fit.coefficient(k), v, 0.01) << tag_name(tag) << " " << k;
    }
}

TEST(Ate, Examples) {
    EXPECT_NEAR(ate(canonical_sem(MechanismTag::Mediator), "X", "Y", {"Z"}), 0.0, 1e-12);
    EXPECT_NEAR(ate(canonical_sem(MechanismTag::Confounder), "X", "Y", {}), 1.0, 1e-12);
    EXPECT_EQ(kind_of([] { ate(canonical_sem(MechanismTag::Confounder), "X", "Y", {"X"}); }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { ate(canonical_sem(MechanismTag::Confounder), "X", "Y", {"Y"}); }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { ate(canonical_sem(MechanismTag::Confounder), "X", "Y", {"Q"}); }),
              ErrorKind::UnknownNode);
}

TEST(Ate, BackdoorTheoremOnCanonicalSems) {
    const std::vector<std::pair<MechanismTag, std::set<std::string>>> cases{
        {MechanismTag::Confounder, {"Z"}},
        {MechanismTag::Collider, {}},
        {MechanismTag::Mediator, {}},
        {MechanismTag::MBias, {}},
    };
    for (const auto& [tag, s] : cases) {
        const auto sem = canonical_sem(tag);
        ASSERT_TRUE(backdoor_valid(sem.dag, "X", "Y", s).valid);
        EXPECT_NEAR(ate(sem, "X", "Y", s), total_effect(sem, "X", "Y"), 1e-9);
    }
}

TEST(Ate, BackdoorTheoremOnRandomSems) {
    std::mt19937_64 gen(22);
    int valid_sets = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto sem = quartets::testing::random_sem(gen, 2 + trial % 5, 0.5);
        const auto x = sem.dag.name(0), y = sem.dag.name(1);
        const auto cov = population_covariance(sem);
        const auto pool = observed_others(sem.dag, x, y);
        for (const auto& s : quartets::testing::subsets_of({pool.begin(), pool.end()})) {
            if (!backdoor_valid(sem.dag, x, y, s).valid) continue;
            EXPECT_NEAR(ate(cov, x, y, s), total_effect(sem, x, y), 1e-9);
            ++valid_sets;
        }
    }
    EXPECT_GT(valid_sets, 100);
}

TEST(Ate, AddingVariableSeparatedFromOutcomeKeepsCoefficient) {
    std::mt19937_64 gen(23);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const auto sem = quartets::testing::random_sem(gen, 3 + trial % 4, 0.5);
        const auto x = sem.dag.name(0), y = sem.dag.name(1);
        const auto cov = population_covariance(sem);
        const double base = ate(cov, x, y);
        for (const auto& w : observed_others(sem.dag, x, y)) {
            if (!d_separated(sem.dag, w, y, {x})) continue;
            EXPECT_NEAR(ate(cov, x, y, {w}), base, 1e-9);
            ++checked;
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(Correlation, Examples) {
    const auto mb = simulate(canonical_sem(MechanismTag::MBias), 1'000'000, 31);
    EXPECT_NEAR(correlation(mb, "X", "Z"), 8 / std::sqrt(132.0), 0.01);
    EXPECT_EQ(correlation(mb, "X", "X"), 1.0);
    const auto conf = simulate(canonical_sem(MechanismTag::Confounder), 1'000'000, 31);
    EXPECT_NEAR(correlation(conf, "Z", "Y"), 1.5 / std::sqrt(3.5), 0.01);
    const auto constant = table({{"c", {1, 1, 1}}, {"y", {1, 2, 3}}});
    EXPECT_EQ(kind_of([&] { correlation(constant, "c", "y"); }), ErrorKind::ZeroVariance);
}
