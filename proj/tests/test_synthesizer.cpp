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

LinearSem with_unit_coefficients(LinearSem sem) {
    for (auto& c : sem.coef) c = 1.0;
    return sem;
}

TargetSpec collider_spec(double xz, double zy) {
    return {{{StatisticKind::Correlation, "X", "Z", xz}, {StatisticKind::Correlation, "Z", "Y", zy}},
            {{"X", "Z"}, {"Y", "Z"}}};
}

TargetSpec m_bias_spec(double xz) { return {{{StatisticKind::Correlation, "X", "Z", xz}}, {{"U1", "Z"}}}; }

// cor(X, Z) in the M-bias graph with unit coefficients except U1 -> Z = b.
double m_bias_closed_form(double b) { return b / std::sqrt(2 * (b * b + 2)); }

double bisect_m_bias(double target) {
    double lo = 0.0, hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (m_bias_closed_form(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(Solve, ColliderRecoversPublishedCoefficients) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Collider));
    const auto truth = canonical_sem(MechanismTag::Collider);
    const double xz = implied_correlation(truth, "X", "Z");
    const double zy = implied_correlation(truth, "Z", "Y");
    const auto sol = solve_coefficients(tmpl, collider_spec(xz, zy));
    EXPECT_NEAR(sol.at("X", "Z"), 0.45, 1e-4);
    EXPECT_NEAR(sol.at("Y", "Z"), 0.77, 1e-4);
    ASSERT_EQ(sol.achieved.size(), 2u);
    EXPECT_NEAR(sol.achieved[0], xz, 1e-6);
    EXPECT_NEAR(sol.achieved[1], zy, 1e-6);
}

TEST(Solve, ColliderFromRoundedTargets) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Collider));
    const auto sol = solve_coefficients(tmpl, collider_spec(0.696, 0.802));
    EXPECT_NEAR(sol.at("X", "Z"), 0.45, 0.01);
    EXPECT_NEAR(sol.at("Y", "Z"), 0.77, 0.01);
}

TEST(Solve, MBiasSingleCoefficient) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::MBias));
    const double target = implied_correlation(canonical_sem(MechanismTag::MBias), "X", "Z");
    EXPECT_NEAR(target, m_bias_closed_form(8.0), 1e-12);
    EXPECT_NEAR(solve_coefficients(tmpl, m_bias_spec(target)).at("U1", "Z"), 8.0, 0.1);
}

TEST(Solve, MBiasMatchesBisectionOracle) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::MBias));
    for (double target : {0.2, 0.5, 0.65, 0.696, 0.7}) {
        const auto sol = solve_coefficients(tmpl, m_bias_spec(target));
        const double b = sol.at("U1", "Z");
        EXPECT_NEAR(m_bias_closed_form(b), target, 1e-6);
        EXPECT_NEAR(b, bisect_m_bias(target), 1e-3 * (1 + b)) << target;
    }
}

TEST(Solve, MBiasInfeasibleTargetReportsBound) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::MBias));
    try {
        solve_coefficients(tmpl, m_bias_spec(0.9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
        EXPECT_NE(std::string(e.what()).find("supremum 0.707"), std::string::npos) << e.what();
    }
    try {
        solve_coefficients(tmpl, m_bias_spec(-0.9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
        EXPECT_NE(std::string(e.what()).find("infimum -0.707"), std::string::npos) << e.what();
    }
}

TEST(Solve, UnderdeterminedSystemSatisfiesConstraint) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Collider));
    const TargetSpec spec{{{StatisticKind::Correlation, "X", "Z", 0.3}}, {{"X", "Z"}, {"Y", "Z"}}};
    const auto sol = solve_coefficients(tmpl, spec);
    auto solved = tmpl;
    solved.set_coefficient("X", "Z", sol.at("X", "Z"));
    solved.set_coefficient("Y", "Z", sol.at("Y", "Z"));
    EXPECT_NEAR(implied_correlation(solved, "X", "Z"), 0.3, 1e-6);
}

TEST(Solve, SlopeStatistic) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Confounder));
    const TargetSpec spec{{{StatisticKind::UnadjustedSlope, "X", "Y", 1.0}}, {{"X", "Y"}}};
    const auto sol = solve_coefficients(tmpl, spec);
    EXPECT_NEAR(sol.at("X", "Y"), 0.5, 1e-5);
}

TEST(Solve, Deterministic) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Collider));
    const auto a = solve_coefficients(tmpl, collider_spec(0.696, 0.802));
    const auto b = solve_coefficients(tmpl, collider_spec(0.696, 0.802));
    ASSERT_EQ(a.coefficients.size(), b.coefficients.size());
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        EXPECT_EQ(a.coefficients[i].second, b.coefficients[i].second);
    EXPECT_EQ(a.achieved, b.achieved);
    EXPECT_EQ(a.start_index, b.start_index);
}

TEST(Solve, RoundTripOnRandomFeasibleTargets) {
    std::mt19937_64 gen(404);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    int trials = 0, recovered = 0;
    while (trials < 1000) {
        auto sem = quartets::testing::random_sem(gen, 3 + static_cast<std::size_t>(trials % 3), 0.7);
        const auto edges = sem.dag.edges();
        if (edges.size() < 2) continue;
        const std::size_t m = 1 + static_cast<std::size_t>(trials % 2);
        std::vector<std::size_t> pick(edges.size());
        for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
        std::shuffle(pick.begin(), pick.end(), gen);
        pick.resize(m);

        TargetSpec spec;
        for (auto e : pick) spec.free_coefficients.push_back({edges[e].from, edges[e].to});
        const auto cov = population_covariance(sem);
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> node(0, sem.dag.size() - 1);
            std::size_t a = node(gen), b = node(gen);
            while (b == a) b = node(gen);
            Constraint c{i % 2 ? StatisticKind::UnadjustedSlope : StatisticKind::Correlation, sem.dag.name(a),
                         sem.dag.name(b), 0.0};
            c.target = evaluate_statistic(cov, c);
            spec.constraints.push_back(c);
        }
        // Scramble the free coefficients so the solver starts from a template.
        for (auto e : pick) sem.coef[e] = coef(gen);
        ++trials;
        try {
            const auto sol = solve_coefficients(sem, spec);
            auto solved = sem;
            for (const auto& [e, v] : sol.coefficients) solved.set_coefficient(e.from, e.to, v);
            const auto check = population_covariance(solved);
            bool ok = true;
            for (const auto& c : spec.constraints) ok = ok && std::abs(evaluate_statistic(check, c) - c.target) <= c.tolerance;
            EXPECT_TRUE(ok);
            recovered += ok;
        } catch (const Error&) {
        }
    }
    EXPECT_GE(recovered, 990) << recovered << " / " << trials;
}

TEST(Solve, SpecValidation) {
    const auto tmpl = with_unit_coefficients(canonical_sem(MechanismTag::Collider));
    EXPECT_EQ(kind_of([&] { solve_coefficients(tmpl, {{}, {{"X", "Z"}}}); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { solve_coefficients(tmpl, {{{StatisticKind::Correlation, "X", "Z", 0.5}}, {}}); }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { solve_coefficients(tmpl, {{{StatisticKind::Correlation, "X", "Z", 0.5}}, {{"Z", "X"}}}); }),
              ErrorKind::UnknownNode);
    EXPECT_EQ(kind_of([&] {
                  solve_coefficients(tmpl, {{{StatisticKind::Correlation, "X", "Z", 0.5, 0.0}}, {{"X", "Z"}}});
              }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { solve_coefficients(tmpl, collider_spec(0.5, 0.5), SolverOptions{{}, 10, 1e-6, 1e8}); }),
              ErrorKind::InvalidArgument);
}

TEST(Solve, BundledSolveConfigs) {
    for (const char* name : {"collider_solve.json", "m_bias_solve.json"}) {
        const auto text = read_text_file(std::filesystem::path(QUARTETS_SOURCE_DIR) / "configs" / "solve" / name);
        const auto json = nlohmann::json::parse(text);
        SolverOptions opt;
        const auto spec = target_spec_from_json(json.at("solve"), &opt);
        const auto sol = solve_coefficients(sem_from_json(json), spec, opt);
        if (std::string(name) == "m_bias_solve.json") {
            EXPECT_NEAR(sol.at("U1", "Z"), 8.0, 0.1);
        } else {
            EXPECT_NEAR(sol.at("X", "Z"), 0.45, 0.01);
            EXPECT_NEAR(sol.at("Y", "Z"), 0.77, 0.01);
        }
    }
    EXPECT_EQ(kind_of([] { target_spec_from_json(nlohmann::json::parse(R"({"free":[]})")); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] {
                  target_spec_from_json(nlohmann::json::parse(
                      R"({"free":[],"targets":[{"statistic":"median","a":"X","b":"Y","target":1}]})"));
              }),
              ErrorKind::Parse);
}
