#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime or data error,
// 2 usage error. All randomness comes from the mandatory --seed flag.

#include "quartets/quartets.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace quartets::cli {

inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigSource {
    std::string config;
    std::string mechanism;
    std::string variant = "single";
};

struct Options {
    std::string format = "text";

    // generate
    std::string gen_mechanism = "all";
    std::string gen_variant = "single";
    long long gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;

    // analyze
    std::string an_data;
    std::string an_exposure;
    std::string an_outcome;
    std::vector<std::string> an_adjust;
    std::string an_dataset;

    // dag
    ConfigSource dag_source;
    std::vector<std::string> dsep_nodes;
    std::vector<std::string> dsep_given;
    std::string dag_exposure;
    std::string dag_outcome;
    std::vector<std::string> dag_adjust;
    std::string dot_out;

    // reproduce
    int rep_table = 0;
    long long rep_n = 100;
    std::uint64_t rep_seed = 0;

    // solve
    std::string solve_config;

    // plot
    std::string plot_data;
    std::string plot_out;
};

namespace detail {

inline std::string fmt_num(double v, int decimals = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
    auto s = os.str();
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline void add_source_options(CLI::App* sub, ConfigSource& src) {
    sub->add_option("--config", src.config, "DAG or SEM config file (JSON)");
    sub->add_option("--mechanism", src.mechanism, "bundled mechanism: collider, confounder, mediator, m_bias");
    sub->add_option("--variant", src.variant, "bundled variant: single or time");
}

inline nlohmann::json load_config_json(const ConfigSource& src) {
    if (!src.config.empty() && !src.mechanism.empty())
        throw UsageError("use either --config or --mechanism, not both");
    if (src.config.empty() && src.mechanism.empty()) throw UsageError("one of --config or --mechanism is required");
    if (!src.mechanism.empty()) {
        auto tag = parse_tag(src.mechanism);
        auto variant = parse_variant(src.variant);
        if (!tag) throw UsageError("unknown mechanism '" + src.mechanism + "'");
        if (!variant) throw UsageError("unknown variant '" + src.variant + "'");
        const auto path = default_config_dir() / (config_name({*tag, *variant}) + ".json");
        return quartets::detail::parse_json_text(read_text_file(path));
    }
    return quartets::detail::parse_json_text(read_text_file(src.config));
}

inline NodeSet to_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

inline void check_nodes(const Dag& dag, const std::vector<std::string>& names) {
    for (const auto& n : names)
        if (!dag.contains(n)) throw UsageError("unknown node '" + n + "'");
}

inline std::string render_set(const std::vector<std::string>& s) { return quartets::detail::brace_set(s); }

} // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_generate(const Options& o, std::ostream& out) {
    const auto variant = parse_variant(o.gen_variant);
    if (!variant) throw UsageError("unknown variant '" + o.gen_variant + "'");
    std::vector<MechanismTag> tags;
    if (o.gen_mechanism == "all") {
        tags.assign(kAllTags.begin(), kAllTags.end());
    } else if (auto t = parse_tag(o.gen_mechanism)) {
        tags.push_back(*t);
    } else {
        throw UsageError("unknown mechanism '" + o.gen_mechanism + "'");
    }
    if (o.gen_n < 1) throw UsageError("--n must be a positive integer");
    if (o.gen_out.empty()) throw UsageError("--out is required");

    QuartetBundle bundle;
    bundle.variant = *variant;
    bundle.n = static_cast<std::size_t>(o.gen_n);
    bundle.seed = o.gen_seed;
    for (auto t : tags) bundle.members.push_back(generate_member({t, *variant}, bundle.n, o.gen_seed));
    export_csv(bundle, o.gen_out);

    const auto header = csv_header(*variant);
    const auto rows = bundle.n * bundle.members.size();
    if (o.format == "structured") {
        nlohmann::json j{{"command", "generate"},
                         {"path", o.gen_out},
                         {"variant", variant_name(*variant)},
                         {"n", bundle.n},
                         {"seed", o.gen_seed},
                         {"rows", rows},
                         {"columns", header},
                         {"mechanisms", nlohmann::json::array()}};
        for (auto t : tags) j["mechanisms"].push_back(tag_name(t));
        out << j.dump(2) << '\n';
    } else {
        out << "wrote " << rows << " rows to " << o.gen_out << " (n=" << bundle.n << " per dataset, seed=" << o.gen_seed
            << ", variant=" << variant_name(*variant) << ", columns=" << quartets::detail::join(header, ",") << ")\n";
    }
    return kOk;
}

inline int cmd_analyze(const Options& o, std::ostream& out) {
    if (o.an_data.empty() || o.an_exposure.empty() || o.an_outcome.empty())
        throw UsageError("--data, --exposure and --outcome are required");
    if (o.an_exposure == o.an_outcome) throw UsageError("exposure and outcome must differ");
    std::set<std::string> adjust(o.an_adjust.begin(), o.an_adjust.end());
    if (adjust.count(o.an_exposure)) throw UsageError("adjustment set contains the exposure '" + o.an_exposure + "'");
    if (adjust.count(o.an_outcome)) throw UsageError("adjustment set contains the outcome '" + o.an_outcome + "'");
    if (adjust.size() != o.an_adjust.size()) throw UsageError("adjustment set lists a column twice");

    const auto table = load_csv_table(o.an_data);
    std::vector<std::string> columns{o.an_exposure, o.an_outcome};
    columns.insert(columns.end(), o.an_adjust.begin(), o.an_adjust.end());
    for (const auto& c : columns)
        if (!table.find(c)) fail(ErrorKind::UnknownColumn, "column '" + c + "' not found in " + o.an_data);

    // Group by the dataset label column when present.
    std::vector<std::pair<std::optional<std::string>, std::vector<std::size_t>>> groups;
    if (auto label_col = table.find("dataset")) {
        std::map<std::string, std::size_t> slot;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& label = table.rows[r][*label_col];
            if (!o.an_dataset.empty()) {
                auto want = parse_tag(o.an_dataset);
                auto have = parse_tag(label);
                const bool match = (want && have) ? *want == *have : label == o.an_dataset;
                if (!match) continue;
            }
            auto [it, inserted] = slot.emplace(label, groups.size());
            if (inserted) groups.push_back({label, {}});
            groups[it->second].second.push_back(r);
        }
        if (groups.empty()) fail(ErrorKind::Schema, "no rows for dataset '" + o.an_dataset + "'");
    } else {
        if (!o.an_dataset.empty()) fail(ErrorKind::Schema, "--dataset given but the CSV has no 'dataset' column");
        std::vector<std::size_t> all(table.rows.size());
        for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
        groups.push_back({std::nullopt, std::move(all)});
    }

    nlohmann::json j{{"command", "analyze"},
                     {"exposure", o.an_exposure},
                     {"outcome", o.an_outcome},
                     {"adjust", o.an_adjust},
                     {"groups", nlohmann::json::array()}};
    std::ostringstream text;
    for (const auto& [label, rows] : groups) {
        const auto data = dataset_from_table(table, columns, rows);
        const double unadj = ate(data, o.an_exposure, o.an_outcome);
        std::optional<double> adj;
        if (!adjust.empty()) adj = ate(data, o.an_exposure, o.an_outcome, adjust);

        nlohmann::json g{{"dataset", label ? nlohmann::json(*label) : nlohmann::json(nullptr)},
                         {"n", data.rows()},
                         {"unadjusted_slope", unadj},
                         {"adjusted_slope", adj ? nlohmann::json(*adj) : nlohmann::json(nullptr)},
                         {"correlations", nlohmann::json::array()}};
        text << "dataset: " << (label ? *label : std::string("(all rows)")) << " (n=" << data.rows() << ")\n";
        text << "  unadjusted slope of " << o.an_outcome << " on " << o.an_exposure << ": " << detail::fmt_num(unadj)
             << '\n';
        if (adj) {
            text << "  adjusted slope (adjusting for " << quartets::detail::join(o.an_adjust, ", ")
                 << "): " << detail::fmt_num(*adj) << '\n';
        }
        for (std::size_t a = 0; a < columns.size(); ++a) {
            for (std::size_t b = a + 1; b < columns.size(); ++b) {
                const double r = correlation(data, columns[a], columns[b]);
                g["correlations"].push_back({{"a", columns[a]}, {"b", columns[b]}, {"r", r}});
                text << "  cor(" << columns[a] << ", " << columns[b] << ") = " << detail::fmt_num(r) << '\n';
            }
        }
        j["groups"].push_back(std::move(g));
    }
    if (o.format == "structured")
        out << j.dump(2) << '\n';
    else
        out << text.str();
    return kOk;
}

inline int cmd_dsep(const Options& o, std::ostream& out) {
    if (o.dsep_nodes.size() != 2) throw UsageError("dsep needs exactly two nodes");
    const auto& a = o.dsep_nodes[0];
    const auto& b = o.dsep_nodes[1];
    if (a == b) throw UsageError("dsep endpoints must differ");
    const auto given = detail::to_set(o.dsep_given);
    if (given.count(a) || given.count(b)) throw UsageError("--given must not contain the endpoints");
    const auto dag = dag_from_json(detail::load_config_json(o.dag_source));
    detail::check_nodes(dag, o.dsep_nodes);
    detail::check_nodes(dag, o.dsep_given);

    const auto report = explain_d_separation(dag, a, b, given);
    std::vector<std::string> reasons;
    for (const auto& [path, verdict] : report.paths)
        if (verdict.blocked == report.separated) reasons.push_back(verdict.reason);

    if (o.format == "structured") {
        nlohmann::json j{{"command", "dsep"},
                         {"a", a},
                         {"b", b},
                         {"given", o.dsep_given},
                         {"separated", report.separated},
                         {"paths", nlohmann::json::array()}};
        for (const auto& [path, verdict] : report.paths)
            j["paths"].push_back({{"path", path.to_string()}, {"blocked", verdict.blocked}, {"reason", verdict.reason}});
        out << j.dump(2) << '\n';
        return kOk;
    }
    if (report.separated) {
        out << "d-separated";
        if (report.paths.empty())
            out << " (no connecting path)";
        else
            out << " (" << quartets::detail::join(reasons, "; ") << ")";
    } else {
        out << "connected (" << reasons.front() << ")";
    }
    out << '\n';
    for (const auto& [path, verdict] : report.paths)
        out << "  " << path.to_string() << ": " << (verdict.blocked ? "" : "open, ") << verdict.reason << '\n';
    return kOk;
}

inline nlohmann::json report_to_json(const AdjustmentReport& r) {
    nlohmann::json j{{"exposure", r.exposure},
                     {"outcome", r.outcome},
                     {"candidate_set", r.candidate_set},
                     {"valid", r.valid},
                     {"open_backdoor_paths", r.open_backdoor_paths},
                     {"violations", nlohmann::json::array()}};
    for (const auto& v : r.violations) j["violations"].push_back({{"kind", to_string(v.kind)}, {"detail", v.detail}});
    return j;
}

inline int cmd_backdoor(const Options& o, std::ostream& out) {
    if (o.dag_exposure.empty() || o.dag_outcome.empty()) throw UsageError("--exposure and --outcome are required");
    if (o.dag_exposure == o.dag_outcome) throw UsageError("exposure and outcome must differ");
    const auto adjust = detail::to_set(o.dag_adjust);
    if (adjust.count(o.dag_exposure) || adjust.count(o.dag_outcome))
        throw UsageError("--adjust must not contain the exposure or the outcome");
    const auto dag = dag_from_json(detail::load_config_json(o.dag_source));
    detail::check_nodes(dag, {o.dag_exposure, o.dag_outcome});
    detail::check_nodes(dag, o.dag_adjust);

    const auto r = backdoor_valid(dag, o.dag_exposure, o.dag_outcome, adjust);
    if (o.format == "structured") {
        auto j = report_to_json(r);
        j["command"] = "backdoor";
        out << j.dump(2) << '\n';
        return kOk;
    }
    out << "adjustment set " << detail::render_set(r.candidate_set) << " for " << r.exposure << " -> " << r.outcome
        << ": " << (r.valid ? "valid" : "invalid") << '\n';
    for (const auto& v : r.violations) out << "  " << to_string(v.kind) << ": " << v.detail << '\n';
    return kOk;
}

inline int cmd_sets(const Options& o, std::ostream& out) {
    if (o.dag_exposure.empty() || o.dag_outcome.empty()) throw UsageError("--exposure and --outcome are required");
    if (o.dag_exposure == o.dag_outcome) throw UsageError("exposure and outcome must differ");
    const auto dag = dag_from_json(detail::load_config_json(o.dag_source));
    detail::check_nodes(dag, {o.dag_exposure, o.dag_outcome});
    const auto sets = minimal_backdoor_sets(dag, o.dag_exposure, o.dag_outcome);
    if (o.format == "structured") {
        out << nlohmann::json{{"command", "sets"}, {"exposure", o.dag_exposure}, {"outcome", o.dag_outcome}, {"sets", sets}}
                   .dump(2)
            << '\n';
        return kOk;
    }
    if (sets.empty()) out << "no valid adjustment set among observed nodes\n";
    for (const auto& s : sets) out << detail::render_set(s) << '\n';
    return kOk;
}

inline int cmd_dot(const Options& o, std::ostream& out) {
    const auto config = detail::load_config_json(o.dag_source);
    std::string dot;
    if (config.contains("noise"))
        dot = to_dot(sem_from_json(config).dag, edge_labels(sem_from_json(config)));
    else
        dot = to_dot(dag_from_json(config));
    if (!o.dot_out.empty()) {
        std::ofstream f(o.dot_out, std::ios::binary);
        if (!f || !(f << dot)) fail(ErrorKind::Io, "cannot write '" + o.dot_out + "'");
    }
    if (o.format == "structured") {
        nlohmann::json j{{"command", "dot"}, {"dot", dot}};
        if (!o.dot_out.empty()) j["path"] = o.dot_out;
        out << j.dump(2) << '\n';
    } else if (o.dot_out.empty()) {
        out << dot;
    } else {
        out << "wrote " << o.dot_out << '\n';
    }
    return kOk;
}

inline int cmd_reproduce(const Options& o, bool seed_given, std::ostream& out) {
    if (o.rep_table != 2 && o.rep_table != 3 && o.rep_table != 4)
        throw UsageError("--table must be 2, 3 or 4");
    if (o.rep_table != 2) {
        if (!seed_given) throw UsageError("--seed is required for tables 3 and 4");
        if (o.rep_n < 4) throw UsageError("--n must be at least 4 for sampled estimates");
    }
    const auto t = reproduce_table(o.rep_table, static_cast<std::size_t>(o.rep_n), o.rep_seed);
    if (o.format == "structured")
        out << t.data.dump(2) << '\n';
    else
        out << t.render_text();
    return kOk;
}

inline int cmd_solve(const Options& o, std::ostream& out) {
    if (o.solve_config.empty()) throw UsageError("--config is required");
    const auto config = quartets::detail::parse_json_text(read_text_file(o.solve_config));
    const auto sem = sem_from_json(config);
    if (!config.contains("solve")) fail(ErrorKind::Parse, "config has no 'solve' block");
    SolverOptions opts;
    const auto spec = target_spec_from_json(config.at("solve"), &opts);
    const auto sol = solve_coefficients(sem, spec, opts);

    if (o.format == "structured") {
        nlohmann::json j{{"command", "solve"},
                         {"coefficients", nlohmann::json::array()},
                         {"constraints", nlohmann::json::array()},
                         {"iterations", sol.iterations},
                         {"start_index", sol.start_index}};
        for (const auto& [e, v] : sol.coefficients) j["coefficients"].push_back({{"from", e.from}, {"to", e.to}, {"value", v}});
        for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
            const auto& c = spec.constraints[i];
            j["constraints"].push_back({{"statistic", c.kind == StatisticKind::Correlation ? "correlation" : "unadjusted_slope"},
                                        {"a", c.a},
                                        {"b", c.b},
                                        {"target", c.target},
                                        {"achieved", sol.achieved[i]}});
        }
        out << j.dump(2) << '\n';
        return kOk;
    }
    for (const auto& [e, v] : sol.coefficients) out << e.from << " -> " << e.to << " = " << detail::fmt_num(v, 6) << '\n';
    for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
        const auto& c = spec.constraints[i];
        out << "  " << (c.kind == StatisticKind::Correlation ? "cor(" : "slope(") << c.a << ", " << c.b
            << "): target " << detail::fmt_num(c.target, 6) << ", achieved " << detail::fmt_num(sol.achieved[i], 6) << '\n';
    }
    return kOk;
}

inline int cmd_plot(const Options& o, std::ostream& out) {
    if (o.plot_data.empty() || o.plot_out.empty()) throw UsageError("--data and --out are required");
    const auto bundle = import_csv(o.plot_data);
    const auto plot = render_quartet_svg(bundle);
    std::ofstream f(o.plot_out, std::ios::binary);
    if (!f || !(f << plot.svg)) fail(ErrorKind::Io, "cannot write '" + o.plot_out + "'");
    if (o.format == "structured") {
        nlohmann::json j{{"command", "plot"}, {"path", o.plot_out}, {"panels", nlohmann::json::array()}};
        for (const auto& p : plot.panels) j["panels"].push_back({{"mechanism", tag_name(p.tag)}, {"slope", p.slope}});
        out << j.dump(2) << '\n';
        return kOk;
    }
    out << "wrote " << o.plot_out << '\n';
    for (const auto& p : plot.panels) out << "  " << dataset_label(p.tag) << ": slope " << detail::fmt_num(p.slope, 3) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Causal quartet workbench: linear SEMs, d-separation, backdoor adjustment"};
    app.name("quartets");
    app.require_subcommand(1);

    auto add_format = [&o](CLI::App* sub) {
        sub->add_option("--format", o.format, "text or structured (JSON)")->check(CLI::IsMember({"text", "structured"}));
    };

    auto* gen = app.add_subcommand("generate", "simulate quartet datasets to CSV");
    gen->add_option("--mechanism", o.gen_mechanism, "collider, confounder, mediator, m_bias or all");
    gen->add_option("--variant", o.gen_variant, "single or time");
    gen->add_option("--n", o.gen_n, "rows per dataset")->required();
    gen->add_option("--seed", o.gen_seed, "master seed")->required();
    gen->add_option("--out", o.gen_out, "output CSV path")->required();
    add_format(gen);

    auto* an = app.add_subcommand("analyze", "regression slopes and correlations for a CSV");
    an->add_option("--data", o.an_data, "input CSV")->required();
    an->add_option("--exposure", o.an_exposure, "exposure column")->required();
    an->add_option("--outcome", o.an_outcome, "outcome column")->required();
    an->add_option("--adjust", o.an_adjust, "adjustment columns")->delimiter(',');
    an->add_option("--dataset", o.an_dataset, "restrict to one dataset label or mechanism name");
    add_format(an);

    auto* dag = app.add_subcommand("dag", "audit a DAG config");
    dag->require_subcommand(1);
    auto* dsep = dag->add_subcommand("dsep", "test d-separation of two nodes");
    dsep->add_option("nodes", o.dsep_nodes, "the two nodes")->expected(2);
    dsep->add_option("--given", o.dsep_given, "conditioning set")->delimiter(',');
    auto* bd = dag->add_subcommand("backdoor", "check an adjustment set against the backdoor criterion");
    bd->add_option("--exposure", o.dag_exposure)->required();
    bd->add_option("--outcome", o.dag_outcome)->required();
    bd->add_option("--adjust", o.dag_adjust)->delimiter(',');
    auto* sets = dag->add_subcommand("sets", "list minimal valid adjustment sets");
    sets->add_option("--exposure", o.dag_exposure)->required();
    sets->add_option("--outcome", o.dag_outcome)->required();
    auto* dot = dag->add_subcommand("dot", "Graphviz export");
    dot->add_option("--out", o.dot_out, "output path (default: standard output)");
    for (auto* s : {dsep, bd, sets, dot}) {
        detail::add_source_options(s, o.dag_source);
        add_format(s);
    }

    auto* rep = app.add_subcommand("reproduce", "reproduce a results table");
    rep->add_option("--table", o.rep_table, "2, 3 or 4")->required();
    rep->add_option("--n", o.rep_n, "rows per sampled dataset");
    auto* rep_seed = rep->add_option("--seed", o.rep_seed, "master seed");
    add_format(rep);

    auto* solve = app.add_subcommand("solve", "solve for coefficients matching target statistics");
    solve->add_option("--config", o.solve_config, "SEM config with a 'solve' block")->required();
    add_format(solve);

    auto* plot = app.add_subcommand("plot", "four-panel scatter SVG of a quartet CSV");
    plot->add_option("--data", o.plot_data, "quartet CSV")->required();
    plot->add_option("--out", o.plot_out, "output SVG path")->required();
    add_format(plot);

    std::vector<const char*> argv{"quartets"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run 'quartets --help' for usage\n";
        return kUsageError;
    }

    try {
        if (gen->parsed()) return cmd_generate(o, out);
        if (an->parsed()) return cmd_analyze(o, out);
        if (dsep->parsed()) return cmd_dsep(o, out);
        if (bd->parsed()) return cmd_backdoor(o, out);
        if (sets->parsed()) return cmd_sets(o, out);
        if (dot->parsed()) return cmd_dot(o, out);
        if (rep->parsed()) return cmd_reproduce(o, rep_seed->count() > 0, out);
        if (solve->parsed()) return cmd_solve(o, out);
        if (plot->parsed()) return cmd_plot(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << "run 'quartets --help' for usage\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        const bool usage = e.kind() == ErrorKind::UnknownNode || e.kind() == ErrorKind::InvalidArgument;
        return usage ? kUsageError : kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    err << "error: no command given\n";
    return kUsageError;
}

} // namespace quartets::cli
