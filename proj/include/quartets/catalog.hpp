#pragma once

// The four canonical mechanisms (collider, confounder, mediator, M-bias) in
// single and time-unrolled form, quartet generation, the combined CSV
// layout, and table reproduction.

#include "quartets/dag.hpp"
#include "quartets/dataset.hpp"
#include "quartets/error.hpp"
#include "quartets/estimation.hpp"
#include "quartets/normal_stream.hpp"
#include "quartets/sem.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#ifndef QUARTETS_DEFAULT_CONFIG_DIR
#define QUARTETS_DEFAULT_CONFIG_DIR "configs"
#endif

namespace quartets {

enum class MechanismTag { Collider, Confounder, Mediator, MBias };
enum class Variant { Single, Time };

inline constexpr std::array<MechanismTag, 4> kAllTags{MechanismTag::Collider, MechanismTag::Confounder,
                                                      MechanismTag::Mediator, MechanismTag::MBias};

struct Mechanism {
    MechanismTag tag;
    Variant variant;
};

constexpr std::string_view tag_name(MechanismTag t) {
    switch (t) {
    case MechanismTag::Collider: return "collider";
    case MechanismTag::Confounder: return "confounder";
    case MechanismTag::Mediator: return "mediator";
    case MechanismTag::MBias: return "m_bias";
    }
    return "?";
}

// Value of the `dataset` column in exported CSVs.
constexpr std::string_view dataset_label(MechanismTag t) {
    switch (t) {
    case MechanismTag::Collider: return "(1) Collider";
    case MechanismTag::Confounder: return "(2) Confounder";
    case MechanismTag::Mediator: return "(3) Mediator";
    case MechanismTag::MBias: return "(4) M-Bias";
    }
    return "?";
}

constexpr std::string_view variant_name(Variant v) { return v == Variant::Single ? "single" : "time"; }

inline std::optional<MechanismTag> parse_tag(std::string_view s) {
    for (auto t : kAllTags)
        if (s == tag_name(t) || s == dataset_label(t)) return t;
    if (s == "m-bias" || s == "mbias") return MechanismTag::MBias;
    return std::nullopt;
}

inline std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "single") return Variant::Single;
    if (s == "time") return Variant::Time;
    return std::nullopt;
}

// Config file stem, e.g. "collider" or "m_bias_time".
inline std::string config_name(Mechanism m) {
    std::string name(tag_name(m.tag));
    if (m.variant == Variant::Time) name += "_time";
    return name;
}

// QUARTETS_CONFIG_DIR overrides the bundled config directory.
inline std::filesystem::path default_config_dir() {
    if (const char* env = std::getenv("QUARTETS_CONFIG_DIR"); env && *env) return env;
    return QUARTETS_DEFAULT_CONFIG_DIR;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LinearSem load_mechanism(Mechanism m, const std::filesystem::path& dir = default_config_dir()) {
    const auto path = dir / (config_name(m) + ".json");
    try {
        return parse_sem(read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

inline LinearSem canonical_sem(MechanismTag tag) { return load_mechanism({tag, Variant::Single}); }
inline LinearSem canonical_time_sem(MechanismTag tag) { return load_mechanism({tag, Variant::Time}); }

// ---------------------------------------------------------------------------
// Roles: node names in the configs and column names in exports.

struct Roles {
    std::string exposure;
    std::string covariate;
    std::string outcome;
};

inline Roles node_roles(Variant v) {
    if (v == Variant::Single) return {"X", "Z", "Y"};
    return {"X_baseline", "Z_baseline", "Y_followup"};
}

inline Roles column_roles(Variant v) {
    if (v == Variant::Single) return {"exposure", "covariate", "outcome"};
    return {"exposure_baseline", "covariate_baseline", "outcome_followup"};
}

// (node, column) pairs in export order.
inline std::vector<std::pair<std::string, std::string>> export_columns(Variant v) {
    if (v == Variant::Single) return {{"X", "exposure"}, {"Z", "covariate"}, {"Y", "outcome"}};
    return {{"X_baseline", "exposure_baseline"}, {"Z_baseline", "covariate_baseline"},
            {"Y_baseline", "outcome_baseline"},  {"X_followup", "exposure_followup"},
            {"Z_followup", "covariate_followup"}, {"Y_followup", "outcome_followup"}};
}

inline std::vector<std::string> csv_header(Variant v) {
    std::vector<std::string> h{"dataset"};
    for (const auto& [node, col] : export_columns(v)) h.push_back(col);
    return h;
}

// Per-mechanism seed: SplitMix64 of (master seed XOR FNV-1a of the config
// name), so each mechanism's stream is independent of the others.
inline std::uint64_t derive_seed(std::uint64_t master, Mechanism m) {
    return rng::stream_key(master, config_name(m));
}

// ---------------------------------------------------------------------------
// Quartet bundles

struct QuartetMember {
    MechanismTag tag;
    Dataset data;  // observed columns under their export names
};

struct QuartetBundle {
    Variant variant = Variant::Single;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
    std::vector<QuartetMember> members;

    const Dataset& at(MechanismTag t) const {
        for (const auto& m : members)
            if (m.tag == t) return m.data;
        fail(ErrorKind::InvalidArgument, "bundle has no " + std::string(tag_name(t)) + " dataset");
    }
};

inline QuartetMember generate_member(Mechanism m, std::size_t n, std::uint64_t master_seed,
                                     const std::filesystem::path& dir = default_config_dir()) {
    const auto sem = load_mechanism(m, dir);
    const auto seed = derive_seed(master_seed, m);
    auto raw = simulate(sem, n, seed, config_name(m));
    return {m.tag, raw.renamed(export_columns(m.variant))};
}

inline QuartetBundle generate_quartet(Variant variant, std::size_t n, std::uint64_t seed,
                                      const std::filesystem::path& dir = default_config_dir()) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "quartet generation needs n >= 1");
    QuartetBundle b;
    b.variant = variant;
    b.n = n;
    b.seed = seed;
    for (auto t : kAllTags) b.members.push_back(generate_member({t, variant}, n, seed, dir));
    return b;
}

inline void write_quartet_csv(const QuartetBundle& bundle, std::ostream& out) {
    const auto header = csv_header(bundle.variant);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    const auto cols = export_columns(bundle.variant);
    for (const auto& m : bundle.members) {
        std::vector<std::span<const double>> spans;
        for (const auto& [node, col] : cols) spans.push_back(m.data.column(col));
        const std::string label = "\"" + std::string(dataset_label(m.tag)) + "\"";
        for (std::size_t r = 0; r < m.data.rows(); ++r) {
            out << label;
            for (const auto& s : spans) out << ',' << format_double(s[r]);
            out << '\n';
        }
    }
}

inline void export_csv(const QuartetBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    write_quartet_csv(bundle, out);
    if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

// Detects the single or time layout from the header; anything else is a
// schema error naming the first missing column.
inline QuartetBundle bundle_from_table(const CsvTable& t) {
    std::optional<Variant> variant;
    for (auto v : {Variant::Single, Variant::Time})
        if (t.header == csv_header(v)) variant = v;
    if (!variant) {
        const auto expect = csv_header(t.header.size() > 4 ? Variant::Time : Variant::Single);
        for (const auto& col : expect)
            if (!t.find(col)) fail(ErrorKind::Schema, "quartet CSV is missing column '" + col + "'");
        fail(ErrorKind::Schema, "quartet CSV header does not match the single or time layout");
    }

    QuartetBundle b;
    b.variant = *variant;
    std::map<MechanismTag, std::vector<std::size_t>> rows;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto tag = parse_tag(t.rows[r][0]);
        if (!tag) fail(ErrorKind::Schema, "row " + std::to_string(r + 1) + ": unknown dataset '" + t.rows[r][0] + "'");
        rows[*tag].push_back(r);
    }
    std::vector<std::string> cols(t.header.begin() + 1, t.header.end());
    for (auto tag : kAllTags) {
        auto it = rows.find(tag);
        if (it == rows.end()) continue;
        if (!b.members.empty() && it->second.size() != b.n)
            fail(ErrorKind::Schema, "quartet datasets must all have the same number of rows");
        b.n = it->second.size();
        b.members.push_back({tag, dataset_from_table(t, cols, it->second)});
    }
    if (b.members.empty()) fail(ErrorKind::Schema, "quartet CSV has no rows");
    return b;
}

inline QuartetBundle import_csv(const std::filesystem::path& path) { return bundle_from_table(load_csv_table(path)); }

// ---------------------------------------------------------------------------
// Table reproduction

struct TableReport {
    int id = 0;
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> cells;
    nlohmann::json data;

    std::string render_text() const {
        std::vector<std::size_t> width(headers.size(), 0);
        for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
        for (const auto& row : cells)
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        std::ostringstream os;
        os << title << '\n';
        auto line = [&](const std::vector<std::string>& row) {
            std::string s;
            for (std::size_t c = 0; c < row.size(); ++c) {
                std::string cell = row[c];
                if (try_parse_double(cell))
                    cell = std::string(width[c] - cell.size(), ' ') + cell;
                else
                    cell += std::string(width[c] - cell.size(), ' ');
                s += (c ? "  " : "") + cell;
            }
            while (!s.empty() && s.back() == ' ') s.pop_back();
            os << s << '\n';
        };
        line(headers);
        std::size_t total = 0;
        for (auto w : width) total += w;
        os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        for (const auto& row : cells) line(row);
        return os.str();
    }
};

namespace detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

// Up to four decimals, trailing zeros dropped: 1, 0.5, 0.8824.
inline std::string compact(double v) {
    auto s = fixed(v, 4);
    while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
        const bool dot = s.back() == '.';
        s.pop_back();
        if (dot) break;
    }
    return s;
}

inline std::string model_formula(const std::vector<std::string>& adjust) {
    std::string f = "Y ~ X";
    if (!adjust.empty()) f += " ; " + join(adjust, " + ");
    return f;
}

inline std::string render_sets(const std::vector<std::vector<std::string>>& sets) {
    if (sets.empty()) return "none";
    std::vector<std::string> parts;
    for (const auto& s : sets) parts.push_back(brace_set(s));
    return join(parts, " ");
}

// Nodes on a directed path from x to y, excluding both endpoints.
inline std::vector<std::string> mediators(const Dag& dag, std::size_t x, std::size_t y) {
    const auto from_x = descendant_flags(dag, x);
    std::vector<std::string> out;
    for (std::size_t v = 0; v < dag.size(); ++v) {
        if (v == x || v == y || !from_x[v]) continue;
        if (descendant_flags(dag, v)[y]) out.push_back(dag.name(v));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

inline TableReport correct_models_table(const std::filesystem::path& dir = default_config_dir()) {
    TableReport t;
    t.id = 2;
    t.title = "Table 2: correct causal models and causal effects (analytic)";
    t.headers = {"Data generating mechanism", "Correct causal model", "Correct causal effect",
                 "Minimal adjustment sets"};
    t.data = {{"table", 2}, {"rows", nlohmann::json::array()}};
    for (auto tag : kAllTags) {
        const auto sem = load_mechanism({tag, Variant::Single}, dir);
        const auto sets = minimal_backdoor_sets(sem.dag, "X", "Y");
        const double total = total_effect(sem, "X", "Y");
        const auto meds = detail::mediators(sem.dag, sem.dag.index_of("X"), sem.dag.index_of("Y"));
        const std::vector<std::string> chosen = sets.empty() ? std::vector<std::string>{} : sets.front();

        nlohmann::json row{{"mechanism", tag_name(tag)},
                           {"label", dataset_label(tag)},
                           {"minimal_adjustment_sets", sets},
                           {"total_effect", total},
                           {"total_effect_model", detail::model_formula(chosen)}};
        std::string model, effect;
        if (meds.empty()) {
            model = detail::model_formula(chosen);
            effect = detail::compact(total);
        } else {
            std::set<std::string> adjust(chosen.begin(), chosen.end());
            adjust.insert(meds.begin(), meds.end());
            const double direct = ate(sem, "X", "Y", adjust);
            const std::vector<std::string> direct_set(adjust.begin(), adjust.end());
            model = "Direct effect: " + detail::model_formula(direct_set) +
                    " / Total effect: " + detail::model_formula(chosen);
            effect = "Direct effect: " + detail::compact(direct) + " / Total effect: " + detail::compact(total);
            row["direct_effect"] = direct;
            row["direct_effect_model"] = detail::model_formula(direct_set);
        }
        t.cells.push_back({std::string(dataset_label(tag)), model, effect, detail::render_sets(sets)});
        t.data["rows"].push_back(std::move(row));
    }
    return t;
}

inline TableReport adjustment_table(std::size_t n, std::uint64_t seed,
                                    const std::filesystem::path& dir = default_config_dir()) {
    TableReport t;
    t.id = 3;
    t.title = "Table 3: ATE with and without adjustment for Z, and cor(X, Z); population values are exact, "
              "sample values use n=" + std::to_string(n) + ", seed=" + std::to_string(seed);
    t.headers = {"Data generating mechanism", "Pop. ATE unadj.", "Pop. ATE adj. Z", "Pop. cor(X,Z)",
                 "Sample ATE unadj.", "Sample ATE adj. Z", "Sample cor(X,Z)"};
    t.data = {{"table", 3}, {"n", n}, {"seed", seed}, {"rows", nlohmann::json::array()}};
    const auto bundle = generate_quartet(Variant::Single, n, seed, dir);
    const auto cols = column_roles(Variant::Single);
    for (auto tag : kAllTags) {
        const auto cov = population_covariance(load_mechanism({tag, Variant::Single}, dir));
        const double p_unadj = ate(cov, "X", "Y");
        const double p_adj = ate(cov, "X", "Y", {"Z"});
        const double p_cor = implied_correlation(cov, "X", "Z");
        const auto& data = bundle.at(tag);
        const double s_unadj = ate(data, cols.exposure, cols.outcome);
        const double s_adj = ate(data, cols.exposure, cols.outcome, {cols.covariate});
        const double s_cor = correlation(data, cols.exposure, cols.covariate);
        t.cells.push_back({std::string(dataset_label(tag)), detail::fixed(p_unadj, 4), detail::fixed(p_adj, 4),
                           detail::fixed(p_cor, 1), detail::fixed(s_unadj, 2), detail::fixed(s_adj, 2),
                           detail::fixed(s_cor, 1)});
        t.data["rows"].push_back({{"mechanism", tag_name(tag)},
                                  {"label", dataset_label(tag)},
                                  {"population", {{"ate_unadjusted", p_unadj}, {"ate_adjusted", p_adj}, {"cor_xz", p_cor}}},
                                  {"sample", {{"ate_unadjusted", s_unadj}, {"ate_adjusted", s_adj}, {"cor_xz", s_cor}}}});
    }
    return t;
}

inline TableReport time_adjustment_table(std::size_t n, std::uint64_t seed,
                                         const std::filesystem::path& dir = default_config_dir()) {
    TableReport t;
    t.id = 4;
    t.title = "Table 4: follow-up outcome on baseline exposure, with and without pre-exposure Z; "
              "population values are exact, sample values use n=" + std::to_string(n) + ", seed=" + std::to_string(seed);
    t.headers = {"Data generating mechanism", "Pop. ATE unadj.", "Pop. ATE adj. Z0", "Correct effect",
                 "Sample ATE unadj.", "Sample ATE adj. Z0"};
    t.data = {{"table", 4}, {"n", n}, {"seed", seed}, {"rows", nlohmann::json::array()}};
    const auto bundle = generate_quartet(Variant::Time, n, seed, dir);
    const auto nodes = node_roles(Variant::Time);
    const auto cols = column_roles(Variant::Time);
    for (auto tag : kAllTags) {
        const auto sem = load_mechanism({tag, Variant::Time}, dir);
        const auto cov = population_covariance(sem);
        const double p_unadj = ate(cov, nodes.exposure, nodes.outcome);
        const double p_adj = ate(cov, nodes.exposure, nodes.outcome, {nodes.covariate});
        const double truth = total_effect(sem, nodes.exposure, nodes.outcome);
        const auto& data = bundle.at(tag);
        const double s_unadj = ate(data, cols.exposure, cols.outcome);
        const double s_adj = ate(data, cols.exposure, cols.outcome, {cols.covariate});
        t.cells.push_back({std::string(dataset_label(tag)), detail::fixed(p_unadj, 4), detail::fixed(p_adj, 4),
                           detail::fixed(truth, 1), detail::fixed(s_unadj, 2), detail::fixed(s_adj, 2)});
        t.data["rows"].push_back({{"mechanism", tag_name(tag)},
                                  {"label", dataset_label(tag)},
                                  {"population", {{"ate_unadjusted", p_unadj}, {"ate_adjusted", p_adj}}},
                                  {"correct_effect", truth},
                                  {"sample", {{"ate_unadjusted", s_unadj}, {"ate_adjusted", s_adj}}}});
    }
    return t;
}

inline TableReport reproduce_table(int which, std::size_t n, std::uint64_t seed,
                                   const std::filesystem::path& dir = default_config_dir()) {
    switch (which) {
    case 2: return correct_models_table(dir);
    case 3: return adjustment_table(n, seed, dir);
    case 4: return time_adjustment_table(n, seed, dir);
    default: fail(ErrorKind::InvalidArgument, "no table " + std::to_string(which) + "; expected 2, 3 or 4");
    }
}

} // namespace quartets
