#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bft/analysis.hpp"
#include "bft/decision.hpp"
#include "bft/errors.hpp"
#include "bft/frame.hpp"
#include "bft/mass.hpp"
#include "bft/measures.hpp"
#include "bft/rules.hpp"

namespace bft {

// Reports and specs preserve the author's key order.
using ordered_json = nlohmann::ordered_json;

/// Four-decimal display string; presentation only, never used in comparisons.
inline std::string display_4dp(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

// ---------------------------------------------------------------------------
// Experiment documents
// ---------------------------------------------------------------------------

/// One (subset, mass) record as written in a spec file.
struct BbaEntrySpec {
    std::vector<std::string> subset;
    double mass = 0.0;
};

struct SourceSpec {
    std::string name;
    std::vector<BbaEntrySpec> entries;
};

/// Declarative experiment: a frame, named sources, and optionally a rule,
/// an explicit fusion order, and the opt-in renormalization flag.
struct ExperimentSpec {
    std::vector<std::string> frame_labels;
    std::vector<SourceSpec> sources;
    std::optional<RuleSpec> rule;
    std::optional<std::vector<std::string>> order;
    bool renormalize = false;
};

/// A source resolved to a validated mass function. scale is the factor
/// applied by renormalization (1 when the input was already normalized).
struct NamedMass {
    std::string name;
    MassFunction mass;
    double scale = 1.0;
};

/// Fully resolved experiment, ready to run.
struct Experiment {
    Frame frame;
    std::vector<NamedMass> sources;
    std::optional<RuleSpec> rule;
    std::optional<std::vector<std::size_t>> order;  // indices into sources
    bool renormalize = false;

    const NamedMass* find(const std::string& name) const {
        for (const auto& s : sources) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }
};

inline RuleKind rule_kind_from_name(const std::string& name) {
    if (name == "dempster") return RuleKind::Dempster;
    if (name == "krc") return RuleKind::Krc;
    if (name == "conjunctive") return RuleKind::Conjunctive;
    throw ValidationError("unknown rule kind '" + name +
                          "' (expected dempster, krc, or conjunctive)");
}

inline ordered_json rule_to_json(const RuleSpec& rule) {
    ordered_json j;
    j["kind"] = rule_kind_name(rule.kind);
    if (rule.kind == RuleKind::Krc) j["lambda"] = rule.lambda;
    return j;
}

inline RuleSpec rule_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ValidationError("rule must be an object with a string 'kind'");
    }
    RuleSpec rule;
    rule.kind = rule_kind_from_name(j.at("kind").get<std::string>());
    if (rule.kind == RuleKind::Krc) {
        if (!j.contains("lambda") || !j.at("lambda").is_number()) {
            throw ValidationError("rule 'krc' requires a numeric 'lambda'");
        }
        rule.lambda = j.at("lambda").get<double>();
        detail::check_lambda(rule.lambda);
    } else if (j.contains("lambda")) {
        throw ValidationError(std::string("rule '") + rule_kind_name(rule.kind) +
                              "' does not take 'lambda'");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "kind" && key != "lambda") {
            throw ValidationError("unknown key '" + key + "' in rule");
        }
    }
    return rule;
}

/// Parses and validates an experiment document (JSON text). Every mass
/// function invariant is enforced here unless renormalize is set, in which
/// case off-total sources are rescaled when the experiment is resolved.
inline ExperimentSpec parse_experiment(const std::string& text);

/// Builds frames and validated mass functions from a parsed spec.
inline Experiment resolve_experiment(const ExperimentSpec& spec) {
    Frame frame(spec.frame_labels);
    if (spec.sources.empty()) {
        throw ValidationError("experiment defines no sources");
    }
    Experiment experiment{frame, {}, spec.rule, std::nullopt, spec.renormalize};
    for (const auto& source : spec.sources) {
        std::vector<std::pair<SubsetRef, double>> assignments;
        assignments.reserve(source.entries.size());
        try {
            for (const auto& entry : source.entries) {
                assignments.emplace_back(frame.subset_of(entry.subset), entry.mass);
            }
            if (spec.renormalize) {
                auto [mass, scale] = MassFunction::renormalized(frame, assignments);
                experiment.sources.push_back({source.name, std::move(mass), scale});
            } else {
                experiment.sources.push_back(
                    {source.name, MassFunction(frame, assignments), 1.0});
            }
        } catch (const ValidationError& e) {
            throw ValidationError("source '" + source.name + "': " + e.what());
        }
    }
    for (std::size_t i = 0; i < experiment.sources.size(); ++i) {
        for (std::size_t j = i + 1; j < experiment.sources.size(); ++j) {
            if (experiment.sources[i].name == experiment.sources[j].name) {
                throw ValidationError("duplicate source name '" +
                                      experiment.sources[i].name + "'");
            }
        }
    }
    if (spec.order) {
        std::vector<std::size_t> indices;
        std::vector<bool> used(experiment.sources.size(), false);
        for (const auto& name : *spec.order) {
            const NamedMass* named = experiment.find(name);
            if (!named) {
                throw ValidationError("order names unknown source '" + name + "'");
            }
            const auto idx = static_cast<std::size_t>(named - experiment.sources.data());
            if (used[idx]) {
                throw ValidationError("order repeats source '" + name + "'");
            }
            used[idx] = true;
            indices.push_back(idx);
        }
        if (indices.size() != experiment.sources.size()) {
            throw ValidationError("order must list every source exactly once");
        }
        experiment.order = std::move(indices);
    }
    return experiment;
}

namespace detail {

inline std::vector<std::string> string_list(const ordered_json& j, const char* what) {
    if (!j.is_array()) {
        throw ValidationError(std::string(what) + " must be an array of strings");
    }
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (!item.is_string()) {
            throw ValidationError(std::string(what) + " must contain only strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace detail

inline ExperimentSpec parse_experiment(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed experiment document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("experiment document must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "frame" && key != "sources" && key != "rule" && key != "order" &&
            key != "renormalize") {
            throw ValidationError("unknown key '" + key + "' in experiment document");
        }
    }
    if (!doc.contains("frame")) {
        throw ValidationError("experiment document requires a 'frame'");
    }
    if (!doc.contains("sources") || !doc.at("sources").is_object()) {
        throw ValidationError("experiment document requires an object 'sources'");
    }

    ExperimentSpec spec;
    spec.frame_labels = detail::string_list(doc.at("frame"), "'frame'");
    for (const auto& [name, bba] : doc.at("sources").items()) {
        SourceSpec source;
        source.name = name;
        if (!bba.is_array()) {
            throw ValidationError("source '" + name +
                                  "' must be an array of [subset, mass] entries");
        }
        for (const auto& record : bba) {
            if (!record.is_array() || record.size() != 2 || !record.at(1).is_number()) {
                throw ValidationError("source '" + name +
                                      "': each entry must be [ [labels...], mass ]");
            }
            BbaEntrySpec entry;
            entry.subset = detail::string_list(record.at(0), "subset");
            entry.mass = record.at(1).get<double>();
            source.entries.push_back(std::move(entry));
        }
        spec.sources.push_back(std::move(source));
    }
    if (doc.contains("rule")) {
        spec.rule = rule_from_json(doc.at("rule"));
    }
    if (doc.contains("order")) {
        spec.order = detail::string_list(doc.at("order"), "'order'");
    }
    if (doc.contains("renormalize")) {
        if (!doc.at("renormalize").is_boolean()) {
            throw ValidationError("'renormalize' must be a boolean");
        }
        spec.renormalize = doc.at("renormalize").get<bool>();
    }
    resolve_experiment(spec);  // enforce every semantic invariant now
    return spec;
}

inline Experiment load_experiment(const std::string& text) {
    return resolve_experiment(parse_experiment(text));
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline ordered_json frame_to_json(const Frame& frame) {
    return ordered_json(frame.labels());
}

inline Frame frame_from_json(const ordered_json& j) {
    return Frame(detail::string_list(j, "'frame'"));
}

inline ordered_json subset_to_json(const Frame& frame, SubsetRef subset) {
    return ordered_json(frame.subset_labels(subset));
}

inline SubsetRef subset_from_json(const Frame& frame, const ordered_json& j) {
    const auto labels = detail::string_list(j, "subset");
    return frame.subset_of(labels);
}

/// Focal elements as [{subset, mass, display}, ...] in ascending mask order.
/// "mass" carries full precision; "display" is the 4-decimal rendering.
inline ordered_json mass_entries_to_json(const MassFunction& m) {
    ordered_json entries = ordered_json::array();
    for (const auto& [bits, mass] : m.focal()) {
        ordered_json entry;
        entry["subset"] = subset_to_json(m.frame(), SubsetRef{bits});
        entry["mass"] = mass;
        entry["display"] = display_4dp(mass);
        entries.push_back(std::move(entry));
    }
    return entries;
}

/// Reparses what mass_entries_to_json wrote, from the full-precision field.
inline MassFunction mass_from_entries_json(const Frame& frame, const ordered_json& entries) {
    if (!entries.is_array()) {
        throw ValidationError("mass entries must be an array");
    }
    std::vector<std::pair<SubsetRef, double>> assignments;
    assignments.reserve(entries.size());
    for (const auto& entry : entries) {
        if (!entry.is_object() || !entry.contains("subset") || !entry.contains("mass") ||
            !entry.at("mass").is_number()) {
            throw ValidationError("each mass entry must be an object with subset and mass");
        }
        assignments.emplace_back(subset_from_json(frame, entry.at("subset")),
                                 entry.at("mass").get<double>());
    }
    return MassFunction(frame, assignments);
}

/// Conjunctive intermediates keep their empty-set entry and echo it as
/// "conflict".
inline ordered_json intermediate_to_json(const CombinationIntermediate& ci) {
    ordered_json j;
    ordered_json entries = ordered_json::array();
    for (const auto& [bits, mass] : ci.entries()) {
        ordered_json entry;
        entry["subset"] = subset_to_json(ci.frame(), SubsetRef{bits});
        entry["mass"] = mass;
        entry["display"] = display_4dp(mass);
        entries.push_back(std::move(entry));
    }
    j["masses"] = std::move(entries);
    j["conflict"] = ci.conflict();
    j["conflict_display"] = display_4dp(ci.conflict());
    return j;
}

inline ordered_json interval_to_json(const Frame& frame, const BeliefInterval& interval) {
    ordered_json j;
    j["subset"] = subset_to_json(frame, interval.subset);
    j["bel"] = interval.bel;
    j["pl"] = interval.pl;
    j["width"] = interval.width;
    j["display"] = "[" + display_4dp(interval.bel) + ", " + display_4dp(interval.pl) + "]";
    return j;
}

inline ordered_json decision_to_json(const Frame& frame, const DecisionOutcome& outcome) {
    ordered_json j;
    j["outcome"] = outcome.decided() ? frame.label(*outcome.winner) : "indeterminate";
    ordered_json intervals = ordered_json::array();
    for (const auto& interval : outcome.singleton_intervals) {
        intervals.push_back(interval_to_json(frame, interval));
    }
    j["singleton_intervals"] = std::move(intervals);
    ordered_json comparisons = ordered_json::array();
    for (const auto& cmp : outcome.comparisons) {
        // A winner is justified by its own holding row; an indeterminate
        // outcome by the rows that failed.
        if (outcome.decided() ? (cmp.candidate == *outcome.winner) : !cmp.holds) {
            ordered_json row;
            row["candidate"] = frame.label(cmp.candidate);
            row["rival"] = frame.label(cmp.rival);
            row["candidate_bel"] = cmp.candidate_bel;
            row["rival_pl"] = cmp.rival_pl;
            row["holds"] = cmp.holds;
            comparisons.push_back(std::move(row));
        }
    }
    j["justification"] = std::move(comparisons);
    return j;
}

inline ordered_json assoc_to_json(const AssociativityResult& result) {
    ordered_json j;
    j["left"]["masses"] = mass_entries_to_json(result.left);
    j["right"]["masses"] = mass_entries_to_json(result.right);
    j["linf_gap"] = result.linf_gap;
    j["l1_gap"] = result.l1_gap;
    j["linf_gap_display"] = display_4dp(result.linf_gap);
    return j;
}

inline ordered_json sweep_to_json(const std::vector<std::string>& source_names,
                                  const OrderSensitivityReport& report) {
    ordered_json j;
    j["rule"] = rule_to_json(report.rule);
    j["exhaustive"] = report.exhaustive;
    j["order_count"] = report.orders.size();
    j["failed"] = report.failed_count;
    j["max_pairwise_linf"] = report.max_pairwise_linf;
    j["max_pairwise_linf_display"] = display_4dp(report.max_pairwise_linf);
    j["decision_agreement"] = report.decision_agreement;
    ordered_json orders = ordered_json::array();
    for (const auto& entry : report.orders) {
        ordered_json row;
        ordered_json names = ordered_json::array();
        for (std::size_t idx : entry.permutation) names.push_back(source_names.at(idx));
        row["order"] = std::move(names);
        if (entry.result) {
            row["masses"] = mass_entries_to_json(*entry.result);
        } else {
            row["error"] = entry.failure;
            if (entry.failed_step) row["failed_step"] = *entry.failed_step;
        }
        orders.push_back(std::move(row));
    }
    j["orders"] = std::move(orders);
    return j;
}

inline ordered_json search_to_json(const SearchResult& result) {
    ordered_json j;
    j["rule"] = rule_to_json(result.rule);
    j["frame"] = frame_to_json(result.frame);
    j["trials"] = result.trials;
    j["seed"] = result.seed;
    j["skipped"] = result.skipped;
    if (result.best) {
        ordered_json best;
        best["trial"] = result.best->trial;
        best["linf_gap"] = result.best->assoc.linf_gap;
        best["l1_gap"] = result.best->assoc.l1_gap;
        best["linf_gap_display"] = display_4dp(result.best->assoc.linf_gap);
        ordered_json triple = ordered_json::array();
        for (const auto& m : result.best->triple) {
            triple.push_back(mass_entries_to_json(m));
        }
        best["triple"] = std::move(triple);
        best["left"] = mass_entries_to_json(result.best->assoc.left);
        best["right"] = mass_entries_to_json(result.best->assoc.right);
        j["best"] = std::move(best);
    } else {
        j["best"] = nullptr;
    }
    return j;
}

}  // namespace bft
