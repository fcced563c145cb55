#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "bft/analysis.hpp"
#include "bft/decision.hpp"
#include "bft/errors.hpp"
#include "bft/io.hpp"
#include "bft/measures.hpp"
#include "bft/rules.hpp"

namespace bft {
namespace cli_detail {

enum class Format { Json, Table };

inline Format format_from_name(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "table") return Format::Table;
    throw ValidationError("unknown format '" + name + "' (expected json or table)");
}

inline std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        // surrounding whitespace is ignored so "m1, m2" works
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        items.push_back(first == std::string::npos ? std::string{}
                                                   : item.substr(first, last - first + 1));
    }
    return items;
}

inline std::vector<double> parse_lambda_list(const std::string& text) {
    std::vector<double> lambdas;
    for (const auto& item : split_csv(text)) {
        try {
            std::size_t used = 0;
            const double value = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            lambdas.push_back(value);
        } catch (const std::exception&) {
            throw ValidationError("--lambda-list expects comma-separated numbers, got '" +
                                  item + "'");
        }
        detail::check_lambda(lambdas.back());
    }
    if (lambdas.empty()) throw ValidationError("--lambda-list is empty");
    return lambdas;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open spec file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// UTF-8 aware padding: column glyphs like ∅ and ∪ occupy several bytes but
// one terminal cell.
inline std::size_t utf8_width(std::string_view text) {
    std::size_t width = 0;
    for (unsigned char ch : text) {
        width += (ch & 0xc0) != 0x80;
    }
    return width;
}

inline std::string pad_right(std::string text, std::size_t width) {
    const std::size_t current = utf8_width(text);
    if (current < width) text.append(width - current, ' ');
    return text;
}

inline std::string pad_left(std::string text, std::size_t width) {
    const std::size_t current = utf8_width(text);
    if (current < width) text.insert(0, width - current, ' ');
    return text;
}

/// Minimal aligned-text table: first column left-aligned, the rest right.
struct TextTable {
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    void render(std::ostream& out, const std::string& indent = "  ") const {
        std::vector<std::size_t> widths;
        for (const auto& row : rows) {
            if (widths.size() < row.size()) widths.resize(row.size(), 0);
            for (std::size_t i = 0; i < row.size(); ++i) {
                widths[i] = std::max(widths[i], utf8_width(row[i]));
            }
        }
        for (const auto& row : rows) {
            out << indent;
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i > 0) out << "  ";
                out << (i == 0 ? pad_right(row[i], widths[i]) : pad_left(row[i], widths[i]));
            }
            out << "\n";
        }
    }
};

/// Subsets listed in a human table: the full power set while it stays small,
/// otherwise just the focal elements.
inline std::vector<std::uint32_t> table_subsets(const Frame& frame,
                                                const MassFunction::FocalMap& focal) {
    std::vector<std::uint32_t> subsets;
    if (frame.size() <= 4) {
        for (std::uint32_t bits = 0; bits <= frame.theta().bits(); ++bits) {
            subsets.push_back(bits);
        }
    } else {
        for (const auto& [bits, mass] : focal) subsets.push_back(bits);
    }
    return subsets;
}

inline void render_mass_table(std::ostream& out, const MassFunction& m) {
    TextTable table;
    table.add({"subset", "mass"});
    for (std::uint32_t bits : table_subsets(m.frame(), m.focal())) {
        table.add({m.frame().subset_name(SubsetRef{bits}), display_4dp(m.mass(SubsetRef{bits}))});
    }
    table.render(out);
}

// ---------------------------------------------------------------------------
// Option resolution shared by the subcommands
// ---------------------------------------------------------------------------

struct RuleFlags {
    std::string rule;        // empty = not given
    double lambda = -1.0;    // <0 = not given
    std::string lambda_list;  // empty = not given

    bool lambda_given() const { return lambda >= 0.0; }
    bool list_given() const { return !lambda_list.empty(); }
};

inline RuleSpec resolve_rule(const std::optional<RuleSpec>& from_spec, const RuleFlags& flags) {
    RuleKind kind;
    if (!flags.rule.empty()) {
        kind = rule_kind_from_name(flags.rule);
    } else if (flags.lambda_given() || flags.list_given()) {
        kind = RuleKind::Krc;  // a lambda alone implies krc
    } else if (from_spec) {
        kind = from_spec->kind;
    } else {
        throw ValidationError(
            "no rule selected; pass --rule (or --lambda for krc) or set \"rule\" in the spec "
            "document");
    }
    if (kind != RuleKind::Krc) {
        if (flags.lambda_given() || flags.list_given()) {
            throw ValidationError(std::string("rule '") + rule_kind_name(kind) +
                                  "' does not take a lambda");
        }
        return {kind, 1.0};
    }
    if (flags.lambda_given()) {
        detail::check_lambda(flags.lambda);
        return RuleSpec::make_krc(flags.lambda);
    }
    if (from_spec && from_spec->kind == RuleKind::Krc) {
        return RuleSpec::make_krc(from_spec->lambda);
    }
    throw ValidationError("rule 'krc' requires a lambda; pass --lambda or set it in the spec");
}

/// Fusion order: --order flag wins, then the spec's order field; with three
/// or more sources one of them is mandatory — order changes the result under
/// a non-associative rule, so the caller must own it.
inline std::vector<std::size_t> resolve_order(const Experiment& exp,
                                              const std::string& order_flag) {
    if (!order_flag.empty()) {
        std::vector<std::size_t> indices;
        std::vector<bool> used(exp.sources.size(), false);
        for (const auto& name : split_csv(order_flag)) {
            const NamedMass* named = exp.find(name);
            if (!named) throw ValidationError("--order names unknown source '" + name + "'");
            const auto idx = static_cast<std::size_t>(named - exp.sources.data());
            if (used[idx]) throw ValidationError("--order repeats source '" + name + "'");
            used[idx] = true;
            indices.push_back(idx);
        }
        if (indices.size() != exp.sources.size()) {
            throw ValidationError("--order must list every source exactly once");
        }
        return indices;
    }
    if (exp.order) return *exp.order;
    if (exp.sources.size() <= 2) {
        std::vector<std::size_t> identity(exp.sources.size());
        std::iota(identity.begin(), identity.end(), std::size_t{0});
        return identity;
    }
    throw ValidationError(
        "an explicit fusion order is required for three or more sources; pass --order or set "
        "\"order\" in the spec document");
}

inline std::vector<std::string> source_names(const Experiment& exp) {
    std::vector<std::string> names;
    names.reserve(exp.sources.size());
    for (const auto& s : exp.sources) names.push_back(s.name);
    return names;
}

inline ordered_json renormalization_to_json(const Experiment& exp) {
    ordered_json j = ordered_json::object();
    for (const auto& s : exp.sources) j[s.name] = s.scale;
    return j;
}

// ---------------------------------------------------------------------------
// repro-paper: the bundled reference walkthrough
// ---------------------------------------------------------------------------

struct ReproChecks {
    std::size_t total = 0;
    std::size_t failed = 0;

    const char* mark(bool ok) {
        ++total;
        if (!ok) ++failed;
        return ok ? "[ok]" : "[FAIL]";
    }
};

inline void repro_check_line(std::ostream& out, ReproChecks& checks, const std::string& label,
                             double value, double expected, double tolerance) {
    out << "  " << pad_right(label, 34) << pad_left(display_4dp(value), 8) << "  expected "
        << display_4dp(expected) << "  "
        << checks.mark(std::abs(value - expected) <= tolerance) << "\n";
}

inline void repro_interval_line(std::ostream& out, ReproChecks& checks, const Frame& frame,
                                const BeliefInterval& interval, double expected_bel,
                                double expected_pl, double tolerance) {
    const std::string shown =
        "[" + display_4dp(interval.bel) + ", " + display_4dp(interval.pl) + "]";
    const std::string expected =
        "[" + display_4dp(expected_bel) + ", " + display_4dp(expected_pl) + "]";
    const bool ok = std::abs(interval.bel - expected_bel) <= tolerance &&
                    std::abs(interval.pl - expected_pl) <= tolerance;
    out << "  " << pad_right(frame.subset_name(interval.subset), 8) << pad_left(shown, 18)
        << "  expected " << expected << "  " << checks.mark(ok) << "\n";
}

/// Recomputes the bundled three-source reference scenario (two hypotheses,
/// krc at lambda 0.2) and checks every stage against its known value:
/// pairwise conflict degrees, conjunctive and krc intermediates, both
/// bracketings of the three-way fusion, the resulting belief intervals, and
/// the (indeterminate) decisions. Output is deterministic byte-for-byte.
inline bool run_repro_paper(std::ostream& out) {
    const double lambda = 0.2;
    const double kExact = 1e-12;   // values reproducible to rounding error
    const double kPrinted = 5e-4;  // values known to four decimals

    Frame frame({"A", "B"});
    const SubsetRef a = frame.singleton(0);
    const SubsetRef b = frame.singleton(1);
    const SubsetRef theta = frame.theta();
    const MassFunction m1(frame, {{a, 0.2}, {b, 0.7}, {theta, 0.1}});
    const MassFunction m2(frame, {{a, 0.8}, {b, 0.1}, {theta, 0.1}});
    const MassFunction m3(frame, {{a, 0.4}, {b, 0.3}, {theta, 0.3}});

    ReproChecks checks;
    out << "reference scenario: frame {A,B}, three sources, krc lambda = 0.2\n\n";

    out << "input BBAs\n";
    TextTable inputs;
    inputs.add({"subset", "m1", "m2", "m3"});
    for (std::uint32_t bits = 0; bits <= theta.bits(); ++bits) {
        const SubsetRef s{bits};
        inputs.add({frame.subset_name(s), display_4dp(m1.mass(s)), display_4dp(m2.mass(s)),
                    display_4dp(m3.mass(s))});
    }
    inputs.render(out);

    const auto pairwise = [&](const char* title, const MassFunction& x, const MassFunction& y,
                              double expect_k, double expect_conj_a, double expect_conj_b,
                              double expect_a, double expect_b, double expect_theta) {
        out << "\nstep " << title << "\n";
        const CombinationIntermediate conj = conjunctive(x, y);
        repro_check_line(out, checks, "conflict degree K", conj.conflict(), expect_k, kExact);
        repro_check_line(out, checks, "conjunctive mass A", conj.mass(a), expect_conj_a, kExact);
        repro_check_line(out, checks, "conjunctive mass B", conj.mass(b), expect_conj_b, kExact);
        const MassFunction fused = krc(x, y, lambda);
        repro_check_line(out, checks, "krc mass A", fused.mass(a), expect_a, kPrinted);
        repro_check_line(out, checks, "krc mass B", fused.mass(b), expect_b, kPrinted);
        repro_check_line(out, checks, "krc mass A∪B", fused.mass(theta), expect_theta,
                         kPrinted);
        return fused;
    };

    pairwise("m1 ⊕ m2", m1, m2, 0.58, 0.26, 0.15, 0.2941, 0.1697, 0.5362);
    pairwise("m2 ⊕ m3", m2, m3, 0.28, 0.60, 0.09, 0.6356, 0.0953, 0.2691);

    // Left bracketing folds [m1, m2, m3]; the right one folds [m2, m3, m1],
    // which equals m1 + (m2 + m3) because the binary rule is commutative.
    const RuleSpec rule = RuleSpec::make_krc(lambda);
    const MassFunction left = fuse_sequential(rule, std::vector<MassFunction>{m1, m2, m3});
    const MassFunction right = fuse_sequential(rule, std::vector<MassFunction>{m2, m3, m1});

    out << "\nthree-way fusion\n";
    TextTable fused_table;
    fused_table.add({"subset", "(m1⊕m2)⊕m3", "m1⊕(m2⊕m3)"});
    for (std::uint32_t bits = 0; bits <= theta.bits(); ++bits) {
        const SubsetRef s{bits};
        fused_table.add(
            {frame.subset_name(s), display_4dp(left.mass(s)), display_4dp(right.mass(s))});
    }
    fused_table.render(out);

    out << "\nleft bracketing (m1⊕m2)⊕m3\n";
    repro_check_line(out, checks, "mass A", left.mass(a), 0.4339, kPrinted);
    repro_check_line(out, checks, "mass B", left.mass(b), 0.2711, kPrinted);
    repro_check_line(out, checks, "mass A∪B", left.mass(theta), 0.2950, kPrinted);

    out << "\nright bracketing m1⊕(m2⊕m3)\n";
    repro_check_line(out, checks, "mass A", right.mass(a), 0.2695, kPrinted);
    repro_check_line(out, checks, "mass B", right.mass(b), 0.2917, kPrinted);
    repro_check_line(out, checks, "mass A∪B", right.mass(theta), 0.4388, kPrinted);

    const double gap = linf_distance(left, right);
    out << "\nassociativity\n";
    out << "  " << pad_right("L∞ gap between bracketings", 34)
        << pad_left(display_4dp(gap), 8) << "  expected within [0.1600, 0.1700]  "
        << checks.mark(gap >= 0.16 && gap <= 0.17) << "\n";

    out << "\nbelief intervals, left bracketing\n";
    repro_interval_line(out, checks, frame, belief_interval(left, Frame::empty_set()), 0.0, 0.0,
                        kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(left, a), 0.4339, 0.7289, kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(left, b), 0.2711, 0.5661, kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(left, theta), 1.0, 1.0, kPrinted);

    out << "\nbelief intervals, right bracketing\n";
    repro_interval_line(out, checks, frame, belief_interval(right, Frame::empty_set()), 0.0, 0.0,
                        kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(right, a), 0.2695, 0.7083, kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(right, b), 0.2917, 0.7305, kPrinted);
    repro_interval_line(out, checks, frame, belief_interval(right, theta), 1.0, 1.0, kPrinted);

    out << "\ndecisions\n";
    const DecisionOutcome left_decision = decide(left);
    const DecisionOutcome right_decision = decide(right);
    out << "  " << pad_right("left bracketing", 34)
        << pad_left(left_decision.decided() ? frame.label(*left_decision.winner)
                                            : "indeterminate",
                    13)
        << "  expected indeterminate  " << checks.mark(!left_decision.decided()) << "\n";
    out << "  " << pad_right("right bracketing", 34)
        << pad_left(right_decision.decided() ? frame.label(*right_decision.winner)
                                             : "indeterminate",
                    13)
        << "  expected indeterminate  " << checks.mark(!right_decision.decided()) << "\n";

    out << "\n";
    if (checks.failed == 0) {
        out << "all " << checks.total << " checks passed\n";
        return true;
    }
    out << checks.failed << " of " << checks.total << " checks FAILED\n";
    return false;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int do_fuse(std::ostream& out, const std::string& spec_path, const RuleFlags& rule_flags,
                   const std::string& order_flag, bool renormalize, Format format) {
    ExperimentSpec spec = parse_experiment(read_file(spec_path));
    if (renormalize) spec.renormalize = true;
    const Experiment exp = resolve_experiment(spec);
    const RuleSpec rule = resolve_rule(exp.rule, rule_flags);

    ordered_json report;
    report["command"] = "fuse";
    report["frame"] = frame_to_json(exp.frame);
    report["rule"] = rule_to_json(rule);

    if (rule.kind == RuleKind::Conjunctive) {
        if (exp.sources.size() != 2) {
            throw ValidationError(
                "rule 'conjunctive' combines exactly two sources (its result keeps mass on "
                "the empty set and cannot fold further)");
        }
        const CombinationIntermediate ci =
            conjunctive(exp.sources[0].mass, exp.sources[1].mass);
        report["order"] = ordered_json::array({exp.sources[0].name, exp.sources[1].name});
        if (exp.renormalize) report["renormalization"] = renormalization_to_json(exp);
        report["intermediate"] = intermediate_to_json(ci);
        if (format == Format::Json) {
            out << report.dump(2) << "\n";
        } else {
            out << "rule: conjunctive\n";
            out << "sources: " << exp.sources[0].name << ", " << exp.sources[1].name << "\n";
            TextTable table;
            table.add({"subset", "mass"});
            for (std::uint32_t bits : table_subsets(exp.frame, ci.entries())) {
                table.add({exp.frame.subset_name(SubsetRef{bits}),
                           display_4dp(ci.mass(SubsetRef{bits}))});
            }
            table.render(out);
            out << "conflict K = " << display_4dp(ci.conflict()) << "\n";
        }
        return 0;
    }

    const auto order = resolve_order(exp, order_flag);
    std::vector<MassFunction> ordered;
    ordered.reserve(order.size());
    ordered_json order_names = ordered_json::array();
    for (std::size_t idx : order) {
        ordered.push_back(exp.sources[idx].mass);
        order_names.push_back(exp.sources[idx].name);
    }
    const MassFunction fused = fuse_sequential(rule, ordered);

    report["order"] = std::move(order_names);
    if (exp.renormalize) report["renormalization"] = renormalization_to_json(exp);
    report["result"]["masses"] = mass_entries_to_json(fused);
    if (format == Format::Json) {
        out << report.dump(2) << "\n";
    } else {
        out << "rule: " << rule.name() << "\n";
        out << "order:";
        for (std::size_t i = 0; i < order.size(); ++i) {
            out << (i ? ", " : " ") << exp.sources[order[i]].name;
        }
        out << "\n";
        render_mass_table(out, fused);
    }
    return 0;
}

inline int do_decide(std::ostream& out, const std::string& spec_path, const RuleFlags& rule_flags,
                     const std::string& order_flag, const std::string& source_flag,
                     bool renormalize, Format format) {
    ExperimentSpec spec = parse_experiment(read_file(spec_path));
    if (renormalize) spec.renormalize = true;
    const Experiment exp = resolve_experiment(spec);

    ordered_json report;
    report["command"] = "decide";
    report["frame"] = frame_to_json(exp.frame);

    std::optional<MassFunction> target;
    if (!source_flag.empty()) {
        if (!order_flag.empty()) {
            throw ValidationError("--source and --order are mutually exclusive");
        }
        const NamedMass* named = exp.find(source_flag);
        if (!named) throw ValidationError("unknown source '" + source_flag + "'");
        report["source"] = source_flag;
        target = named->mass;
    } else if (exp.sources.size() == 1) {
        report["source"] = exp.sources[0].name;
        target = exp.sources[0].mass;
    } else {
        const RuleSpec rule = resolve_rule(exp.rule, rule_flags);
        const auto order = resolve_order(exp, order_flag);
        std::vector<MassFunction> ordered;
        ordered_json order_names = ordered_json::array();
        for (std::size_t idx : order) {
            ordered.push_back(exp.sources[idx].mass);
            order_names.push_back(exp.sources[idx].name);
        }
        report["rule"] = rule_to_json(rule);
        report["order"] = std::move(order_names);
        target = fuse_sequential(rule, ordered);
    }

    const DecisionOutcome outcome = decide(*target);
    report["decision"] = decision_to_json(exp.frame, outcome);
    if (format == Format::Json) {
        out << report.dump(2) << "\n";
        return 0;
    }
    out << "decision: "
        << (outcome.decided() ? exp.frame.label(*outcome.winner) : "indeterminate") << "\n";
    TextTable table;
    table.add({"element", "bel", "pl", "width"});
    for (std::size_t i = 0; i < exp.frame.size(); ++i) {
        const auto& interval = outcome.singleton_intervals[i];
        table.add({exp.frame.label(i), display_4dp(interval.bel), display_4dp(interval.pl),
                   display_4dp(interval.width)});
    }
    table.render(out);
    out << (outcome.decided() ? "winning comparisons:\n" : "failed comparisons:\n");
    for (const auto& cmp : outcome.comparisons) {
        if (outcome.decided() ? (cmp.candidate == *outcome.winner) : !cmp.holds) {
            out << "  Bel(" << exp.frame.label(cmp.candidate)
                << ") = " << display_4dp(cmp.candidate_bel) << (cmp.holds ? " > " : " ≤ ")
                << "Pl(" << exp.frame.label(cmp.rival) << ") = " << display_4dp(cmp.rival_pl)
                << "\n";
        }
    }
    return 0;
}

inline int do_assoc_check(std::ostream& out, const std::string& spec_path,
                          const RuleFlags& rule_flags, const std::string& sources_flag,
                          bool renormalize, Format format) {
    ExperimentSpec spec = parse_experiment(read_file(spec_path));
    if (renormalize) spec.renormalize = true;
    const Experiment exp = resolve_experiment(spec);
    const RuleSpec rule = resolve_rule(exp.rule, rule_flags);

    std::vector<std::string> names;
    if (!sources_flag.empty()) {
        names = split_csv(sources_flag);
        if (names.size() != 3) {
            throw ValidationError("--sources expects exactly three comma-separated names");
        }
    } else if (exp.sources.size() == 3) {
        names = source_names(exp);
    } else {
        throw ValidationError(
            "assoc-check needs exactly three sources; pass --sources a,b,c to pick them");
    }
    std::vector<const MassFunction*> picked;
    for (const auto& name : names) {
        const NamedMass* named = exp.find(name);
        if (!named) throw ValidationError("--sources names unknown source '" + name + "'");
        picked.push_back(&named->mass);
    }

    const AssociativityResult result =
        check_associativity(rule, *picked[0], *picked[1], *picked[2]);

    if (format == Format::Json) {
        ordered_json report;
        report["command"] = "assoc-check";
        report["frame"] = frame_to_json(exp.frame);
        report["rule"] = rule_to_json(rule);
        report["sources"] = names;
        report["result"] = assoc_to_json(result);
        out << report.dump(2) << "\n";
        return 0;
    }
    out << "rule: " << rule.name() << "\n";
    out << "sources: " << names[0] << ", " << names[1] << ", " << names[2] << "\n";
    TextTable table;
    table.add({"subset", "(a⊕b)⊕c", "a⊕(b⊕c)", "|diff|"});
    for (std::uint32_t bits : table_subsets(exp.frame, result.left.focal())) {
        const SubsetRef s{bits};
        table.add({exp.frame.subset_name(s), display_4dp(result.left.mass(s)),
                   display_4dp(result.right.mass(s)),
                   display_4dp(std::abs(result.left.mass(s) - result.right.mass(s)))});
    }
    table.render(out);
    out << "L∞ gap: " << display_4dp(result.linf_gap) << "\n";
    out << "L1 gap: " << display_4dp(result.l1_gap) << "\n";
    return 0;
}

inline int do_order_sweep(std::ostream& out, const std::string& spec_path,
                          const RuleFlags& rule_flags, std::uint64_t seed, bool renormalize,
                          Format format) {
    ExperimentSpec spec = parse_experiment(read_file(spec_path));
    if (renormalize) spec.renormalize = true;
    const Experiment exp = resolve_experiment(spec);
    const auto names = source_names(exp);
    std::vector<MassFunction> masses;
    masses.reserve(exp.sources.size());
    for (const auto& s : exp.sources) masses.push_back(s.mass);

    ordered_json report;
    report["command"] = "order-sweep";
    report["frame"] = frame_to_json(exp.frame);
    report["sources"] = names;

    std::vector<OrderSensitivityReport> sweeps;
    if (rule_flags.list_given()) {
        const auto lambdas = parse_lambda_list(rule_flags.lambda_list);
        if (!rule_flags.rule.empty() && rule_flags.rule != "krc") {
            throw ValidationError("--lambda-list applies to rule 'krc' only");
        }
        sweeps = order_sweep_lambda_list(masses, lambdas, seed);
    } else {
        sweeps.push_back(order_sweep(resolve_rule(exp.rule, rule_flags), masses, seed));
    }

    if (format == Format::Json) {
        if (sweeps.size() == 1) {
            report["report"] = sweep_to_json(names, sweeps[0]);
        } else {
            ordered_json reports = ordered_json::array();
            for (const auto& sweep : sweeps) reports.push_back(sweep_to_json(names, sweep));
            report["reports"] = std::move(reports);
        }
        out << report.dump(2) << "\n";
        return 0;
    }
    for (const auto& sweep : sweeps) {
        out << "rule: " << sweep.rule.name() << "\n";
        out << "orders: " << sweep.orders.size()
            << (sweep.exhaustive ? " (exhaustive)" : " (seeded sample)") << "\n";
        out << "failed: " << sweep.failed_count << "\n";
        out << "max pairwise L∞: " << display_4dp(sweep.max_pairwise_linf) << "\n";
        out << "decision agreement: " << (sweep.decision_agreement ? "yes" : "no") << "\n";
        if (exp.frame.size() <= 3) {
            TextTable table;
            std::vector<std::string> header{"order"};
            for (std::uint32_t bits = 0; bits <= exp.frame.theta().bits(); ++bits) {
                header.push_back(exp.frame.subset_name(SubsetRef{bits}));
            }
            table.add(std::move(header));
            for (const auto& entry : sweep.orders) {
                std::vector<std::string> row;
                std::string order_text;
                for (std::size_t i = 0; i < entry.permutation.size(); ++i) {
                    if (i) order_text += ",";
                    order_text += names[entry.permutation[i]];
                }
                row.push_back(std::move(order_text));
                if (entry.result) {
                    for (std::uint32_t bits = 0; bits <= exp.frame.theta().bits(); ++bits) {
                        row.push_back(display_4dp(entry.result->mass(SubsetRef{bits})));
                    }
                } else {
                    row.push_back("total conflict");
                }
                table.add(std::move(row));
            }
            table.render(out);
        }
        out << "\n";
    }
    return 0;
}

inline int do_search(std::ostream& out, const std::string& spec_path,
                     const std::string& frame_flag, const RuleFlags& rule_flags,
                     std::uint64_t trials, std::uint64_t seed, Format format) {
    std::optional<Frame> frame;
    std::optional<RuleSpec> spec_rule;
    if (!frame_flag.empty()) {
        frame.emplace(split_csv(frame_flag));
    }
    if (!spec_path.empty()) {
        const Experiment exp = load_experiment(read_file(spec_path));
        if (!frame) frame.emplace(exp.frame);
        spec_rule = exp.rule;
    }
    if (!frame) {
        throw ValidationError("search needs a frame; pass --frame A,B or --spec FILE");
    }

    std::vector<SearchResult> results;
    if (rule_flags.list_given()) {
        if (!rule_flags.rule.empty() && rule_flags.rule != "krc") {
            throw ValidationError("--lambda-list applies to rule 'krc' only");
        }
        results = search_lambda_list(*frame, trials, seed, parse_lambda_list(rule_flags.lambda_list));
    } else {
        results.push_back(
            search_counterexamples(resolve_rule(spec_rule, rule_flags), *frame, trials, seed));
    }

    if (format == Format::Json) {
        ordered_json report;
        report["command"] = "search";
        if (results.size() == 1) {
            report.update(search_to_json(results[0]));
        } else {
            ordered_json reports = ordered_json::array();
            for (const auto& r : results) reports.push_back(search_to_json(r));
            report["reports"] = std::move(reports);
        }
        out << report.dump(2) << "\n";
        return 0;
    }
    for (const auto& result : results) {
        out << "rule: " << result.rule.name() << "\n";
        out << "trials: " << result.trials << ", seed: " << result.seed
            << ", skipped: " << result.skipped << "\n";
        if (!result.best) {
            out << "no successful trial\n\n";
            continue;
        }
        out << "best L∞ gap: " << display_4dp(result.best->assoc.linf_gap) << " (trial "
            << result.best->trial << ")\n";
        if (result.frame.size() <= 3) {
            TextTable table;
            table.add({"subset", "a", "b", "c", "(a⊕b)⊕c", "a⊕(b⊕c)"});
            for (std::uint32_t bits = 1; bits <= result.frame.theta().bits(); ++bits) {
                const SubsetRef s{bits};
                table.add({result.frame.subset_name(s),
                           display_4dp(result.best->triple[0].mass(s)),
                           display_4dp(result.best->triple[1].mass(s)),
                           display_4dp(result.best->triple[2].mass(s)),
                           display_4dp(result.best->assoc.left.mass(s)),
                           display_4dp(result.best->assoc.right.mass(s))});
            }
            table.render(out);
        }
        out << "\n";
    }
    return 0;
}

}  // namespace cli_detail

/// Command-line driver. Exit status: 0 on success, 1 on validation errors,
/// 2 when a combination rule fails (total conflict). `args` excludes the
/// program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;

    CLI::App app{"belief-function combination toolkit (Dempster's rule and krc)"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string order_flag;
    std::string sources_flag;
    std::string source_flag;
    std::string frame_flag;
    std::string format_name = "json";
    RuleFlags rule_flags;
    bool renormalize = false;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;

    const auto add_rule_flags = [&](CLI::App* cmd, bool with_list) {
        cmd->add_option("--rule", rule_flags.rule, "combination rule: dempster, krc, conjunctive");
        cmd->add_option("--lambda", rule_flags.lambda, "krc tuning parameter in [0,1]");
        if (with_list) {
            cmd->add_option("--lambda-list", rule_flags.lambda_list,
                            "comma-separated lambdas; one report per value (krc)");
        }
    };
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", format_name, "output format: json or table")
            ->check(CLI::IsMember({"json", "table"}));
    };

    CLI::App* fuse_cmd = app.add_subcommand("fuse", "fuse sources in an explicit order");
    fuse_cmd->add_option("--spec", spec_path, "experiment spec JSON file")->required();
    fuse_cmd->add_option("--order", order_flag, "comma-separated source order");
    fuse_cmd->add_flag("--renormalize", renormalize, "rescale off-total sources instead of rejecting");
    add_rule_flags(fuse_cmd, false);
    add_common(fuse_cmd);

    CLI::App* decide_cmd =
        app.add_subcommand("decide", "belief-interval decision on a source or fused result");
    decide_cmd->add_option("--spec", spec_path, "experiment spec JSON file")->required();
    decide_cmd->add_option("--source", source_flag, "decide on this source directly");
    decide_cmd->add_option("--order", order_flag, "fuse in this order, then decide");
    decide_cmd->add_flag("--renormalize", renormalize,
                         "rescale off-total sources instead of rejecting");
    add_rule_flags(decide_cmd, false);
    add_common(decide_cmd);

    CLI::App* assoc_cmd = app.add_subcommand(
        "assoc-check", "compare (a⊕b)⊕c against a⊕(b⊕c)");
    assoc_cmd->add_option("--spec", spec_path, "experiment spec JSON file")->required();
    assoc_cmd->add_option("--sources", sources_flag, "three comma-separated source names");
    assoc_cmd->add_flag("--renormalize", renormalize,
                        "rescale off-total sources instead of rejecting");
    add_rule_flags(assoc_cmd, false);
    add_common(assoc_cmd);

    CLI::App* sweep_cmd = app.add_subcommand(
        "order-sweep", "fuse every permutation of the sources and measure the spread");
    sweep_cmd->add_option("--spec", spec_path, "experiment spec JSON file")->required();
    sweep_cmd->add_option("--seed", seed, "seed for permutation sampling beyond 7 sources");
    sweep_cmd->add_flag("--renormalize", renormalize,
                        "rescale off-total sources instead of rejecting");
    add_rule_flags(sweep_cmd, true);
    add_common(sweep_cmd);

    CLI::App* search_cmd = app.add_subcommand(
        "search", "randomized search for associativity counter-examples");
    search_cmd->add_option("--spec", spec_path, "experiment spec JSON file (frame and rule)");
    search_cmd->add_option("--frame", frame_flag, "comma-separated frame labels");
    search_cmd->add_option("--trials", trials, "number of random BBA triples");
    search_cmd->add_option("--seed", seed, "RNG seed; results are reproducible");
    add_rule_flags(search_cmd, true);
    add_common(search_cmd);

    CLI::App* repro_cmd = app.add_subcommand(
        "repro-paper", "recompute the bundled reference scenario and check known values");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const Format format = format_from_name(format_name);
        if (fuse_cmd->parsed()) {
            return do_fuse(out, spec_path, rule_flags, order_flag, renormalize, format);
        }
        if (decide_cmd->parsed()) {
            return do_decide(out, spec_path, rule_flags, order_flag, source_flag, renormalize,
                             format);
        }
        if (assoc_cmd->parsed()) {
            return do_assoc_check(out, spec_path, rule_flags, sources_flag, renormalize, format);
        }
        if (sweep_cmd->parsed()) {
            return do_order_sweep(out, spec_path, rule_flags, seed, renormalize, format);
        }
        if (search_cmd->parsed()) {
            return do_search(out, spec_path, frame_flag, rule_flags, trials, seed, format);
        }
        if (repro_cmd->parsed()) {
            return run_repro_paper(out) ? 0 : 1;
        }
        err << "error: no subcommand selected\n";
        return 1;
    } catch (const TotalConflictError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const RuleError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bft
