#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "bft/errors.hpp"
#include "bft/io.hpp"

using namespace bft;

namespace {

const char* kDocument = R"({
  "frame": ["A", "B"],
  "sources": {
    "m1": [[["A"], 0.2], [["B"], 0.7], [["A", "B"], 0.1]],
    "m2": [[["A"], 0.8], [["B"], 0.1], [["A", "B"], 0.1]]
  },
  "rule": {"kind": "krc", "lambda": 0.2},
  "order": ["m2", "m1"]
})";

}  // namespace

TEST_CASE("a full experiment document parses and resolves") {
    const Experiment exp = load_experiment(kDocument);
    REQUIRE(exp.frame.labels() == std::vector<std::string>{"A", "B"});
    REQUIRE(exp.sources.size() == 2);
    REQUIRE(exp.sources[0].name == "m1");
    REQUIRE(exp.sources[0].mass.mass(exp.frame.singleton(1)) == 0.7);
    REQUIRE(exp.rule.has_value());
    REQUIRE(exp.rule->kind == RuleKind::Krc);
    REQUIRE(exp.rule->lambda == 0.2);
    REQUIRE(exp.order == std::vector<std::size_t>{1, 0});
    REQUIRE_FALSE(exp.renormalize);
    REQUIRE(exp.find("m2") != nullptr);
    REQUIRE(exp.find("nope") == nullptr);
}

TEST_CASE("experiment documents are validated eagerly") {
    SECTION("malformed JSON") {
        REQUIRE_THROWS_WITH(parse_experiment("{nope"),
                            Catch::Matchers::ContainsSubstring("malformed"));
    }
    SECTION("not an object") {
        REQUIRE_THROWS_AS(parse_experiment("[1, 2]"), ValidationError);
    }
    SECTION("unknown top-level key") {
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A"], "sources": {}, "extra": 1})"),
            Catch::Matchers::ContainsSubstring("unknown key 'extra'"));
    }
    SECTION("missing frame") {
        REQUIRE_THROWS_AS(parse_experiment(R"({"sources": {}})"), ValidationError);
    }
    SECTION("no sources") {
        REQUIRE_THROWS_WITH(parse_experiment(R"({"frame": ["A", "B"], "sources": {}})"),
                            Catch::Matchers::ContainsSubstring("no sources"));
    }
    SECTION("entry is not a pair") {
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A"], "sources": {"m": [[["A"]]]}})"),
            Catch::Matchers::ContainsSubstring("[ [labels...], mass ]"));
    }
    SECTION("unknown label inside a subset") {
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A", "B"], "sources": {"m": [[["C"], 1.0]]}})"),
            Catch::Matchers::ContainsSubstring("source 'm'"));
    }
    SECTION("masses that do not sum to one") {
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A", "B"], "sources": {"m": [[["A"], 0.5]]}})"),
            Catch::Matchers::ContainsSubstring("source 'm'"));
    }
    SECTION("order must be a permutation of the sources") {
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A"], "sources": {"m": [[["A"], 1.0]]},
                                 "order": ["m", "m"]})"),
            Catch::Matchers::ContainsSubstring("repeats"));
        REQUIRE_THROWS_WITH(
            parse_experiment(R"({"frame": ["A"], "sources": {"m": [[["A"], 1.0]]},
                                 "order": ["ghost"]})"),
            Catch::Matchers::ContainsSubstring("unknown source 'ghost'"));
        REQUIRE_THROWS_WITH(
            parse_experiment(
                R"({"frame": ["A"], "sources": {"m": [[["A"], 1.0]], "n": [[["A"], 1.0]]},
                    "order": ["m"]})"),
            Catch::Matchers::ContainsSubstring("every source"));
    }
    SECTION("renormalize must be boolean") {
        REQUIRE_THROWS_WITH(
            parse_experiment(
                R"({"frame": ["A"], "sources": {"m": [[["A"], 1.0]]}, "renormalize": 1})"),
            Catch::Matchers::ContainsSubstring("boolean"));
    }
}

TEST_CASE("rule objects round-trip and reject junk") {
    REQUIRE(rule_from_json(rule_to_json(RuleSpec::make_krc(0.3))).lambda == 0.3);
    REQUIRE(rule_from_json(rule_to_json(RuleSpec::make_dempster())).kind ==
            RuleKind::Dempster);

    REQUIRE_THROWS_AS(rule_from_json(ordered_json{{"kind", "magic"}}), ValidationError);
    REQUIRE_THROWS_AS(rule_from_json(ordered_json{{"kind", "krc"}}), ValidationError);
    REQUIRE_THROWS_AS(rule_from_json(ordered_json{{"kind", "krc"}, {"lambda", 1.5}}),
                      ValidationError);
    REQUIRE_THROWS_AS(rule_from_json(ordered_json{{"kind", "dempster"}, {"lambda", 0.5}}),
                      ValidationError);
    REQUIRE_THROWS_AS(rule_from_json(ordered_json{{"kind", "krc"}, {"lambda", 0.5}, {"x", 1}}),
                      ValidationError);
}

TEST_CASE("renormalization rescales sources and keeps the factor") {
    const char* doc = R"({
      "frame": ["A", "B"],
      "sources": {"m": [[["A"], 1.0], [["B"], 3.0]]},
      "renormalize": true
    })";
    const Experiment exp = load_experiment(doc);
    REQUIRE(exp.sources[0].scale == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(exp.sources[0].mass.mass(exp.frame.singleton(1)) ==
            Catch::Approx(0.75).margin(1e-15));

    SECTION("without the flag the same document is rejected") {
        const char* strict = R"({
          "frame": ["A", "B"],
          "sources": {"m": [[["A"], 1.0], [["B"], 3.0]]}
        })";
        REQUIRE_THROWS_AS(load_experiment(strict), ValidationError);
    }
}

TEST_CASE("subset serialization uses sorted label arrays") {
    Frame frame({"C", "A", "B"});
    const ordered_json j = subset_to_json(frame, frame.theta());
    REQUIRE(j == ordered_json::array({"A", "B", "C"}));
    REQUIRE(subset_from_json(frame, j) == frame.theta());
    REQUIRE(subset_from_json(frame, ordered_json::array()) == Frame::empty_set());
}

TEST_CASE("mass entries carry full precision next to the display string") {
    Frame frame({"A", "B"});
    MassFunction m(frame, {{frame.singleton(0), 1.0 / 3.0}, {frame.theta(), 2.0 / 3.0}});
    const ordered_json entries = mass_entries_to_json(m);
    REQUIRE(entries.size() == 2);
    REQUIRE(entries[0]["subset"] == ordered_json::array({"A"}));
    REQUIRE(entries[0]["mass"].get<double>() == 1.0 / 3.0);
    REQUIRE(entries[0]["display"] == "0.3333");

    SECTION("the full-precision field survives a serialization round trip") {
        const std::string text = entries.dump();
        const MassFunction back =
            mass_from_entries_json(frame, ordered_json::parse(text));
        REQUIRE(linf_distance(back, m) <= 1e-12);
    }
}

TEST_CASE("frames round-trip through json") {
    Frame frame({"x", "y", "z"});
    REQUIRE(frame_from_json(frame_to_json(frame)) == frame);
}

TEST_CASE("intermediates expose the conflict alongside the masses") {
    Frame frame({"A", "B"});
    MassFunction m1(frame, {{frame.singleton(0), 0.2},
                            {frame.singleton(1), 0.7},
                            {frame.theta(), 0.1}});
    MassFunction m2(frame, {{frame.singleton(0), 0.8},
                            {frame.singleton(1), 0.1},
                            {frame.theta(), 0.1}});
    const ordered_json j = intermediate_to_json(conjunctive(m1, m2));
    REQUIRE(j["conflict"].get<double>() == Catch::Approx(0.58).margin(1e-12));
    REQUIRE(j["conflict_display"] == "0.5800");
    REQUIRE(j["masses"].is_array());
    // the empty set appears explicitly in an unnormalized product
    REQUIRE(j["masses"][0]["subset"] == ordered_json::array());
}

TEST_CASE("display strings are plain fixed four-decimal renderings") {
    REQUIRE(display_4dp(0.0) == "0.0000");
    REQUIRE(display_4dp(0.29412) == "0.2941");
    REQUIRE(display_4dp(1.0) == "1.0000");
}
