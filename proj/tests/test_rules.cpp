#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bft/errors.hpp"
#include "bft/rules.hpp"
#include "bft/sampling.hpp"
#include "oracles.hpp"

using namespace bft;

namespace {

struct TwoHypotheses {
    Frame frame{std::vector<std::string>{"A", "B"}};
    SubsetRef a = frame.singleton(0);
    SubsetRef b = frame.singleton(1);
    SubsetRef theta = frame.theta();
    // A worked three-source example kept across the test suite: heavy
    // disagreement between the first two sources, a mild third.
    MassFunction m1{frame, {{a, 0.2}, {b, 0.7}, {theta, 0.1}}};
    MassFunction m2{frame, {{a, 0.8}, {b, 0.1}, {theta, 0.1}}};
    MassFunction m3{frame, {{a, 0.4}, {b, 0.3}, {theta, 0.3}}};
};

Frame frame_of_size(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, char('A' + i)));
    return Frame(labels);
}

}  // namespace

TEST_CASE("conjunctive product matches hand-computed values") {
    TwoHypotheses fx;
    const CombinationIntermediate ci = conjunctive(fx.m1, fx.m2);
    REQUIRE(ci.conflict() == Catch::Approx(0.58).margin(1e-12));
    REQUIRE(ci.mass(fx.a) == Catch::Approx(0.26).margin(1e-12));
    REQUIRE(ci.mass(fx.b) == Catch::Approx(0.15).margin(1e-12));
    REQUIRE(ci.mass(fx.theta) == Catch::Approx(0.01).margin(1e-12));
    REQUIRE(conflict_degree(fx.m1, fx.m2) == ci.conflict());

    const CombinationIntermediate ci23 = conjunctive(fx.m2, fx.m3);
    REQUIRE(ci23.conflict() == Catch::Approx(0.28).margin(1e-12));
    REQUIRE(ci23.mass(fx.a) == Catch::Approx(0.60).margin(1e-12));
    REQUIRE(ci23.mass(fx.b) == Catch::Approx(0.09).margin(1e-12));
}

TEST_CASE("conjunctive product agrees with the dense reference on random pairs") {
    for (std::size_t n : {2, 3, 4}) {
        Frame frame = frame_of_size(n);
        std::mt19937_64 gen(derive_seed(101, n));
        for (int trial = 0; trial < 50; ++trial) {
            const MassFunction x = sample_mass_simplex(frame, gen);
            const MassFunction y = sample_mass_simplex(frame, gen);
            const auto dense = oracles::conjunctive_dense(x, y);
            const CombinationIntermediate ci = conjunctive(x, y);
            for (std::uint32_t bits = 0; bits <= frame.theta().bits(); ++bits) {
                const double expected =
                    dense.count(bits) ? dense.at(bits) : 0.0;
                REQUIRE(std::abs(ci.mass(SubsetRef{bits}) - expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("dempster combination renormalizes the conflict away") {
    TwoHypotheses fx;
    const MassFunction fused = dempster(fx.m1, fx.m2);
    // conjunctive masses divided by 1 - K = 0.42
    REQUIRE(fused.mass(fx.a) == Catch::Approx(0.26 / 0.42).margin(1e-12));
    REQUIRE(fused.mass(fx.b) == Catch::Approx(0.15 / 0.42).margin(1e-12));
    REQUIRE(fused.mass(fx.theta) == Catch::Approx(0.01 / 0.42).margin(1e-12));
}

TEST_CASE("dempster rejects total conflict") {
    Frame frame({"A", "B"});
    MassFunction all_a(frame, {{frame.singleton(0), 1.0}});
    MassFunction all_b(frame, {{frame.singleton(1), 1.0}});
    REQUIRE_THROWS_AS(dempster(all_a, all_b), TotalConflictError);
}

TEST_CASE("dempster is commutative and associative") {
    Frame frame = frame_of_size(3);
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const MassFunction x = sample_mass_simplex(frame, gen);
        const MassFunction y = sample_mass_simplex(frame, gen);
        const MassFunction z = sample_mass_simplex(frame, gen);
        REQUIRE(linf_distance(dempster(x, y), dempster(y, x)) <= 1e-12);
        REQUIRE(linf_distance(dempster(dempster(x, y), z), dempster(x, dempster(y, z))) <= 1e-9);
    }
}

TEST_CASE("the vacuous BBA is neutral for both rules") {
    Frame frame = frame_of_size(3);
    const MassFunction vac = MassFunction::vacuous(frame);
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 50; ++trial) {
        const MassFunction x = sample_mass_simplex(frame, gen);
        REQUIRE(linf_distance(dempster(x, vac), x) <= 1e-12);
        REQUIRE(linf_distance(krc(x, vac, 0.4), x) <= 1e-12);
        REQUIRE(linf_distance(krc(vac, x, 0.0), x) <= 1e-12);
    }
}

TEST_CASE("krc matches hand-computed values at lambda 0.2") {
    TwoHypotheses fx;
    const MassFunction fused = krc(fx.m1, fx.m2, 0.2);
    // denominator 1 - 0.2 * 0.58 = 0.884; theta takes the remainder
    REQUIRE(fused.mass(fx.a) == Catch::Approx(0.26 / 0.884).margin(1e-12));
    REQUIRE(fused.mass(fx.b) == Catch::Approx(0.15 / 0.884).margin(1e-12));
    REQUIRE(fused.mass(fx.theta) ==
            Catch::Approx(1.0 - 0.26 / 0.884 - 0.15 / 0.884).margin(1e-12));

    const MassFunction fused23 = krc(fx.m2, fx.m3, 0.2);
    REQUIRE(fused23.mass(fx.a) == Catch::Approx(0.6356).margin(5e-4));
    REQUIRE(fused23.mass(fx.b) == Catch::Approx(0.0953).margin(5e-4));
    REQUIRE(fused23.mass(fx.theta) == Catch::Approx(0.2691).margin(5e-4));
}

TEST_CASE("krc validates lambda") {
    TwoHypotheses fx;
    REQUIRE_THROWS_AS(krc(fx.m1, fx.m2, -0.1), ValidationError);
    REQUIRE_THROWS_AS(krc(fx.m1, fx.m2, 1.1), ValidationError);
    REQUIRE_THROWS_AS(krc(fx.m1, fx.m2, std::numeric_limits<double>::quiet_NaN()),
                      ValidationError);
    REQUIRE_NOTHROW(krc(fx.m1, fx.m2, 0.0));
    REQUIRE_NOTHROW(krc(fx.m1, fx.m2, 1.0));
}

TEST_CASE("krc at lambda 1 coincides with dempster") {
    for (std::size_t n : {2, 3, 4}) {
        Frame frame = frame_of_size(n);
        std::mt19937_64 gen(derive_seed(5, n));
        for (int trial = 0; trial < 50; ++trial) {
            const MassFunction x = sample_mass_simplex(frame, gen);
            const MassFunction y = sample_mass_simplex(frame, gen);
            REQUIRE(linf_distance(krc(x, y, 1.0), dempster(x, y)) <= 1e-12);
        }
    }
}

TEST_CASE("krc at lambda 0 moves exactly the conflict onto the whole frame") {
    Frame frame = frame_of_size(3);
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const MassFunction x = sample_mass_simplex(frame, gen);
        const MassFunction y = sample_mass_simplex(frame, gen);
        const CombinationIntermediate ci = conjunctive(x, y);
        const MassFunction fused = krc(x, y, 0.0);
        REQUIRE(std::abs(fused.mass(frame.theta()) - ci.mass(frame.theta()) - ci.conflict()) <=
                1e-12);
        // every proper subset keeps its conjunctive mass untouched
        for (std::uint32_t bits = 1; bits < frame.theta().bits(); ++bits) {
            REQUIRE(std::abs(fused.mass(SubsetRef{bits}) - ci.mass(SubsetRef{bits})) <= 1e-12);
        }
    }
}

TEST_CASE("krc is commutative") {
    Frame frame = frame_of_size(4);
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 50; ++trial) {
        const MassFunction x = sample_mass_simplex(frame, gen);
        const MassFunction y = sample_mass_simplex(frame, gen);
        for (double lambda : {0.0, 0.3, 0.8, 1.0}) {
            REQUIRE(linf_distance(krc(x, y, lambda), krc(y, x, lambda)) <= 1e-12);
        }
    }
}

TEST_CASE("krc outputs stay normalized and non-negative") {
    Frame frame = frame_of_size(3);
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 100; ++trial) {
        const MassFunction x = sample_mass_simplex(frame, gen);
        const MassFunction y = sample_mass_simplex(frame, gen);
        for (double lambda : {0.0, 0.2, 0.5, 0.9, 1.0}) {
            const MassFunction fused = krc(x, y, lambda);
            double total = 0.0;
            for (const auto& [bits, mass] : fused.focal()) {
                REQUIRE(mass >= 0.0);
                total += mass;
            }
            REQUIRE(std::abs(total - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("krc under total conflict") {
    Frame frame({"A", "B"});
    MassFunction all_a(frame, {{frame.singleton(0), 1.0}});
    MassFunction all_b(frame, {{frame.singleton(1), 1.0}});

    SECTION("lambda 1 has a vanishing normalizer, like dempster") {
        REQUIRE_THROWS_AS(krc(all_a, all_b, 1.0), TotalConflictError);
    }
    SECTION("lambda below 1 resolves to ignorance") {
        const MassFunction fused = krc(all_a, all_b, 0.5);
        REQUIRE(fused.mass(frame.theta()) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("sequential fusion folds left in the given order") {
    TwoHypotheses fx;
    const RuleSpec rule = RuleSpec::make_krc(0.2);
    const std::vector<MassFunction> sources{fx.m1, fx.m2, fx.m3};

    const MassFunction folded = fuse_sequential(rule, sources);
    const MassFunction direct = krc(krc(fx.m1, fx.m2, 0.2), fx.m3, 0.2);
    REQUIRE(linf_distance(folded, direct) == 0.0);

    SECTION("a single source passes through unchanged") {
        const MassFunction one = fuse_sequential(rule, std::vector<MassFunction>{fx.m1});
        REQUIRE(linf_distance(one, fx.m1) == 0.0);
    }
    SECTION("an empty source list is rejected") {
        REQUIRE_THROWS_AS(fuse_sequential(rule, std::vector<MassFunction>{}), ValidationError);
    }
    SECTION("order matters under krc") {
        const MassFunction other =
            fuse_sequential(rule, std::vector<MassFunction>{fx.m2, fx.m3, fx.m1});
        REQUIRE(linf_distance(folded, other) > 0.1);
    }
    SECTION("a failing step is reported with its position") {
        Frame frame({"A", "B"});
        MassFunction all_a(frame, {{frame.singleton(0), 1.0}});
        MassFunction all_b(frame, {{frame.singleton(1), 1.0}});
        try {
            fuse_sequential(RuleSpec::make_dempster(),
                            std::vector<MassFunction>{all_a, all_b, all_a});
            FAIL("expected TotalConflictError");
        } catch (const TotalConflictError& e) {
            REQUIRE(e.step().has_value());
            REQUIRE(*e.step() == 1);
        }
    }
}

TEST_CASE("rule specs name themselves and gate combine") {
    REQUIRE(RuleSpec::make_dempster().name() == "dempster");
    REQUIRE(RuleSpec::make_krc(0.25).name() == "krc(lambda=0.25)");
    REQUIRE(RuleSpec::make_conjunctive().name() == "conjunctive");

    TwoHypotheses fx;
    REQUIRE_THROWS_AS(combine(RuleSpec::make_conjunctive(), fx.m1, fx.m2), ValidationError);
    REQUIRE(linf_distance(combine(RuleSpec::make_dempster(), fx.m1, fx.m2),
                          dempster(fx.m1, fx.m2)) == 0.0);
    REQUIRE(linf_distance(combine(RuleSpec::make_krc(0.2), fx.m1, fx.m2),
                          krc(fx.m1, fx.m2, 0.2)) == 0.0);
}
