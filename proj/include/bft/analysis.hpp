#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bft/decision.hpp"
#include "bft/errors.hpp"
#include "bft/mass.hpp"
#include "bft/rules.hpp"
#include "bft/sampling.hpp"

namespace bft {

/// Both groupings of a three-source fusion and how far apart they land.
/// Gaps are taken over the full power set; subsets absent from a result
/// count as mass 0.
struct AssociativityResult {
    MassFunction left;   // (a ⊕ b) ⊕ c
    MassFunction right;  // a ⊕ (b ⊕ c)
    double linf_gap = 0.0;
    double l1_gap = 0.0;
};

namespace detail {

inline void check_foldable(const RuleSpec& rule) {
    if (rule.kind == RuleKind::Conjunctive) {
        throw ValidationError(
            "analysis requires a foldable rule ('dempster' or 'krc'); the conjunctive "
            "product does not produce a normalized BBA");
    }
    if (rule.kind == RuleKind::Krc) {
        check_lambda(rule.lambda);
    }
}

}  // namespace detail

/// Fuses (a ⊕ b) ⊕ c against a ⊕ (b ⊕ c) and measures the disagreement.
/// An associative rule yields gaps at rounding level; a non-associative one
/// can disagree by a large fraction of the total mass.
inline AssociativityResult check_associativity(const RuleSpec& rule, const MassFunction& a,
                                               const MassFunction& b, const MassFunction& c) {
    detail::check_foldable(rule);
    auto fuse_grouping = [&](const MassFunction& x, const MassFunction& y,
                             const MassFunction& z, const char* grouping) {
        try {
            return combine(rule, combine(rule, x, y), z);
        } catch (const TotalConflictError& e) {
            throw TotalConflictError(std::string(grouping) + ": " + e.what());
        }
    };
    AssociativityResult result{
        fuse_grouping(a, b, c, "left grouping (a+b)+c"),
        fuse_grouping(b, c, a, "right grouping a+(b+c)"),  // commutativity: (b+c)+a
        0.0,
        0.0,
    };
    result.linf_gap = linf_distance(result.left, result.right);
    result.l1_gap = l1_distance(result.left, result.right);
    return result;
}

/// One left-fold fusion order and its outcome. Orders that hit total
/// conflict are recorded, not fatal.
struct FusedOrder {
    std::vector<std::size_t> permutation;  // indices into the source list
    std::optional<MassFunction> result;
    std::optional<std::size_t> failed_step;
    std::string failure;
};

/// Per-permutation fused results plus divergence metrics: the evidence
/// object for how much the fusion order matters under a given rule.
struct OrderSensitivityReport {
    RuleSpec rule;
    bool exhaustive = true;  // all n! orders, or a seeded uniform sample
    std::vector<FusedOrder> orders;
    std::size_t failed_count = 0;
    double max_pairwise_linf = 0.0;
    bool decision_agreement = true;
};

/// Orders are enumerated exhaustively up to 7 sources (7! = 5040 folds);
/// beyond that a seeded uniform sample of the same size is used.
inline constexpr std::size_t kMaxExhaustiveOrders = 5040;

/// Left-folds every permutation of the sources (or a seeded sample when
/// n > 7) and reports the largest pairwise L∞ distance between fused
/// results, plus whether the decision outcome survives reordering.
inline OrderSensitivityReport order_sweep(const RuleSpec& rule,
                                          std::span<const MassFunction> sources,
                                          std::uint64_t seed = 0) {
    detail::check_foldable(rule);
    const std::size_t n = sources.size();
    if (n < 2) {
        throw ValidationError("order sweep requires at least two sources");
    }
    for (std::size_t i = 1; i < n; ++i) {
        detail::check_same_frame(sources[0].frame(), sources[i].frame(), "order_sweep");
    }

    OrderSensitivityReport report;
    report.rule = rule;

    std::vector<std::vector<std::size_t>> permutations;
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    if (n <= 7) {
        report.exhaustive = true;
        std::vector<std::size_t> perm = identity;
        do {
            permutations.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        report.exhaustive = false;
        permutations.reserve(kMaxExhaustiveOrders);
        for (std::size_t k = 0; k < kMaxExhaustiveOrders; ++k) {
            std::mt19937_64 gen(derive_seed(seed, k));
            std::vector<std::size_t> perm = identity;
            // Fisher-Yates with our own uniform draw, for seed-stable output.
            for (std::size_t i = n - 1; i > 0; --i) {
                const auto j = std::min<std::size_t>(
                    static_cast<std::size_t>(uniform_unit(gen) * double(i + 1)), i);
                std::swap(perm[i], perm[j]);
            }
            permutations.push_back(std::move(perm));
        }
    }

    std::vector<MassFunction> ordered;
    ordered.reserve(n);
    for (const auto& perm : permutations) {
        ordered.clear();
        for (std::size_t idx : perm) ordered.push_back(sources[idx]);
        FusedOrder entry;
        entry.permutation = perm;
        try {
            entry.result = fuse_sequential(rule, std::span<const MassFunction>(ordered));
        } catch (const TotalConflictError& e) {
            entry.failed_step = e.step();
            entry.failure = e.what();
            ++report.failed_count;
        }
        report.orders.push_back(std::move(entry));
    }

    // Pairwise L∞ over successful results, computed per subset: the largest
    // |a - b| over any pair equals max - min of the masses seen there, with
    // an implicit 0 for results where the subset is not focal.
    struct Extrema {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        std::size_t seen = 0;
    };
    std::map<std::uint32_t, Extrema> extrema;
    std::size_t successes = 0;
    for (const auto& entry : report.orders) {
        if (!entry.result) continue;
        ++successes;
        for (const auto& [bits, mass] : entry.result->focal()) {
            Extrema& e = extrema[bits];
            e.lo = std::min(e.lo, mass);
            e.hi = std::max(e.hi, mass);
            ++e.seen;
        }
    }
    for (const auto& [bits, e] : extrema) {
        const double lo = e.seen < successes ? std::min(e.lo, 0.0) : e.lo;
        report.max_pairwise_linf = std::max(report.max_pairwise_linf, e.hi - lo);
    }

    // Decision agreement across orders, using the belief-interval criterion.
    // On a one-element frame no decision is defined; reordering cannot
    // disagree there.
    if (sources[0].frame().size() >= 2) {
        bool first = true;
        std::optional<std::size_t> reference;
        for (const auto& entry : report.orders) {
            if (!entry.result) continue;
            const auto outcome = decide(*entry.result);
            if (first) {
                reference = outcome.winner;
                first = false;
            } else if (outcome.winner != reference) {
                report.decision_agreement = false;
                break;
            }
        }
    }
    return report;
}

inline OrderSensitivityReport order_sweep(const RuleSpec& rule,
                                          const std::vector<MassFunction>& sources,
                                          std::uint64_t seed = 0) {
    return order_sweep(rule, std::span<const MassFunction>(sources), seed);
}

/// One sweep per lambda value, same sources and seed throughout.
inline std::vector<OrderSensitivityReport> order_sweep_lambda_list(
    std::span<const MassFunction> sources, std::span<const double> lambdas,
    std::uint64_t seed = 0) {
    std::vector<OrderSensitivityReport> reports;
    reports.reserve(lambdas.size());
    for (double lambda : lambdas) {
        reports.push_back(order_sweep(RuleSpec::make_krc(lambda), sources, seed));
    }
    return reports;
}

/// The best associativity violation found by randomized search.
struct SearchBest {
    std::array<MassFunction, 3> triple;
    AssociativityResult assoc;
    std::uint64_t trial = 0;
};

struct SearchResult {
    RuleSpec rule;
    Frame frame;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t skipped = 0;  // trials that hit total conflict
    std::optional<SearchBest> best;

    double best_linf_gap() const noexcept { return best ? best->assoc.linf_gap : 0.0; }
};

/// Randomized counter-example search: samples BBA triples uniformly on the
/// simplex over all non-empty subsets and keeps the triple with the largest
/// associativity gap. Deterministic for a given (rule, frame, trials, seed):
/// each trial derives its own engine from the trial index, so results do not
/// depend on evaluation order. Dempster serves as a null control — its best
/// gap stays at rounding level.
inline SearchResult search_counterexamples(const RuleSpec& rule, const Frame& frame,
                                           std::uint64_t trials, std::uint64_t seed) {
    detail::check_foldable(rule);
    if (trials < 1) {
        throw ValidationError("counter-example search requires at least one trial");
    }
    SearchResult result{rule, frame, trials, seed, 0, std::nullopt};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 gen(derive_seed(seed, trial));
        MassFunction a = sample_mass_simplex(frame, gen);
        MassFunction b = sample_mass_simplex(frame, gen);
        MassFunction c = sample_mass_simplex(frame, gen);
        try {
            AssociativityResult assoc = check_associativity(rule, a, b, c);
            if (!result.best || assoc.linf_gap > result.best->assoc.linf_gap) {
                result.best = SearchBest{{std::move(a), std::move(b), std::move(c)},
                                         std::move(assoc), trial};
            }
        } catch (const TotalConflictError&) {
            ++result.skipped;
        }
    }
    return result;
}

/// One search per lambda value, same frame, trials, and seed throughout;
/// traces the gap-vs-lambda curve, which must reach 0 at lambda = 1.
inline std::vector<SearchResult> search_lambda_list(const Frame& frame, std::uint64_t trials,
                                                    std::uint64_t seed,
                                                    std::span<const double> lambdas) {
    std::vector<SearchResult> results;
    results.reserve(lambdas.size());
    for (double lambda : lambdas) {
        results.push_back(search_counterexamples(RuleSpec::make_krc(lambda), frame, trials, seed));
    }
    return results;
}

}  // namespace bft
