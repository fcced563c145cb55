#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bft/errors.hpp"
#include "bft/mass.hpp"
#include "bft/measures.hpp"

namespace bft {

/// One strict dominance test between two rival hypotheses:
/// does Bel(candidate) exceed Pl(rival)?
struct SingletonComparison {
    std::size_t candidate = 0;
    std::size_t rival = 0;
    double candidate_bel = 0.0;
    double rival_pl = 0.0;
    bool holds = false;
};

/// Result of the belief-interval decision criterion. A winner exists only
/// when one hypothesis strictly dominates every rival; otherwise the outcome
/// is indeterminate and the failed comparisons say why. Degenerate
/// "decisions" on the empty set or the whole frame are excluded by
/// construction: only singletons compete.
struct DecisionOutcome {
    std::optional<std::size_t> winner;
    std::vector<BeliefInterval> singleton_intervals;  // index-aligned with the frame
    std::vector<SingletonComparison> comparisons;     // all ordered pairs, candidate-major

    bool decided() const noexcept { return winner.has_value(); }
};

/// Belief-interval decision: pick the element whose belief strictly exceeds
/// the plausibility of every other element; indeterminate when none does.
/// Comparisons are exact (no epsilon): a manufactured decision near a tie is
/// worse than no decision. Since Bel ≤ Pl, at most one element can win.
inline DecisionOutcome decide(const MassFunction& m) {
    const Frame& frame = m.frame();
    const std::size_t n = frame.size();
    if (n < 2) {
        throw ValidationError("decision requires a frame with at least two elements");
    }

    DecisionOutcome outcome;
    outcome.singleton_intervals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        outcome.singleton_intervals.push_back(belief_interval(m, frame.singleton(i)));
    }

    for (std::size_t candidate = 0; candidate < n; ++candidate) {
        bool dominates_all = true;
        for (std::size_t rival = 0; rival < n; ++rival) {
            if (rival == candidate) continue;
            SingletonComparison cmp;
            cmp.candidate = candidate;
            cmp.rival = rival;
            cmp.candidate_bel = outcome.singleton_intervals[candidate].bel;
            cmp.rival_pl = outcome.singleton_intervals[rival].pl;
            cmp.holds = cmp.candidate_bel > cmp.rival_pl;
            dominates_all = dominates_all && cmp.holds;
            outcome.comparisons.push_back(cmp);
        }
        if (dominates_all) {
            outcome.winner = candidate;
        }
    }
    return outcome;
}

}  // namespace bft
