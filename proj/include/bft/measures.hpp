#pragma once

#include "bft/frame.hpp"
#include "bft/mass.hpp"

namespace bft {

/// The [Bel, Pl] bounds on the unknown probability of a subset, plus the
/// interval width Pl - Bel that quantifies its epistemic uncertainty.
struct BeliefInterval {
    SubsetRef subset;
    double bel = 0.0;
    double pl = 0.0;
    double width = 0.0;
};

/// Belief: total mass committed to subsets of x.
inline double bel(const MassFunction& m, SubsetRef x) {
    m.frame().require(x);
    double total = 0.0;
    for (const auto& [bits, mass] : m.focal()) {
        if (SubsetRef{bits}.is_subset_of(x)) total += mass;
    }
    return total;
}

/// Plausibility: total mass not contradicting x. Equals 1 - bel(complement).
inline double pl(const MassFunction& m, SubsetRef x) {
    m.frame().require(x);
    double total = 0.0;
    for (const auto& [bits, mass] : m.focal()) {
        if (SubsetRef{bits}.intersects(x)) total += mass;
    }
    return total;
}

inline BeliefInterval belief_interval(const MassFunction& m, SubsetRef x) {
    BeliefInterval interval;
    interval.subset = x;
    interval.bel = bel(m, x);
    interval.pl = pl(m, x);
    interval.width = interval.pl - interval.bel;
    return interval;
}

}  // namespace bft
