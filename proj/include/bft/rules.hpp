#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bft/errors.hpp"
#include "bft/frame.hpp"
#include "bft/mass.hpp"

namespace bft {

/// Normalizers below this raise TotalConflictError instead of dividing;
/// guards against catastrophic cancellation as lambda*K approaches 1.
inline constexpr double kTotalConflictThreshold = 1e-12;

enum class RuleKind { Dempster, Krc, Conjunctive };

inline const char* rule_kind_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::Dempster: return "dempster";
        case RuleKind::Krc: return "krc";
        case RuleKind::Conjunctive: return "conjunctive";
    }
    return "?";
}

/// Names a combination rule. The tuning parameter lambda is meaningful for
/// KRC only; Dempster's rule behaves like KRC at lambda = 1 and the plain
/// conjunctive product performs no conflict redistribution at all.
struct RuleSpec {
    RuleKind kind = RuleKind::Dempster;
    double lambda = 1.0;

    static RuleSpec make_dempster() { return {RuleKind::Dempster, 1.0}; }
    static RuleSpec make_krc(double lambda) { return {RuleKind::Krc, lambda}; }
    static RuleSpec make_conjunctive() { return {RuleKind::Conjunctive, 1.0}; }

    std::string name() const {
        if (kind != RuleKind::Krc) return rule_kind_name(kind);
        std::ostringstream out;
        out << "krc(lambda=" << lambda << ")";
        return out.str();
    }
};

namespace detail {

inline void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0 || lambda > 1.0) {
        std::ostringstream msg;
        msg << "lambda must lie in [0, 1], got " << lambda;
        throw ValidationError(msg.str());
    }
}

}  // namespace detail

/// Conjunctive product of two BBAs: for every subset X (the empty set
/// included) sums m1(X1)*m2(X2) over focal pairs with X1 ∩ X2 = X.
/// No normalization; the empty-set entry is the degree of conflict.
inline CombinationIntermediate conjunctive(const MassFunction& m1, const MassFunction& m2) {
    detail::check_same_frame(m1.frame(), m2.frame(), "conjunctive");
    std::map<std::uint32_t, double> products;
    for (const auto& [bits1, mass1] : m1.focal()) {
        for (const auto& [bits2, mass2] : m2.focal()) {
            products[bits1 & bits2] += mass1 * mass2;
        }
    }
    return CombinationIntermediate(m1.frame(), std::move(products));
}

/// Degree of conflict K between two BBAs: the conjunctive mass landing on
/// the empty set.
inline double conflict_degree(const MassFunction& m1, const MassFunction& m2) {
    detail::check_same_frame(m1.frame(), m2.frame(), "conflict_degree");
    double conflict = 0.0;
    for (const auto& [bits1, mass1] : m1.focal()) {
        for (const auto& [bits2, mass2] : m2.focal()) {
            if ((bits1 & bits2) == 0u) conflict += mass1 * mass2;
        }
    }
    return conflict;
}

/// Dempster's rule: conjunctive product with the conflict renormalized away,
/// m(X) = conj(X) / (1 - K) for X ≠ ∅. Commutative and associative.
inline MassFunction dempster(const MassFunction& m1, const MassFunction& m2) {
    detail::check_same_frame(m1.frame(), m2.frame(), "dempster");
    const CombinationIntermediate conj = conjunctive(m1, m2);
    const double denom = 1.0 - conj.conflict();
    if (denom < kTotalConflictThreshold) {
        std::ostringstream msg;
        msg << "dempster rule: sources are in total conflict (K = " << conj.conflict()
            << "), the normalizer vanishes";
        throw TotalConflictError(msg.str());
    }
    std::vector<std::pair<SubsetRef, double>> result;
    result.reserve(conj.entries().size());
    for (const auto& [bits, mass] : conj.entries()) {
        if (bits == 0u) continue;
        result.emplace_back(SubsetRef{bits}, mass / denom);
    }
    return MassFunction(m1.frame(), result);
}

/// KRC: divides the conjunctive mass of every proper non-empty subset by
/// 1 - lambda*K and gives the whole frame the remainder 1 - sum(others).
/// The remainder equals (K*(1-lambda) + conj(Θ)) / (1 - lambda*K), so the
/// conflict mass not renormalized away lands on Θ. Commutative; coincides
/// with Dempster's rule at lambda = 1 but is NOT associative for lambda < 1.
inline MassFunction krc(const MassFunction& m1, const MassFunction& m2, double lambda) {
    detail::check_same_frame(m1.frame(), m2.frame(), "krc");
    detail::check_lambda(lambda);
    const CombinationIntermediate conj = conjunctive(m1, m2);
    const double denom = 1.0 - lambda * conj.conflict();
    if (denom < kTotalConflictThreshold) {
        std::ostringstream msg;
        msg << "krc rule: lambda * K = " << lambda * conj.conflict()
            << " leaves a vanishing normalizer";
        throw TotalConflictError(msg.str());
    }
    const std::uint32_t theta_bits = m1.frame().theta().bits();
    std::vector<std::pair<SubsetRef, double>> result;
    result.reserve(conj.entries().size() + 1);
    double assigned = 0.0;
    for (const auto& [bits, mass] : conj.entries()) {
        if (bits == 0u || bits == theta_bits) continue;
        const double quotient = mass / denom;
        result.emplace_back(SubsetRef{bits}, quotient);
        assigned += quotient;
    }
    // The whole frame always takes the remainder clause, even at lambda = 1
    // where it coincides with the quotient analytically.
    double remainder = 1.0 - assigned;
    if (remainder < 0.0) {
        if (remainder < -kNormTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "krc rule: remainder mass for the whole frame is " << remainder;
            throw RuleError(msg.str());
        }
        remainder = 0.0;  // rounding residue of an analytically non-negative value
    }
    result.emplace_back(SubsetRef{theta_bits}, remainder);
    return MassFunction(m1.frame(), result);
}

/// Applies a foldable rule to two BBAs. The conjunctive product is not
/// foldable (its result keeps mass on the empty set) and is rejected here.
inline MassFunction combine(const RuleSpec& rule, const MassFunction& m1,
                            const MassFunction& m2) {
    switch (rule.kind) {
        case RuleKind::Dempster: return dempster(m1, m2);
        case RuleKind::Krc: return krc(m1, m2, rule.lambda);
        case RuleKind::Conjunctive:
            throw ValidationError(
                "the conjunctive product is not a normalized BBA and cannot be combined "
                "further; use rule 'dempster' or 'krc'");
    }
    throw ValidationError("unknown rule kind");
}

/// Left fold of a binary rule over sources in the given order. The order is
/// the caller's responsibility: there is no default, because non-associative
/// rules give different results for different orders. A single source is
/// returned unchanged. Rule failures carry the index of the source whose
/// fold raised them.
inline MassFunction fuse_sequential(const RuleSpec& rule, std::span<const MassFunction> sources) {
    if (sources.empty()) {
        throw ValidationError("sequential fusion requires at least one source");
    }
    if (rule.kind == RuleKind::Conjunctive) {
        // Reject upfront rather than on the first fold, for a clear message.
        combine(rule, sources[0], sources[0]);
    }
    MassFunction fused = sources[0];
    for (std::size_t i = 1; i < sources.size(); ++i) {
        try {
            fused = combine(rule, fused, sources[i]);
        } catch (const TotalConflictError& e) {
            std::ostringstream msg;
            msg << "fusion step " << i << " (folding source index " << i << "): " << e.what();
            throw TotalConflictError(msg.str(), i);
        }
    }
    return fused;
}

inline MassFunction fuse_sequential(const RuleSpec& rule, const std::vector<MassFunction>& sources) {
    return fuse_sequential(rule, std::span<const MassFunction>(sources));
}

}  // namespace bft
