#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bft/errors.hpp"
#include "bft/frame.hpp"

namespace bft {

/// Tolerance on the total mass of a basic belief assignment.
inline constexpr double kNormTolerance = 1e-9;

namespace detail {

inline void check_same_frame(const Frame& a, const Frame& b, const char* what) {
    if (!(a == b)) {
        throw FrameMismatchError(std::string(what) + ": operands use different frames");
    }
}

/// Validates one (subset, mass) assignment shared by BBAs and intermediates.
inline void check_mass_value(const Frame& frame, SubsetRef subset, double mass) {
    frame.require(subset);
    if (!std::isfinite(mass)) {
        throw ValidationError("mass for " + frame.subset_name(subset) + " is not finite");
    }
    if (mass < 0.0) {
        std::ostringstream msg;
        msg << "negative mass " << mass << " for " << frame.subset_name(subset);
        throw ValidationError(msg.str());
    }
    // Allow a hair above 1 so renormalization-free rule outputs whose single
    // focal mass rounds to 1 + ulp are not rejected.
    if (mass > 1.0 + kNormTolerance) {
        std::ostringstream msg;
        msg << "mass " << mass << " for " << frame.subset_name(subset) << " exceeds 1";
        throw ValidationError(msg.str());
    }
}

inline void check_total(double total) {
    if (std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "masses sum to " << total << ", deviating from 1 by " << std::abs(total - 1.0)
            << " (tolerance " << kNormTolerance << ")";
        throw ValidationError(msg.str());
    }
}

}  // namespace detail

/// A normalized basic belief assignment: unit mass distributed over
/// non-empty subsets of a frame. Stored sparsely; the stored key set is
/// exactly the set of focal elements (every stored mass is > 0, the empty
/// set carries none). Immutable value type.
class MassFunction {
  public:
    using FocalMap = std::map<std::uint32_t, double>;

    /// Validating constructor. Zero-mass entries are dropped; duplicate
    /// subsets, mass on the empty set, out-of-frame subsets, and totals
    /// deviating from 1 beyond kNormTolerance are rejected.
    MassFunction(Frame frame, const std::vector<std::pair<SubsetRef, double>>& assignments)
        : frame_(std::move(frame)) {
        double total = 0.0;
        for (const auto& [subset, mass] : assignments) {
            detail::check_mass_value(frame_, subset, mass);
            if (subset.is_empty() && mass > 0.0) {
                throw ValidationError("the empty set cannot carry positive mass");
            }
            if (mass == 0.0) continue;
            if (!masses_.emplace(subset.bits(), mass).second) {
                throw ValidationError("duplicate assignment for subset " +
                                      frame_.subset_name(subset));
            }
            total += mass;
        }
        detail::check_total(total);
    }

    /// The totally ignorant BBA: all mass on the whole frame.
    static MassFunction vacuous(Frame frame) {
        SubsetRef theta = frame.theta();
        return MassFunction(std::move(frame), {{theta, 1.0}});
    }

    /// Opt-in rescaling path for inputs whose total is off: scales every mass
    /// by 1/total and returns the factor applied. Negative masses, mass on
    /// the empty set, and duplicates are still rejected.
    static std::pair<MassFunction, double> renormalized(
        Frame frame, const std::vector<std::pair<SubsetRef, double>>& assignments) {
        double total = 0.0;
        for (const auto& [subset, mass] : assignments) {
            frame.require(subset);
            if (!std::isfinite(mass) || mass < 0.0) {
                throw ValidationError("renormalization requires finite non-negative masses");
            }
            total += mass;
        }
        if (total <= 0.0) {
            throw ValidationError("cannot renormalize: total mass is zero");
        }
        const double scale = 1.0 / total;
        std::vector<std::pair<SubsetRef, double>> scaled;
        scaled.reserve(assignments.size());
        for (const auto& [subset, mass] : assignments) {
            scaled.emplace_back(subset, mass * scale);
        }
        return {MassFunction(std::move(frame), scaled), scale};
    }

    const Frame& frame() const noexcept { return frame_; }

    /// Mass of a subset; 0 for non-focal subsets.
    double mass(SubsetRef x) const {
        frame_.require(x);
        auto it = masses_.find(x.bits());
        return it == masses_.end() ? 0.0 : it->second;
    }

    /// Focal elements and their masses, keyed by subset bits in ascending
    /// order. Iteration order is deterministic.
    const FocalMap& focal() const noexcept { return masses_; }
    std::size_t focal_count() const noexcept { return masses_.size(); }

    /// True iff every focal element is a singleton.
    bool is_bayesian() const noexcept {
        for (const auto& [bits, mass] : masses_) {
            if (std::popcount(bits) != 1) return false;
        }
        return true;
    }

  private:
    Frame frame_;
    FocalMap masses_;
};

/// The raw conjunctive product of two BBAs before any conflict handling:
/// non-negative masses over all subsets, where the empty-set entry is the
/// degree of conflict K. Total mass is 1.
class CombinationIntermediate {
  public:
    using FocalMap = std::map<std::uint32_t, double>;

    CombinationIntermediate(Frame frame, FocalMap masses)
        : frame_(std::move(frame)), masses_(std::move(masses)) {
        double total = 0.0;
        for (const auto& [bits, mass] : masses_) {
            detail::check_mass_value(frame_, SubsetRef{bits}, mass);
            total += mass;
        }
        detail::check_total(total);
    }

    const Frame& frame() const noexcept { return frame_; }

    double mass(SubsetRef x) const {
        frame_.require(x);
        auto it = masses_.find(x.bits());
        return it == masses_.end() ? 0.0 : it->second;
    }

    const FocalMap& entries() const noexcept { return masses_; }

    /// Conjunctive mass on the empty set, i.e. the degree of conflict.
    double conflict() const noexcept {
        auto it = masses_.find(0u);
        return it == masses_.end() ? 0.0 : it->second;
    }

  private:
    Frame frame_;
    FocalMap masses_;
};

namespace detail {

/// Walks the union of two sparse focal maps in ascending key order, passing
/// (bits, mass_a, mass_b) with zeros where a key is absent. Subsets absent
/// from both maps contribute (0, 0) and are skipped, which is exact for any
/// accumulation of |a-b|.
template <typename Fn>
void for_each_union_key(const std::map<std::uint32_t, double>& a,
                        const std::map<std::uint32_t, double>& b, Fn&& fn) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            fn(ia->first, ia->second, 0.0);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            fn(ib->first, 0.0, ib->second);
            ++ib;
        } else {
            fn(ia->first, ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
}

}  // namespace detail

/// Largest per-subset mass difference over the full power set.
inline double linf_distance(const MassFunction& a, const MassFunction& b) {
    detail::check_same_frame(a.frame(), b.frame(), "linf_distance");
    double worst = 0.0;
    detail::for_each_union_key(a.focal(), b.focal(), [&](std::uint32_t, double va, double vb) {
        worst = std::max(worst, std::abs(va - vb));
    });
    return worst;
}

/// Sum of per-subset mass differences over the full power set.
inline double l1_distance(const MassFunction& a, const MassFunction& b) {
    detail::check_same_frame(a.frame(), b.frame(), "l1_distance");
    double total = 0.0;
    detail::for_each_union_key(a.focal(), b.focal(), [&](std::uint32_t, double va, double vb) {
        total += std::abs(va - vb);
    });
    return total;
}

}  // namespace bft
