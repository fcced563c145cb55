#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bft/errors.hpp"

namespace bft {

/// Upper bound on frame cardinality. Keeps every subset addressable by a
/// 32-bit mask and the full power set small enough to enumerate exhaustively.
inline constexpr std::size_t kMaxFrameSize = 20;

/// A subset of a frame of discernment, encoded as a bitmask.
/// Bit i set means the frame's i-th element belongs to the subset.
/// All set algebra is exact bitwise arithmetic.
class SubsetRef {
  public:
    constexpr SubsetRef() = default;
    constexpr explicit SubsetRef(std::uint32_t bits) : bits_(bits) {}

    constexpr std::uint32_t bits() const noexcept { return bits_; }
    constexpr bool is_empty() const noexcept { return bits_ == 0; }
    constexpr std::size_t cardinality() const noexcept {
        return static_cast<std::size_t>(std::popcount(bits_));
    }
    constexpr bool is_singleton() const noexcept { return cardinality() == 1; }

    constexpr bool contains_element(std::size_t i) const noexcept {
        return (bits_ >> i) & 1u;
    }
    constexpr bool is_subset_of(SubsetRef other) const noexcept {
        return (bits_ & ~other.bits_) == 0;
    }
    constexpr bool intersects(SubsetRef other) const noexcept {
        return (bits_ & other.bits_) != 0;
    }

    friend constexpr SubsetRef operator&(SubsetRef a, SubsetRef b) noexcept {
        return SubsetRef{a.bits_ & b.bits_};
    }
    friend constexpr SubsetRef operator|(SubsetRef a, SubsetRef b) noexcept {
        return SubsetRef{a.bits_ | b.bits_};
    }

    friend constexpr bool operator==(SubsetRef, SubsetRef) noexcept = default;
    friend constexpr auto operator<=>(SubsetRef, SubsetRef) noexcept = default;

  private:
    std::uint32_t bits_ = 0;
};

/// An ordered finite frame of discernment. The label order is the bit order:
/// element i of labels() corresponds to bit i of every SubsetRef.
/// Immutable after construction.
class Frame {
  public:
    /// Builds a frame from distinct, non-empty labels (at most kMaxFrameSize).
    explicit Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) {
            throw ValidationError("frame requires at least one element label");
        }
        if (labels_.size() > kMaxFrameSize) {
            std::ostringstream msg;
            msg << "frame cardinality " << labels_.size() << " exceeds the supported maximum "
                << kMaxFrameSize;
            throw ValidationError(msg.str());
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i].empty()) {
                throw ValidationError("frame labels must be non-empty strings");
            }
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                if (labels_[i] == labels_[j]) {
                    throw ValidationError("duplicate frame label '" + labels_[i] + "'");
                }
            }
        }
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    /// The whole frame as a subset (all bits set).
    SubsetRef theta() const noexcept {
        return SubsetRef{(std::uint32_t{1} << labels_.size()) - 1u};
    }
    static constexpr SubsetRef empty_set() noexcept { return SubsetRef{0}; }

    SubsetRef singleton(std::size_t i) const {
        if (i >= labels_.size()) {
            throw ValidationError("singleton index out of range");
        }
        return SubsetRef{std::uint32_t{1} << i};
    }

    /// True when the mask stays within this frame's bit range.
    bool contains(SubsetRef x) const noexcept { return x.is_subset_of(theta()); }

    /// Set complement within the frame.
    SubsetRef complement(SubsetRef x) const {
        require(x);
        return SubsetRef{theta().bits() & ~x.bits()};
    }

    std::optional<std::size_t> index_of(std::string_view label) const noexcept {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == label) return i;
        }
        return std::nullopt;
    }

    /// Parses a subset from element labels. Rejects unknown and repeated labels.
    SubsetRef subset_of(std::span<const std::string> names) const {
        std::uint32_t bits = 0;
        for (const auto& name : names) {
            auto idx = index_of(name);
            if (!idx) {
                throw ValidationError("unknown label '" + name + "' in subset");
            }
            const std::uint32_t bit = std::uint32_t{1} << *idx;
            if (bits & bit) {
                throw ValidationError("label '" + name + "' repeated in subset");
            }
            bits |= bit;
        }
        return SubsetRef{bits};
    }

    /// Labels of a subset in lexicographic order (the canonical wire form).
    std::vector<std::string> subset_labels(SubsetRef x) const {
        require(x);
        std::vector<std::string> out;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (x.contains_element(i)) out.push_back(labels_[i]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Human-readable subset name, e.g. "A∪B"; "∅" for the empty set.
    std::string subset_name(SubsetRef x) const {
        if (x.is_empty()) return "∅";
        const auto parts = subset_labels(x);
        std::string out = parts.front();
        for (std::size_t i = 1; i < parts.size(); ++i) {
            out += "∪";
            out += parts[i];
        }
        return out;
    }

    /// Throws FrameMismatchError when the mask addresses bits outside the frame.
    void require(SubsetRef x) const {
        if (!contains(x)) {
            std::ostringstream msg;
            msg << "subset mask 0x" << std::hex << x.bits() << std::dec
                << " lies outside a frame of " << labels_.size() << " elements";
            throw FrameMismatchError(msg.str());
        }
    }

    friend bool operator==(const Frame&, const Frame&) = default;

  private:
    std::vector<std::string> labels_;
};

}  // namespace bft
