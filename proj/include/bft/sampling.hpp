#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "bft/frame.hpp"
#include "bft/mass.hpp"

namespace bft {

/// splitmix64 finalizer; scrambles a seed into an independent stream key.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic per-stream seed derivation: trials and permutation samples
/// each get their own engine so results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ull));
}

/// Uniform double in [0, 1) built from 53 engine bits. mt19937_64 output is
/// fully specified by the standard, so draws are reproducible across
/// platforms; std::uniform_real_distribution is not and is avoided.
inline double uniform_unit(std::mt19937_64& gen) noexcept {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard exponential variate by inversion; log1p keeps u near 1 exact.
inline double exponential_unit(std::mt19937_64& gen) noexcept {
    return -std::log1p(-uniform_unit(gen));
}

/// Uniform draw from the probability simplex over all non-empty subsets of
/// the frame (flat Dirichlet: one exponential variate per subset,
/// normalized). Covers every focal configuration without bias.
inline MassFunction sample_mass_simplex(const Frame& frame, std::mt19937_64& gen) {
    const std::uint32_t theta_bits = frame.theta().bits();
    std::vector<std::pair<SubsetRef, double>> entries;
    entries.reserve(theta_bits);
    double total = 0.0;
    do {
        entries.clear();
        total = 0.0;
        for (std::uint32_t bits = 1; bits <= theta_bits; ++bits) {
            const double draw = exponential_unit(gen);
            entries.emplace_back(SubsetRef{bits}, draw);
            total += draw;
        }
    } while (total <= 0.0);
    for (auto& [subset, mass] : entries) {
        mass /= total;
    }
    return MassFunction(frame, entries);
}

/// Uniform draw from the simplex over singletons only (a random Bayesian BBA).
inline MassFunction sample_bayesian_simplex(const Frame& frame, std::mt19937_64& gen) {
    std::vector<std::pair<SubsetRef, double>> entries;
    entries.reserve(frame.size());
    double total = 0.0;
    do {
        entries.clear();
        total = 0.0;
        for (std::size_t i = 0; i < frame.size(); ++i) {
            const double draw = exponential_unit(gen);
            entries.emplace_back(frame.singleton(i), draw);
            total += draw;
        }
    } while (total <= 0.0);
    for (auto& [subset, mass] : entries) {
        mass /= total;
    }
    return MassFunction(frame, entries);
}

}  // namespace bft
