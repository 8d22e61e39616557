#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "antcolony/grid.hpp"
#include "antcolony/pheromone.hpp"

namespace antcolony {

/// Compass headings in the fixed cumulative sampling order.
enum class Direction : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::size_t kDirections = 8;

inline constexpr std::array<Direction, kDirections> kAllDirections{
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

/// Unit cell offset; y grows downwards (row 0 is the top row).
inline constexpr TorusCoord offset(Direction d) noexcept {
    constexpr std::array<TorusCoord, kDirections> table{{
        {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};
    return table[static_cast<std::size_t>(d)];
}

inline constexpr Direction opposite(Direction d) noexcept {
    return static_cast<Direction>((static_cast<unsigned>(d) + 4) % kDirections);
}

/// Number of 45 degree steps between two headings, 0..4.
inline constexpr int angular_diff(Direction a, Direction b) noexcept {
    const int d = std::abs(static_cast<int>(a) - static_cast<int>(b));
    return d <= 4 ? d : 8 - d;
}

/// Forward-bias weights indexed by turn magnitude.
inline constexpr std::array<double, 5> kTurnWeights{1.0, 1.0 / 2.0, 1.0 / 4.0, 1.0 / 12.0, 1.0 / 20.0};

inline double directional_weight(int turn) {
    if (turn < 0 || turn > 4) throw std::out_of_range("directional_weight: turn must be in [0,4]");
    return kTurnWeights[static_cast<std::size_t>(turn)];
}

struct SenseParams {
    double beta = 3.5;   // osmotropotaxic sensitivity
    double delta = 0.2;  // inverse sensory capacity
};

/// Pheromone weighing function (1 + s / (1 + delta s))^beta.
inline double weight_w(double sigma, const SenseParams& sp) noexcept {
    return std::pow(1.0 + sigma / (1.0 + sp.delta * sigma), sp.beta);
}

struct Ant {
    TorusCoord pos;
    TorusCoord prev_pos;
    Direction heading = Direction::N;

    friend bool operator==(const Ant&, const Ant&) = default;
};

using Occupancy = Grid<std::uint32_t>;

struct TransitionProbs {
    std::array<double, kDirections> p{};  // aligned with kAllDirections
    bool blocked = false;
};

/// Normalised move probabilities over the eight neighbours of `ant.pos`.
/// `weight_at(coord)` yields W(sigma) for a canonical cell. With exclusion,
/// occupied neighbours get zero weight; if none remain the ant is blocked.
template <typename WeightAt>
TransitionProbs transition_probs_with(const Ant& ant, WeightAt&& weight_at, const Occupancy& occupancy,
                                      bool exclusion) {
    const auto w = static_cast<std::int64_t>(occupancy.width());
    const auto h = static_cast<std::int64_t>(occupancy.height());
    TransitionProbs out;
    double sum = 0.0;
    for (std::size_t i = 0; i < kDirections; ++i) {
        const Direction d = kAllDirections[i];
        const TorusCoord o = offset(d);
        const TorusCoord cell = wrap({ant.pos.x + o.x, ant.pos.y + o.y}, w, h);
        if (exclusion && occupancy[cell] > 0) continue;
        const double weight = weight_at(cell) * kTurnWeights[angular_diff(ant.heading, d)];
        out.p[i] = weight;
        sum += weight;
    }
    if (!(sum > 0.0)) {
        out.p.fill(0.0);
        out.blocked = true;
        return out;
    }
    for (double& v : out.p) v /= sum;
    return out;
}

inline TransitionProbs transition_probs(const Ant& ant, const PheromoneField& field,
                                        const Occupancy& occupancy, const SenseParams& sp,
                                        bool exclusion) {
    if (field.width() != occupancy.width() || field.height() != occupancy.height()) {
        throw std::invalid_argument("transition_probs: field and occupancy dimensions differ");
    }
    return transition_probs_with(
        ant, [&](TorusCoord c) { return weight_w(field.at(c), sp); }, occupancy, exclusion);
}

/// Walks the cumulative distribution in direction order; `draw` is uniform in [0,1).
inline Direction sample_direction(const TransitionProbs& probs, double draw) noexcept {
    double cumulative = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < kDirections; ++i) {
        if (probs.p[i] <= 0.0) continue;
        last_nonzero = i;
        cumulative += probs.p[i];
        if (draw < cumulative) return kAllDirections[i];
    }
    // Rounding left the cumulative sum just below 1.
    return kAllDirections[last_nonzero];
}

/// Moves the ant one cell. A blocked ant stays put and keeps its heading.
inline Ant step_ant(const Ant& ant, const TransitionProbs& probs, double draw, std::size_t width,
                    std::size_t height) noexcept {
    Ant next = ant;
    next.prev_pos = ant.pos;
    if (probs.blocked) return next;
    const Direction d = sample_direction(probs, draw);
    const TorusCoord o = offset(d);
    next.pos = wrap({ant.pos.x + o.x, ant.pos.y + o.y}, static_cast<std::int64_t>(width),
                    static_cast<std::int64_t>(height));
    next.heading = d;
    return next;
}

}  // namespace antcolony
