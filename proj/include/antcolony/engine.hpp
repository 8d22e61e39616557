#pragma once

// Simulation scheduler.
//
// One tick:
//   1. draw a fresh random permutation of ant indices;
//   2. move every ant in that order, sensing the field left by the previous
//      tick and the live occupancy grid;
//   3. every ant deposits eta + p * heterogeneity at its new cell (roster order);
//   4. the whole field evaporates at rate k.
//
// RNG consumption is fixed: init draws ant cells (all ants) then headings (all
// ants); each tick draws the permutation, then one uniform per ant that is not
// blocked, in permutation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "antcolony/colony.hpp"
#include "antcolony/habitat.hpp"
#include "antcolony/metrics.hpp"
#include "antcolony/pheromone.hpp"
#include "antcolony/random.hpp"

namespace antcolony {

/// Which two windows an ant compares when it deposits.
enum class WindowPairing {
    Previous,  // window at the new cell vs window at the cell it came from
    Flat,      // window at the new cell vs a flat window of its rounded mean
};

inline WindowPairing parse_pairing(std::string_view name) {
    if (name == "prev" || name == "previous") return WindowPairing::Previous;
    if (name == "flat") return WindowPairing::Flat;
    throw std::invalid_argument("unknown window pairing '" + std::string(name) +
                                "' (expected prev or flat)");
}

inline std::string_view pairing_name(WindowPairing p) noexcept {
    return p == WindowPairing::Flat ? "flat" : "prev";
}

struct Params {
    double eta = 0.07;     // base deposition per ant per step
    double k = 0.015;      // evaporation rate
    double beta = 3.5;
    double delta = 0.2;
    double p = 1.5;        // heterogeneity gain
    MetricWeights weights;
    double density = 0.3;  // ants per cell
    Metric metric = Metric::Statistical;
    WindowPairing pairing = WindowPairing::Previous;
    bool exclusion = true;
    std::uint64_t seed = 1;

    SenseParams sense() const noexcept { return {beta, delta}; }

    void validate() const {
        auto fail = [](const std::string& m) { throw std::invalid_argument("params: " + m); };
        if (!(eta >= 0.0) || !std::isfinite(eta)) fail("eta must be finite and >= 0");
        if (!(k >= 0.0 && k < 1.0)) fail("k must lie in [0, 1)");
        if (!std::isfinite(beta)) fail("beta must be finite");
        if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be finite and >= 0");
        if (!(p >= 0.0) || !std::isfinite(p)) fail("p must be finite and >= 0");
        if (!(density > 0.0 && density <= 1.0)) fail("density must lie in (0, 1]");
    }

    friend bool operator==(const Params&, const Params&) = default;
};

inline std::size_t colony_size(const Params& prm, std::size_t cells) {
    return static_cast<std::size_t>(std::llround(prm.density * static_cast<double>(cells)));
}

struct SimState {
    Habitat habitat;
    PheromoneField field;
    std::vector<Ant> ants;
    Occupancy occupancy;
    std::uint64_t t = 0;
    Rng rng;

    // Scratch buffers, rebuilt every tick.
    std::vector<std::size_t> order;
    Grid<double> weights;
};

inline Occupancy rebuild_occupancy(std::span<const Ant> ants, std::size_t width, std::size_t height) {
    Occupancy occ(width, height, 0);
    for (const Ant& a : ants) ++occ[a.pos];
    return occ;
}

/// Colony on an empty field, placed at random cells (distinct under exclusion).
inline SimState init(Habitat habitat, const Params& prm) {
    prm.validate();
    const std::size_t cells = habitat.cell_count();
    const std::size_t n = colony_size(prm, cells);
    if (n == 0) throw std::invalid_argument("init: density yields an empty colony");
    if (prm.exclusion && n > cells) {
        throw std::invalid_argument("init: " + std::to_string(n) + " ants do not fit " +
                                    std::to_string(cells) + " cells with exclusion");
    }

    const std::size_t w = habitat.width(), h = habitat.height();
    SimState s{std::move(habitat), PheromoneField(w, h), {}, Occupancy(w, h, 0), 0, Rng(prm.seed), {}, {}};
    s.ants.resize(n);

    if (prm.exclusion) {
        // Partial Fisher-Yates over cell indices: first n slots become the sample.
        std::vector<std::size_t> pool(cells);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<std::size_t>(s.rng.below(cells - i));
            std::swap(pool[i], pool[j]);
            s.ants[i].pos = s.occupancy.coord_of(pool[i]);
        }
    } else {
        for (auto& a : s.ants) a.pos = s.occupancy.coord_of(static_cast<std::size_t>(s.rng.below(cells)));
    }
    for (auto& a : s.ants) {
        a.heading = kAllDirections[s.rng.below(kDirections)];
        a.prev_pos = a.pos;
        ++s.occupancy[a.pos];
    }
    s.order.resize(n);
    s.weights = Grid<double>(w, h, 1.0);
    return s;
}

/// Heterogeneity an ant perceives after its move.
inline double perceived_heterogeneity(const Habitat& habitat, const Ant& ant, const Params& prm) {
    const Window9 here = habitat.window_at(ant.pos);
    Window9 other;
    if (prm.pairing == WindowPairing::Previous) {
        other = habitat.window_at(ant.prev_pos);
    } else {
        unsigned sum = 0;
        for (auto v : here) sum += v;
        other.fill(static_cast<std::uint8_t>((sum + 4) / 9));
    }
    return heterogeneity(here, other, prm.metric, prm.weights).value;
}

struct TickStats {
    double deposited = 0.0;  // sum of T over all ants
    std::size_t blocked = 0;
};

inline TickStats tick(SimState& s, const Params& prm) {
    const std::size_t w = s.field.width(), h = s.field.height();
    TickStats stats;

    std::iota(s.order.begin(), s.order.end(), std::size_t{0});
    s.rng.shuffle(std::span<std::size_t>(s.order));

    // The field is constant during the move phase, so W is evaluated once per cell.
    const SenseParams sp = prm.sense();
    for (std::size_t i = 0; i < s.weights.size(); ++i) s.weights[i] = weight_w(s.field[i], sp);

    for (std::size_t idx : s.order) {
        Ant& ant = s.ants[idx];
        const TransitionProbs probs = transition_probs_with(
            ant, [&](TorusCoord c) { return s.weights[c]; }, s.occupancy, prm.exclusion);
        const double draw = probs.blocked ? 0.0 : s.rng.uniform();
        const Ant moved = step_ant(ant, probs, draw, w, h);
        if (probs.blocked) ++stats.blocked;
        --s.occupancy[ant.pos];
        ++s.occupancy[moved.pos];
        ant = moved;
    }

    for (const Ant& ant : s.ants) {
        double amount = prm.eta;
        if (prm.p != 0.0) amount += prm.p * perceived_heterogeneity(s.habitat, ant, prm);
        s.field.deposit(ant.pos, amount);
        stats.deposited += amount;
    }

    s.field.evaporate(prm.k);
    ++s.t;
    return stats;
}

inline void swap_habitat(SimState& s, Habitat h) {
    if (h.width() != s.habitat.width() || h.height() != s.habitat.height()) {
        throw std::invalid_argument("swap_habitat: replacement is " + std::to_string(h.width()) + "x" +
                                    std::to_string(h.height()) + ", lattice is " +
                                    std::to_string(s.habitat.width()) + "x" +
                                    std::to_string(s.habitat.height()));
    }
    s.habitat = std::move(h);
}

/// Gini coefficient of cell concentrations; 0 for an all-zero field.
inline double field_gini(const PheromoneField& f) {
    std::vector<double> v(f.cells().begin(), f.cells().end());
    std::ranges::sort(v);
    const double n = static_cast<double>(v.size());
    double total = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        total += v[i];
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * v[i];
    }
    if (!(total > 0.0)) return 0.0;
    return weighted / (n * total);
}

struct RunSchedule {
    std::uint64_t total_steps = 0;
    std::vector<std::uint64_t> snapshot_steps;             // ascending; 0 = initial field
    std::vector<std::pair<std::uint64_t, Habitat>> swaps;  // applied before the tick of that step

    void validate(const Habitat& lattice) const {
        if (!std::ranges::is_sorted(snapshot_steps) ||
            std::ranges::adjacent_find(snapshot_steps) != snapshot_steps.end()) {
            throw std::invalid_argument("schedule: snapshot steps must be strictly ascending");
        }
        if (!snapshot_steps.empty() && snapshot_steps.back() > total_steps) {
            throw std::invalid_argument("schedule: snapshot step beyond total steps");
        }
        for (const auto& [step, hab] : swaps) {
            if (step < 1 || step > total_steps) {
                throw std::invalid_argument("schedule: swap step " + std::to_string(step) +
                                            " outside [1, total steps]");
            }
            if (hab.width() != lattice.width() || hab.height() != lattice.height()) {
                throw std::invalid_argument("schedule: swap habitat dimensions differ from lattice");
            }
        }
    }
};

struct ReportRow {
    std::uint64_t step = 0;
    double total_pheromone = 0.0;
    double gini = 0.0;
    double max_sigma = 0.0;
    double deposited = 0.0;  // not serialised; kept for mass-balance checks
    std::size_t blocked = 0;
};

struct RunReport {
    std::vector<ReportRow> rows;

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        out << "step,total_pheromone,gini,max_sigma\n";
        for (const auto& r : rows) {
            out << r.step << ',' << r.total_pheromone << ',' << r.gini << ',' << r.max_sigma << '\n';
        }
        return out.str();
    }
};

/// Receives (step, 8-bit snapshot, field) for each scheduled snapshot step.
using SnapshotSink = std::function<void(std::uint64_t, const Gray8&, const PheromoneField&)>;

inline RunReport run(SimState& s, const Params& prm, const RunSchedule& sched, const SnapshotSink& sink) {
    sched.validate(s.habitat);
    RunReport report;
    report.rows.reserve(sched.total_steps);

    auto snap = sched.snapshot_steps.begin();
    auto emit_due = [&](std::uint64_t step) {
        while (snap != sched.snapshot_steps.end() && *snap == step) {
            if (sink) sink(step, snapshot(s.field), s.field);
            ++snap;
        }
    };
    emit_due(0);

    for (std::uint64_t step = 1; step <= sched.total_steps; ++step) {
        for (const auto& [at, hab] : sched.swaps) {
            if (at == step) swap_habitat(s, hab);
        }
        const TickStats st = tick(s, prm);
        report.rows.push_back({step, s.field.total(), field_gini(s.field), s.field.max(), st.deposited,
                               st.blocked});
        emit_due(step);
    }
    return report;
}

}  // namespace antcolony
