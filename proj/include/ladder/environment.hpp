#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/rng.hpp"
#include "ladder/transfer_matrix.hpp"
#include "ladder/types.hpp"

namespace ladder {

// One dead end hanging off the cluster: piece [a,b) with the vertical open at
// a, all horizontals open on (a,b], and a single open exit horizontal into
// column b+1 at exit_level. The dangling line sits on level 1 - exit_level.
struct TrapPiece {
    int64_t a = 0;
    int64_t b = 0;
    int exit_level = 0;

    int64_t length() const { return b - a; }
    Vertex entrance() const { return {a, 1 - exit_level}; }
    Vertex end() const { return {b + 1, exit_level}; }

    friend bool operator==(const TrapPiece&, const TrapPiece&) = default;
};

// Per-column vertex annotation bits (y = 0 and y = 1 variants).
inline constexpr uint8_t kFlagCluster0 = 1;
inline constexpr uint8_t kFlagCluster1 = 2;
inline constexpr uint8_t kFlagBackbone0 = 4;
inline constexpr uint8_t kFlagBackbone1 = 8;
inline constexpr uint8_t kFlagTrap0 = 16;
inline constexpr uint8_t kFlagTrap1 = 32;

// A finite window of the environment: slabs for columns x_min+1..x_max, the
// t-state per column, and derived annotations. Immutable after construction
// (samplers fill it once and call annotate()).
class LadderConfig {
public:
    int64_t x_min = 0;
    int64_t x_max = 0;
    std::vector<Slab> slabs;      // column x_min+1 .. x_max
    std::vector<TState> t_states; // column x_min .. x_max

    // Annotations, filled by annotate().
    std::vector<int64_t> pre_regen_columns;  // sorted, within (x_min, x_max)
    std::vector<TrapPiece> traps;            // sorted by a, pairwise disjoint
    std::vector<uint8_t> vertex_flags;       // per column

    int64_t n_columns() const { return x_max - x_min + 1; }

    Slab slab_at(int64_t col) const { return slabs[static_cast<size_t>(col - x_min - 1)]; }
    TState t_state_at(int64_t col) const { return t_states[static_cast<size_t>(col - x_min)]; }
    uint8_t flags_at(int64_t col) const { return vertex_flags[static_cast<size_t>(col - x_min)]; }

    bool in_window(Vertex v) const { return v.x >= x_min && v.x <= x_max && (v.y == 0 || v.y == 1); }

    bool on_cluster(Vertex v) const {
        return flags_at(v.x) & (v.y == 0 ? kFlagCluster0 : kFlagCluster1);
    }
    bool on_backbone(Vertex v) const {
        return flags_at(v.x) & (v.y == 0 ? kFlagBackbone0 : kFlagBackbone1);
    }
    bool in_trap(Vertex v) const { return flags_at(v.x) & (v.y == 0 ? kFlagTrap0 : kFlagTrap1); }

    bool is_pre_regen_column(int64_t col) const {
        if (col <= x_min || col >= x_max) return false;
        const Slab here = slab_at(col), next = slab_at(col + 1);
        return !slab_h1(here) && !slab_v(here) && !slab_h1(next);
    }

    // Open incident edges of v, as used by the walk kernel. Requires
    // x_min < x(v) < x_max so that both adjacent slabs exist.
    bool right_open(Vertex v) const { return slab_at(v.x + 1) & (v.y ? kSlabH1 : kSlabH0); }
    bool left_open(Vertex v) const { return slab_at(v.x) & (v.y ? kSlabH1 : kSlabH0); }
    bool vertical_open(Vertex v) const { return slab_v(slab_at(v.x)); }

    // Shift all coordinates by delta (annotations included).
    void shift(int64_t delta);
};

// Recomputes every annotation from the raw slabs: pre-regeneration columns,
// trap pieces (conditions checked literally), cluster membership (reachable
// from a backwards-communicating vertex inside the window) and the backbone
// mask (cluster minus dead ends, via the forwards-communication recursion
// seeded with an all-open right boundary). Near window edges the marks are
// necessarily window-relative; interior statistics should keep a margin, and
// windows that end at pre-regeneration columns are exact everywhere.
void annotate(LadderConfig& config);

// Throws std::logic_error when a structural invariant fails (t-state closure,
// no dead states, pre-regeneration patterns, trap geometry).
void validate(const LadderConfig& config);

// --- samplers ---------------------------------------------------------------

// Stationary conditioned chain on n_columns columns, columns 0..n_columns-1.
LadderConfig sample_environment_chain(const TransferMatrix& tm, int64_t n_columns, Rng& rng);

struct RejectionStats {
    uint64_t attempts = 0;
    uint64_t accepted = 0;
    double acceptance_rate() const { return attempts ? double(accepted) / double(attempts) : 0.0; }
};

struct RejectionBudgetError : std::runtime_error {
    explicit RejectionBudgetError(const RejectionStats& s)
        : std::runtime_error("rejection sampler budget exhausted after " + std::to_string(s.attempts) +
                             " attempts (acceptance rate " + std::to_string(s.acceptance_rate()) + ")"),
          stats(s) {}
    RejectionStats stats;
};

// I.i.d. bond percolation on columns -n1..n2, accepted on the first
// configuration with an open left-right crossing.
LadderConfig sample_environment_rejection(double p, int64_t n1, int64_t n2, Rng& rng,
                                          RejectionStats* stats = nullptr,
                                          uint64_t budget = 1'000'000);

// n_cycles i.i.d. cycles starting from a pre-regeneration point at x = 0;
// the window ends at the n_cycles-th pre-regeneration column.
LadderConfig sample_cycle_stationary(const TransferMatrix& tm, int64_t n_cycles, Rng& rng);

// Cycle-stationary window extended to both sides of the pre-regeneration
// point at x = 0: whole cycles are appended until the requested spans are
// covered. This is the environment walks are run on.
LadderConfig sample_two_sided_cycle_window(const TransferMatrix& tm, int64_t min_left_span,
                                           int64_t min_right_span, Rng& rng);

} // namespace ladder
