#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ladder/environment.hpp"
#include "ladder/rng.hpp"
#include "ladder/types.hpp"

namespace ladder {

// Move codes, also the 2-bit trajectory encoding.
inline constexpr int kMoveRight = 0;
inline constexpr int kMoveLeft = 1;
inline constexpr int kMoveVert = 2;
inline constexpr int kMoveStay = 3;

inline constexpr int64_t move_dx(int m) { return m == kMoveRight ? 1 : m == kMoveLeft ? -1 : 0; }

// Precomputed kernel data for one bias: per incident-edge pattern
// (bit0 right open, bit1 left open, bit2 vertical open), the move
// probabilities, log-probabilities and the first two log-derivatives.
// Z = e^l + 1 + e^{-l} regardless of the pattern; the self-loop carries the
// residual mass (a e^l + b + c e^{-l})/Z over the closed edges.
struct KernelTable {
    double lambda = 0.0;
    double c_lambda = 0.0;  // max |nu| over all patterns and supported moves

    struct Entry {
        double cum[4];   // cumulative probabilities, move order right/left/vert/stay
        double prob[4];
        double nu[4];    // d/dl log p
        double c2[4];    // p''/p
        double logp[4];
        bool valid[4];   // prob > 0
    };
    Entry entries[kSlabPatterns];

    static KernelTable build(double lambda);
};

enum class ExitFlag : uint8_t { none = 0, left_edge = 1, right_edge = 2 };

// A walk path stored as packed 2-bit move codes; vertices are reconstructed
// on demand by replaying against the environment.
struct Trajectory {
    ModelParams params;
    Vertex start;
    uint64_t seed = 0;
    int64_t n_requested = 0;
    int64_t n_steps = 0;
    ExitFlag exit = ExitFlag::none;
    Vertex final_vertex;
    std::vector<uint8_t> moves;

    int move_at(int64_t k) const {
        return (moves[static_cast<size_t>(k >> 2)] >> ((k & 3) * 2)) & 3;
    }
};

// Explicit one-step law at a vertex: open neighbors plus the self-loop.
struct StepDistribution {
    double lambda = 0.0;
    double z = 0.0;
    struct Entry {
        Vertex target;
        double prob;
    };
    std::vector<Entry> entries;
};

StepDistribution step_distribution(const LadderConfig& config, double lambda, Vertex v);

// Runs the lazy walk for up to n_steps; stops with a flag when the window
// edge is reached. Throws std::invalid_argument if start is off the cluster.
Trajectory run_walk(const LadderConfig& config, double lambda, Vertex start, int64_t n_steps,
                    Rng& rng, uint64_t seed = 0);

// Replays a trajectory, calling f(step_index, from, to, move) per step.
template <class F>
void replay(const Trajectory& traj, F&& f) {
    Vertex v = traj.start;
    for (int64_t k = 0; k < traj.n_steps; ++k) {
        const int m = traj.move_at(k);
        Vertex w = v;
        w.x += move_dx(m);
        if (m == kMoveVert) w.y = 1 - w.y;
        f(k, v, w, m);
        v = w;
    }
}

std::vector<int64_t> x_path(const Trajectory& traj);  // X_0..X_n

// Derivative of log p at (v,w); w == v addresses the self-loop.
double nu(const LadderConfig& config, double lambda, Vertex v, Vertex w);

// (p''/p, nu^2) at (v,w).
std::pair<double, double> second_log_terms(const LadderConfig& config, double lambda, Vertex v,
                                           Vertex w);

// M_0..M_n along the trajectory (cumulative nu at the trajectory's bias).
std::vector<double> martingale_path(const LadderConfig& config, const Trajectory& traj);

// Radon-Nikodym log-density between biases along a fixed trajectory,
// decomposed into linear, quadratic and remainder terms:
// log_ratio = linear - (l - l*)^2 * quadratic_a + remainder.
struct TaylorTerms {
    double linear = 0.0;
    double quadratic_a = 0.0;
    double remainder = 0.0;
};

struct DensityRatio {
    double lambda_star = 0.0;
    double lambda = 0.0;
    double log_ratio = 0.0;
    TaylorTerms taylor;
};

DensityRatio density_ratio(const LadderConfig& config, const Trajectory& traj, double lambda_star,
                           double lambda);

// Agile walk (self-loops removed), backbone walk (trap excursions removed),
// and the lazy-time split between backbone and trap vertices.
struct WalkProjections {
    std::vector<Vertex> agile;
    std::vector<Vertex> backbone_walk;
    int64_t time_on_backbone = 0;
    int64_t time_in_traps = 0;
};

WalkProjections agile_and_backbone_projections(const Trajectory& traj, const LadderConfig& config);

// Lazy time spent inside each annotated trap (indexed like config.traps).
std::vector<int64_t> trap_sojourn_times(const Trajectory& traj, const LadderConfig& config);

} // namespace ladder
