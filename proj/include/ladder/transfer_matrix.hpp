#pragma once

#include <array>
#include <cstdint>

#include "ladder/rng.hpp"
#include "ladder/types.hpp"

namespace ladder {

// Indexing for the three surviving t-states {01, 10, 11}: index = code - 1.
inline constexpr int tstate_index(TState t) { return static_cast<int>(t) - 1; }
inline constexpr TState tstate_from_index(int i) { return static_cast<TState>(i + 1); }
inline constexpr int kNumAlive = 3;

// Conditional slab distribution attached to one (ab -> cd) transition:
// supported exactly on the ab-cd-compatible patterns, with mass proportional
// to p^{#open} (1-p)^{#closed}.
struct SlabLaw {
    std::array<double, kSlabPatterns> prob{};
};

// The conditioned 3-state chain of backwards-communicating patterns, derived
// from the absorbing 4-state slab-weight matrix by a Doob h-transform:
// P_cond(ab,cd) = Q(ab,cd) h(cd) / (perron_value * h(ab)).
class TransferMatrix {
public:
    double p = 0.0;
    std::array<std::array<double, 4>, 4> q{};                   // over {00,01,10,11}
    std::array<std::array<double, kNumAlive>, kNumAlive> p_cond{};
    std::array<double, kNumAlive> pi{};
    std::array<double, kNumAlive> h{};                          // right Perron vector
    double perron_value = 0.0;
    std::array<std::array<SlabLaw, kNumAlive>, kNumAlive> slab_laws{};

    // --- sampling -----------------------------------------------------------

    TState sample_initial_state(Rng& rng) const {
        const double u = rng.next_double();
        double acc = 0.0;
        for (int i = 0; i < kNumAlive - 1; ++i) {
            acc += pi[i];
            if (u < acc) return tstate_from_index(i);
        }
        return tstate_from_index(kNumAlive - 1);
    }

    // One step of the conditioned chain: draws (slab at column i, t-state at
    // column i) given the t-state at column i-1.
    struct Step {
        Slab slab;
        TState state;
    };

    Step sample_step(TState from, Rng& rng) const {
        return sample_from_row(joint_[tstate_index(from)], rng);
    }

    // Same, conditioned on the slab having h0 open and h1 closed -- the law of
    // the first slab of a cycle, immediately right of a pre-regeneration point.
    Step sample_cycle_start_step(Rng& rng) const { return sample_from_row(cycle_start_, rng); }

    // --- derived quantities -------------------------------------------------

    // P(next slab is (h0 open, h1 open, v closed) and the state stays 11 | state 11).
    // Equals exp(-2 lambda_c) for every p; the acceptance suite checks this.
    double trap_persistence_factor() const;

    // P(exactly one horizontal open, other horizontal and vertical closed at
    // the next column | state 11) -- the constant in front of the geometric
    // trap-length law, exposed as a derived quantity only.
    double single_exit_prob() const;

    // Stationary probability that a fixed column is a pre-regeneration point.
    double pre_regen_density() const;

private:
    friend TransferMatrix build_transfer_matrix(double p);

    // Joint cumulative tables: P(slab = eta | from) = w(eta) h(update(from,eta))
    // / (perron_value * h(from)), zero for patterns that would kill the chain.
    struct JointRow {
        std::array<double, kSlabPatterns> cum{};
        std::array<uint8_t, kSlabPatterns> next{};  // t-state code per pattern
    };

    static Step sample_from_row(const JointRow& row, Rng& rng) {
        const double u = rng.next_double();
        int k = 0;
        while (k + 1 < kSlabPatterns && u >= row.cum[k]) ++k;
        return Step{static_cast<Slab>(k), static_cast<TState>(row.next[k])};
    }

    std::array<JointRow, kNumAlive> joint_{};
    JointRow cycle_start_{};
};

// Builds Q from the slab-update truth table, solves the Perron eigenproblem by
// power iteration (1e-14 relative tolerance), and assembles the conditioned
// chain and per-transition slab laws. Throws std::runtime_error if the
// iteration fails to converge (cannot happen for p in (0,1)).
TransferMatrix build_transfer_matrix(double p);

// P(trap length = m) = (e^{2 lambda_c} - 1) e^{-2 lambda_c m}, m >= 1.
double trap_length_pmf(double p, int m);

} // namespace ladder
