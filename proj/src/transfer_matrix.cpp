#include "ladder/transfer_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace ladder {

namespace {

double slab_weight(double p, Slab s) {
    const int open = slab_open_count(s);
    return std::pow(p, open) * std::pow(1.0 - p, 3 - open);
}

} // namespace

TransferMatrix build_transfer_matrix(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("build_transfer_matrix: p must be in (0,1)");

    TransferMatrix tm;
    tm.p = p;

    for (int ab = 0; ab < 4; ++ab) {
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            const int cd = static_cast<int>(slab_update(static_cast<TState>(ab), s));
            tm.q[ab][cd] += slab_weight(p, s);
        }
    }

    // Restriction to the surviving states {01,10,11}.
    double qt[kNumAlive][kNumAlive];
    for (int i = 0; i < kNumAlive; ++i)
        for (int j = 0; j < kNumAlive; ++j) qt[i][j] = tm.q[i + 1][j + 1];

    // Power iteration for the right and left Perron vectors.
    const double tol = 1e-14;
    const int max_iter = 100000;
    double h[kNumAlive] = {1.0, 1.0, 1.0};
    double u[kNumAlive] = {1.0, 1.0, 1.0};
    double rho = 0.0;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        double nh[kNumAlive] = {0, 0, 0}, nu[kNumAlive] = {0, 0, 0};
        for (int i = 0; i < kNumAlive; ++i)
            for (int j = 0; j < kNumAlive; ++j) {
                nh[i] += qt[i][j] * h[j];
                nu[j] += u[i] * qt[i][j];
            }
        double norm = 0.0;
        for (double x : nh) norm = std::max(norm, x);
        double unorm = 0.0;
        for (double x : nu) unorm = std::max(unorm, x);
        double delta = 0.0;
        for (int i = 0; i < kNumAlive; ++i) {
            nh[i] /= norm;
            nu[i] /= unorm;
            delta = std::max(delta, std::abs(nh[i] - h[i]));
            delta = std::max(delta, std::abs(nu[i] - u[i]));
            h[i] = nh[i];
            u[i] = nu[i];
        }
        delta = std::max(delta, std::abs(norm - rho) / norm);
        rho = norm;
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("build_transfer_matrix: Perron iteration did not converge");

    tm.perron_value = rho;
    for (int i = 0; i < kNumAlive; ++i) tm.h[i] = h[i];

    double pisum = 0.0;
    for (int i = 0; i < kNumAlive; ++i) {
        tm.pi[i] = u[i] * h[i];
        pisum += tm.pi[i];
    }
    for (int i = 0; i < kNumAlive; ++i) tm.pi[i] /= pisum;

    for (int i = 0; i < kNumAlive; ++i)
        for (int j = 0; j < kNumAlive; ++j) tm.p_cond[i][j] = qt[i][j] * h[j] / (rho * h[i]);

    // Per-transition slab laws: compatible patterns weighted by p^open (1-p)^closed.
    for (int i = 0; i < kNumAlive; ++i) {
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            const TState cd = slab_update(tstate_from_index(i), s);
            if (cd == TState::dead) continue;
            tm.slab_laws[i][tstate_index(cd)].prob[s] = slab_weight(p, s) / qt[i][tstate_index(cd)];
        }
    }

    // Joint cumulative sampling tables.
    for (int i = 0; i < kNumAlive; ++i) {
        auto& row = tm.joint_[i];
        double acc = 0.0;
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            const TState cd = slab_update(tstate_from_index(i), s);
            if (cd != TState::dead) acc += slab_weight(p, s) * h[tstate_index(cd)] / (rho * h[i]);
            row.cum[s] = acc;
            row.next[s] = static_cast<uint8_t>(cd);
        }
        row.cum[kSlabPatterns - 1] = 1.0;  // guard against roundoff in the scan
    }

    // Cycle-start row: t-state 10, slab restricted to h0 open, h1 closed.
    {
        auto& row = tm.cycle_start_;
        const int from = tstate_index(TState::bottom_only);
        double total = 0.0;
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            if (!slab_h0(s) || slab_h1(s)) continue;
            const TState cd = slab_update(TState::bottom_only, s);
            if (cd == TState::dead) continue;
            total += slab_weight(p, s) * h[tstate_index(cd)] / (rho * h[from]);
        }
        double acc = 0.0;
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            const TState cd = slab_update(TState::bottom_only, s);
            if (slab_h0(s) && !slab_h1(s) && cd != TState::dead)
                acc += slab_weight(p, s) * h[tstate_index(cd)] / (rho * h[from]) / total;
            row.cum[s] = acc;
            row.next[s] = static_cast<uint8_t>(cd);
        }
        row.cum[kSlabPatterns - 1] = 1.0;
    }

    return tm;
}

double TransferMatrix::trap_persistence_factor() const {
    const int both = tstate_index(TState::both);
    const Slab s = kSlabH0 | kSlabH1;  // both horizontals open, vertical closed
    return p_cond[both][both] * slab_laws[both][both].prob[s];
}

double TransferMatrix::single_exit_prob() const {
    const int both = tstate_index(TState::both);
    double total = 0.0;
    for (Slab s : {Slab{kSlabH0}, Slab{kSlabH1}}) {
        const TState cd = slab_update(TState::both, s);
        total += p_cond[both][tstate_index(cd)] * slab_laws[both][tstate_index(cd)].prob[s];
    }
    return total;
}

double TransferMatrix::pre_regen_density() const {
    // P(slab_i has h1 and v closed) forces T_i = 10; then the next slab must
    // have h1 closed as well.
    double first = 0.0;
    for (int ab = 0; ab < kNumAlive; ++ab) {
        double row = 0.0;
        for (Slab s = 0; s < kSlabPatterns; ++s) {
            if (slab_h1(s) || slab_v(s)) continue;
            const TState cd = slab_update(tstate_from_index(ab), s);
            if (cd == TState::dead) continue;
            row += p_cond[ab][tstate_index(cd)] * slab_laws[ab][tstate_index(cd)].prob[s];
        }
        first += pi[ab] * row;
    }
    double second = 0.0;
    const int from = tstate_index(TState::bottom_only);
    for (Slab s = 0; s < kSlabPatterns; ++s) {
        if (slab_h1(s)) continue;
        const TState cd = slab_update(TState::bottom_only, s);
        if (cd == TState::dead) continue;
        second += p_cond[from][tstate_index(cd)] * slab_laws[from][tstate_index(cd)].prob[s];
    }
    return first * second;
}

double trap_length_pmf(double p, int m) {
    if (m < 1) throw std::domain_error("trap_length_pmf: m must be >= 1");
    const double lc = compute_lambda_c(p);
    return (std::exp(2.0 * lc) - 1.0) * std::exp(-2.0 * lc * m);
}

} // namespace ladder
