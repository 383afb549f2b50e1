#include "ladder/environment.hpp"

#include <algorithm>
#include <deque>

namespace ladder {

void LadderConfig::shift(int64_t delta) {
    x_min += delta;
    x_max += delta;
    for (auto& c : pre_regen_columns) c += delta;
    for (auto& t : traps) {
        t.a += delta;
        t.b += delta;
    }
}

namespace {

void annotate_pre_regen(LadderConfig& c) {
    c.pre_regen_columns.clear();
    for (int64_t i = c.x_min + 1; i < c.x_max; ++i)
        if (c.is_pre_regen_column(i)) c.pre_regen_columns.push_back(i);
}

void annotate_traps(LadderConfig& c) {
    c.traps.clear();
    for (int64_t a = c.x_min + 1; a < c.x_max; ++a) {
        if (!slab_v(c.slab_at(a))) continue;
        int64_t j = a + 1;
        while (j <= c.x_max && c.slab_at(j) == (kSlabH0 | kSlabH1)) ++j;
        if (j == a + 1 || j > c.x_max) continue;  // no run, or run hits the window edge
        const Slab brk = c.slab_at(j);
        const bool h0 = slab_h0(brk), h1 = slab_h1(brk);
        if (h0 == h1) continue;  // zero or two exits
        c.traps.push_back(TrapPiece{a, j - 1, h0 ? 0 : 1});
    }
}

void annotate_cluster(LadderConfig& c) {
    const auto n = static_cast<size_t>(c.n_columns());
    // Seed with backwards-communicating vertices, then flood over open edges.
    std::vector<uint8_t> seen(2 * n, 0);
    std::deque<size_t> queue;
    for (size_t i = 0; i < n; ++i) {
        const TState t = c.t_states[i];
        if (tstate_bottom(t)) {
            seen[2 * i] = 1;
            queue.push_back(2 * i);
        }
        if (tstate_top(t)) {
            seen[2 * i + 1] = 1;
            queue.push_back(2 * i + 1);
        }
    }
    while (!queue.empty()) {
        const size_t id = queue.front();
        queue.pop_front();
        const size_t col = id / 2;
        const int y = static_cast<int>(id % 2);
        const Slab here = col > 0 ? c.slabs[col - 1] : 0;
        const Slab next = col + 1 < n ? c.slabs[col] : 0;
        const auto push = [&](size_t nid) {
            if (!seen[nid]) {
                seen[nid] = 1;
                queue.push_back(nid);
            }
        };
        if (col > 0 && (here & (y ? kSlabH1 : kSlabH0))) push(id - 2);
        if (col + 1 < n && (next & (y ? kSlabH1 : kSlabH0))) push(id + 2);
        if (col > 0 && slab_v(here)) push(y ? id - 1 : id + 1);
    }
    for (size_t i = 0; i < n; ++i) {
        if (seen[2 * i]) c.vertex_flags[i] |= kFlagCluster0;
        if (seen[2 * i + 1]) c.vertex_flags[i] |= kFlagCluster1;
    }
}

void annotate_backbone(LadderConfig& c) {
    const auto n = static_cast<size_t>(c.n_columns());
    // Forwards communication, right-to-left. The right boundary column is
    // marked communicating by convention; interior marks are exact once the
    // window ends at a pre-regeneration column.
    bool f0 = true, f1 = true;
    if (c.vertex_flags[n - 1] & kFlagCluster0) c.vertex_flags[n - 1] |= kFlagBackbone0;
    if (c.vertex_flags[n - 1] & kFlagCluster1) c.vertex_flags[n - 1] |= kFlagBackbone1;
    for (size_t i = n - 1; i-- > 0;) {
        const Slab next = c.slabs[i];  // slab at column x_min+1+i connects i and i+1
        const bool v_here = i > 0 && slab_v(c.slabs[i - 1]);
        const bool n0 = (slab_h0(next) && f0) || (v_here && slab_h1(next) && f1);
        const bool n1 = (slab_h1(next) && f1) || (v_here && slab_h0(next) && f0);
        f0 = n0;
        f1 = n1;
        if (f0 && (c.vertex_flags[i] & kFlagCluster0)) c.vertex_flags[i] |= kFlagBackbone0;
        if (f1 && (c.vertex_flags[i] & kFlagCluster1)) c.vertex_flags[i] |= kFlagBackbone1;
    }
    for (const auto& t : c.traps) {
        const uint8_t bit = t.exit_level == 0 ? kFlagTrap1 : kFlagTrap0;
        for (int64_t col = t.a + 1; col <= t.b; ++col)
            c.vertex_flags[static_cast<size_t>(col - c.x_min)] |= bit;
    }
}

} // namespace

void annotate(LadderConfig& c) {
    c.vertex_flags.assign(static_cast<size_t>(c.n_columns()), 0);
    annotate_pre_regen(c);
    annotate_traps(c);
    annotate_cluster(c);
    annotate_backbone(c);
}

void validate(const LadderConfig& c) {
    if (c.x_max < c.x_min) throw std::logic_error("config: empty window");
    if (c.slabs.size() != static_cast<size_t>(c.x_max - c.x_min))
        throw std::logic_error("config: slab count mismatch");
    if (c.t_states.size() != c.slabs.size() + 1)
        throw std::logic_error("config: t-state count mismatch");
    for (size_t i = 0; i < c.t_states.size(); ++i) {
        if (c.t_states[i] == TState::dead) throw std::logic_error("config: dead t-state");
        if (i > 0 && slab_update(c.t_states[i - 1], c.slabs[i - 1]) != c.t_states[i])
            throw std::logic_error("config: t-state closure violated");
    }
    for (int64_t col : c.pre_regen_columns) {
        if (!c.is_pre_regen_column(col)) throw std::logic_error("config: bad pre-regeneration mark");
        if (!(c.flags_at(col) & kFlagCluster0)) throw std::logic_error("config: pre-regeneration off cluster");
    }
    for (size_t k = 0; k < c.traps.size(); ++k) {
        const auto& t = c.traps[k];
        if (t.length() < 1) throw std::logic_error("config: trap length < 1");
        if (k > 0 && c.traps[k - 1].b >= t.a) throw std::logic_error("config: overlapping traps");
        if (!slab_v(c.slab_at(t.a))) throw std::logic_error("config: trap entrance vertical closed");
        for (int64_t j = t.a + 1; j <= t.b; ++j)
            if (c.slab_at(j) != (kSlabH0 | kSlabH1)) throw std::logic_error("config: trap interior pattern");
        const Slab exit = c.slab_at(t.b + 1);
        if (slab_h0(exit) == slab_h1(exit)) throw std::logic_error("config: trap exit pattern");
        if ((t.exit_level == 0) != slab_h0(exit)) throw std::logic_error("config: trap exit level");
    }
}

LadderConfig sample_environment_chain(const TransferMatrix& tm, int64_t n_columns, Rng& rng) {
    if (n_columns < 1) throw std::domain_error("sample_environment_chain: n_columns must be >= 1");
    LadderConfig c;
    c.x_min = 0;
    c.x_max = n_columns - 1;
    c.slabs.resize(static_cast<size_t>(n_columns - 1));
    c.t_states.resize(static_cast<size_t>(n_columns));
    TState cur = tm.sample_initial_state(rng);
    c.t_states[0] = cur;
    for (int64_t i = 1; i < n_columns; ++i) {
        const auto step = tm.sample_step(cur, rng);
        c.slabs[static_cast<size_t>(i - 1)] = step.slab;
        c.t_states[static_cast<size_t>(i)] = step.state;
        cur = step.state;
    }
    annotate(c);
    return c;
}

LadderConfig sample_environment_rejection(double p, int64_t n1, int64_t n2, Rng& rng,
                                          RejectionStats* stats, uint64_t budget) {
    if (n1 < 1 || n2 < 1) throw std::domain_error("sample_environment_rejection: n1, n2 must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("sample_environment_rejection: p in (0,1)");
    const auto n_slabs = static_cast<size_t>(n1 + n2);
    RejectionStats local;
    RejectionStats& st = stats ? *stats : local;
    std::vector<Slab> slabs(n_slabs);
    while (st.attempts < budget) {
        ++st.attempts;
        // Both boundary vertices count as crossing sources, so the window
        // recursion starts from state 11; death anywhere kills the crossing.
        TState t = TState::both;
        bool alive = true;
        for (size_t i = 0; i < n_slabs; ++i) {
            Slab s = 0;
            if (rng.next_double() < p) s |= kSlabH0;
            if (rng.next_double() < p) s |= kSlabH1;
            if (rng.next_double() < p) s |= kSlabV;
            slabs[i] = s;
            t = slab_update(t, s);
            if (t == TState::dead) {
                alive = false;
                break;
            }
        }
        if (!alive) continue;
        ++st.accepted;
        LadderConfig c;
        c.x_min = -n1;
        c.x_max = n2;
        c.slabs = slabs;
        c.t_states.resize(n_slabs + 1);
        c.t_states[0] = TState::both;
        for (size_t i = 0; i < n_slabs; ++i) c.t_states[i + 1] = slab_update(c.t_states[i], slabs[i]);
        annotate(c);
        return c;
    }
    throw RejectionBudgetError(st);
}

namespace {

// Generates whole cycles starting from a pre-regeneration column at 0 until
// at least min_cycles cycles have closed and the span reaches min_span, then
// truncates at the last cycle boundary. slabs[j-1] is the slab at column j.
void generate_cycles(const TransferMatrix& tm, Rng& rng, int64_t min_cycles, int64_t min_span,
                     std::vector<Slab>& slabs, std::vector<TState>& states) {
    slabs.clear();
    states.clear();
    states.push_back(TState::bottom_only);  // pre-regeneration column at the origin
    const auto first = tm.sample_cycle_start_step(rng);
    slabs.push_back(first.slab);
    states.push_back(first.state);
    TState cur = first.state;
    int64_t done = 0;
    size_t last_cut = 0;
    while (done < min_cycles || static_cast<int64_t>(last_cut) < min_span) {
        const auto step = tm.sample_step(cur, rng);
        const Slab prev = slabs.back();
        slabs.push_back(step.slab);
        states.push_back(step.state);
        cur = step.state;
        // Column j is covered by `prev`, column j+1 by the new slab.
        const size_t j = slabs.size() - 1;
        if (!slab_v(prev) && !slab_h1(prev) && !slab_h1(step.slab)) {
            ++done;
            last_cut = j;
        }
    }
    slabs.resize(last_cut);
    states.resize(last_cut + 1);
}

} // namespace

LadderConfig sample_cycle_stationary(const TransferMatrix& tm, int64_t n_cycles, Rng& rng) {
    if (n_cycles < 1) throw std::domain_error("sample_cycle_stationary: n_cycles must be >= 1");
    LadderConfig c;
    generate_cycles(tm, rng, n_cycles, 0, c.slabs, c.t_states);
    c.x_min = 0;
    c.x_max = static_cast<int64_t>(c.slabs.size());
    annotate(c);
    return c;
}

LadderConfig sample_two_sided_cycle_window(const TransferMatrix& tm, int64_t min_left_span,
                                           int64_t min_right_span, Rng& rng) {
    std::vector<Slab> right, left;
    std::vector<TState> scratch;
    generate_cycles(tm, rng, 1, min_right_span, right, scratch);
    generate_cycles(tm, rng, 1, min_left_span, left, scratch);
    LadderConfig c;
    c.x_min = -static_cast<int64_t>(left.size());
    c.x_max = static_cast<int64_t>(right.size());
    c.slabs = std::move(left);
    c.slabs.insert(c.slabs.end(), right.begin(), right.end());
    c.t_states.resize(c.slabs.size() + 1);
    c.t_states[0] = TState::bottom_only;
    for (size_t i = 0; i < c.slabs.size(); ++i) c.t_states[i + 1] = slab_update(c.t_states[i], c.slabs[i]);
    annotate(c);
    return c;
}

} // namespace ladder
