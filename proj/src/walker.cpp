#include "ladder/walker.hpp"

#include <cmath>
#include <stdexcept>

namespace ladder {

KernelTable KernelTable::build(double lambda) {
    KernelTable t;
    t.lambda = lambda;
    const double el = std::exp(lambda), eml = std::exp(-lambda);
    const double z = el + 1.0 + eml;
    const double zp = el - eml;   // Z'
    const double zpp = el + eml;  // Z''
    const double log_z = std::log(z);

    for (int pat = 0; pat < kSlabPatterns; ++pat) {
        const bool r = pat & 1, l = pat & 2, v = pat & 4;
        auto& e = t.entries[pat];
        const double pr = r ? el / z : 0.0;
        const double pl = l ? eml / z : 0.0;
        const double pv = v ? 1.0 / z : 0.0;
        // Residual numerator over the closed edges.
        const double nn = (r ? 0.0 : el) + (v ? 0.0 : 1.0) + (l ? 0.0 : eml);
        const double np = (r ? 0.0 : el) - (l ? 0.0 : eml);
        const double npp = (r ? 0.0 : el) + (l ? 0.0 : eml);
        const double ps = nn / z;

        const double probs[4] = {pr, pl, pv, ps};
        // N'/N and N''/N per move.
        const double n1[4] = {1.0, -1.0, 0.0, nn > 0.0 ? np / nn : 0.0};
        const double n2[4] = {1.0, 1.0, 0.0, nn > 0.0 ? npp / nn : 0.0};
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) {
            e.prob[m] = probs[m];
            e.valid[m] = probs[m] > 0.0;
            acc += probs[m];
            e.cum[m] = acc;
            const double nu_m = n1[m] - zp / z;
            e.nu[m] = nu_m;
            e.c2[m] = n2[m] - zpp / z - 2.0 * (zp / z) * nu_m;
            e.logp[m] = e.valid[m] ? std::log(probs[m]) : 0.0;
            if (e.valid[m]) t.c_lambda = std::max(t.c_lambda, std::abs(nu_m));
        }
        e.cum[3] = 1.0;  // exact top end for the sampling scan
    }
    return t;
}

namespace {

int incident_pattern(const LadderConfig& c, Vertex v) {
    int pat = 0;
    if (c.right_open(v)) pat |= 1;
    if (c.left_open(v)) pat |= 2;
    if (c.vertical_open(v)) pat |= 4;
    return pat;
}

int move_between(Vertex v, Vertex w) {
    if (w.x == v.x && w.y == v.y) return kMoveStay;
    if (w.x == v.x + 1 && w.y == v.y) return kMoveRight;
    if (w.x == v.x - 1 && w.y == v.y) return kMoveLeft;
    if (w.x == v.x && w.y == 1 - v.y) return kMoveVert;
    throw std::invalid_argument("vertices are not equal or adjacent");
}

void require_interior(const LadderConfig& c, Vertex v) {
    if (!c.in_window(v) || v.x <= c.x_min || v.x >= c.x_max)
        throw std::out_of_range("vertex outside the usable window interior");
}

} // namespace

StepDistribution step_distribution(const LadderConfig& config, double lambda, Vertex v) {
    require_interior(config, v);
    const KernelTable t = KernelTable::build(lambda);
    const auto& e = t.entries[incident_pattern(config, v)];
    StepDistribution d;
    d.lambda = lambda;
    d.z = std::exp(lambda) + 1.0 + std::exp(-lambda);
    for (int m = 0; m < 3; ++m) {
        if (!e.valid[m]) continue;
        Vertex w = v;
        w.x += move_dx(m);
        if (m == kMoveVert) w.y = 1 - w.y;
        d.entries.push_back({w, e.prob[m]});
    }
    d.entries.push_back({v, e.prob[kMoveStay]});
    return d;
}

Trajectory run_walk(const LadderConfig& config, double lambda, Vertex start, int64_t n_steps,
                    Rng& rng, uint64_t seed) {
    if (!config.in_window(start) || !config.on_cluster(start))
        throw std::invalid_argument("run_walk: start vertex not on the open cluster");
    const KernelTable table = KernelTable::build(lambda);

    Trajectory traj;
    traj.params = ModelParams{};  // p unknown to the walker; bias recorded below
    traj.params.lambda = lambda;
    traj.start = start;
    traj.seed = seed;
    traj.n_requested = n_steps;
    traj.moves.assign(static_cast<size_t>((n_steps + 3) / 4), 0);

    Vertex v = start;
    int64_t k = 0;
    for (; k < n_steps; ++k) {
        if (v.x <= config.x_min) {
            traj.exit = ExitFlag::left_edge;
            break;
        }
        if (v.x >= config.x_max) {
            traj.exit = ExitFlag::right_edge;
            break;
        }
        const auto& e = table.entries[incident_pattern(config, v)];
        const double u = rng.next_double();
        int m = kMoveStay;
        if (u < e.cum[0]) m = kMoveRight;
        else if (u < e.cum[1]) m = kMoveLeft;
        else if (u < e.cum[2]) m = kMoveVert;
        traj.moves[static_cast<size_t>(k >> 2)] |= static_cast<uint8_t>(m << ((k & 3) * 2));
        v.x += move_dx(m);
        if (m == kMoveVert) v.y = 1 - v.y;
    }
    traj.n_steps = k;
    traj.moves.resize(static_cast<size_t>((k + 3) / 4));
    traj.final_vertex = v;
    return traj;
}

std::vector<int64_t> x_path(const Trajectory& traj) {
    std::vector<int64_t> xs;
    xs.reserve(static_cast<size_t>(traj.n_steps) + 1);
    int64_t x = traj.start.x;
    xs.push_back(x);
    for (int64_t k = 0; k < traj.n_steps; ++k) {
        x += move_dx(traj.move_at(k));
        xs.push_back(x);
    }
    return xs;
}

double nu(const LadderConfig& config, double lambda, Vertex v, Vertex w) {
    require_interior(config, v);
    const KernelTable t = KernelTable::build(lambda);
    const auto& e = t.entries[incident_pattern(config, v)];
    const int m = move_between(v, w);
    if (!e.valid[m]) throw std::invalid_argument("nu: zero-probability transition");
    return e.nu[m];
}

std::pair<double, double> second_log_terms(const LadderConfig& config, double lambda, Vertex v,
                                           Vertex w) {
    require_interior(config, v);
    const KernelTable t = KernelTable::build(lambda);
    const auto& e = t.entries[incident_pattern(config, v)];
    const int m = move_between(v, w);
    if (!e.valid[m]) throw std::invalid_argument("second_log_terms: zero-probability transition");
    return {e.c2[m], e.nu[m] * e.nu[m]};
}

std::vector<double> martingale_path(const LadderConfig& config, const Trajectory& traj) {
    const KernelTable t = KernelTable::build(traj.params.lambda);
    std::vector<double> ms;
    ms.reserve(static_cast<size_t>(traj.n_steps) + 1);
    double m_acc = 0.0;
    ms.push_back(0.0);
    replay(traj, [&](int64_t, Vertex from, Vertex, int move) {
        m_acc += t.entries[incident_pattern(config, from)].nu[move];
        ms.push_back(m_acc);
    });
    return ms;
}

DensityRatio density_ratio(const LadderConfig& config, const Trajectory& traj, double lambda_star,
                           double lambda) {
    const KernelTable ts = KernelTable::build(lambda_star);
    const KernelTable tl = KernelTable::build(lambda);
    const double dl = lambda - lambda_star;

    double log_ratio = 0.0, m_star = 0.0, a_term = 0.0, remainder = 0.0;
    replay(traj, [&](int64_t, Vertex from, Vertex, int move) {
        const auto& es = ts.entries[incident_pattern(config, from)];
        const auto& el = tl.entries[incident_pattern(config, from)];
        const double step_lr = el.logp[move] - es.logp[move];
        const double nu_s = es.nu[move];
        const double half_sq = 0.5 * (nu_s * nu_s - es.c2[move]);
        log_ratio += step_lr;
        m_star += nu_s;
        a_term += half_sq;
        remainder += step_lr - dl * nu_s + dl * dl * half_sq;
    });

    DensityRatio out;
    out.lambda_star = lambda_star;
    out.lambda = lambda;
    out.log_ratio = log_ratio;
    out.taylor.linear = dl * m_star;
    out.taylor.quadratic_a = a_term;
    out.taylor.remainder = remainder;
    return out;
}

WalkProjections agile_and_backbone_projections(const Trajectory& traj, const LadderConfig& config) {
    WalkProjections out;
    out.agile.push_back(traj.start);
    replay(traj, [&](int64_t, Vertex from, Vertex to, int move) {
        if (config.on_backbone(from)) ++out.time_on_backbone;
        else ++out.time_in_traps;
        if (move != kMoveStay) out.agile.push_back(to);
    });
    for (const Vertex& v : out.agile) {
        if (!config.on_backbone(v)) continue;
        if (!out.backbone_walk.empty() && out.backbone_walk.back() == v) continue;
        out.backbone_walk.push_back(v);
    }
    return out;
}

std::vector<int64_t> trap_sojourn_times(const Trajectory& traj, const LadderConfig& config) {
    std::vector<int64_t> sojourn(config.traps.size(), 0);
    // Column -> trap index for interior columns (interiors are disjoint).
    std::vector<int32_t> trap_of_col(static_cast<size_t>(config.n_columns()), -1);
    for (size_t i = 0; i < config.traps.size(); ++i)
        for (int64_t col = config.traps[i].a + 1; col <= config.traps[i].b; ++col)
            trap_of_col[static_cast<size_t>(col - config.x_min)] = static_cast<int32_t>(i);

    replay(traj, [&](int64_t, Vertex from, Vertex, int) {
        if (!config.in_trap(from)) return;
        const int32_t id = trap_of_col[static_cast<size_t>(from.x - config.x_min)];
        if (id >= 0) ++sojourn[static_cast<size_t>(id)];
    });
    return sojourn;
}

} // namespace ladder
