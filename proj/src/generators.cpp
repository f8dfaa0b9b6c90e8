#include <algorithm>

#include "redcalc/regulators.hpp"
#include "redcalc/sim.hpp"

namespace redcalc {

namespace {

long to_long(const Q& v) { return v.get_num().get_si(); }

long ceil_at_least_one(const Q& v) { return std::max(1L, to_long(q_ceil(v))); }

struct Pending {
    Q time;
    Q size;
    int path;  // 0 -> P1, 1 -> P2
    Q delay;
};

Scenario assemble(std::vector<Pending> units, const TightnessParams& p) {
    std::stable_sort(units.begin(), units.end(), [](const Pending& a, const Pending& b) { return a.time < b.time; });
    Scenario s;
    s.zero_size_units = true;
    s.paths.push_back({"P1", p.d1, p.D1, false, PathAction::dropped(), {}});
    s.paths.push_back({"P2", p.d2, p.D2, false, PathAction::dropped(), {}});
    long id = 1;
    for (const auto& u : units) {
        s.units.push_back({id, "f", u.time, u.size});
        s.paths[u.path].actions[id] = PathAction::forward(u.delay);
        ++id;
    }
    s.pipeline.push_back({StageKind::PEF, Ext(0), false, {}});
    return s;
}

}  // namespace

TightnessConstants tightness_constants(const TightnessParams& p) {
    if (!(p.r > 0) || !(p.b > 0)) throw std::invalid_argument("tightness needs r > 0 and b > 0");
    if (p.d1 < 0 || p.D1 < p.d1 || p.d2 < 0 || p.D2 < p.d2) throw std::invalid_argument("invalid branch intervals");
    if (p.D2 < p.D1 || p.d2 < p.d1) throw std::invalid_argument("branches must be ordered with d1 <= d2 and D1 <= D2");
    TightnessConstants c{};
    Q br = p.b / p.r;
    c.separated = p.d2 - p.D1 >= br;
    c.chi1 = ceil_at_least_one(p.r * (p.D1 - p.d1) / p.b);
    if (c.separated) {
        c.chi2 = ceil_at_least_one(p.r * (p.D2 - p.d2) / p.b);
        c.psi = ceil_at_least_one((p.r * (p.d2 - p.D1) - p.b) / p.b);
        c.burst_instant = p.D2;
        c.burst = 2 * p.b + p.r * (p.D1 - p.d1 + p.D2 - p.d2);
    } else {
        c.chi2 = ceil_at_least_one(p.r * (p.D2 - p.D1) / p.b);
        c.psi = 0;
        c.burst_instant = p.D2 - p.D1 + br + p.D1;
        c.burst = p.b + p.r * (p.D2 - p.d1);
    }
    return c;
}

Scenario gen_tightness_trajectory(const TightnessParams& p) {
    auto c = tightness_constants(p);
    const Q br = p.b / p.r;
    const Q& r = p.r;
    const Q& b = p.b;
    std::vector<Pending> u;

    if (c.separated) {
        const Q exit0 = p.D2;
        // Category I: one unit per branch, both exiting at D2.
        u.push_back({0, b, 1, p.D2});
        u.push_back({p.D2 - p.D1, b, 0, p.D1});
        // Category B: fill both branches up to their jitter, all exiting at D2.
        for (long k = 1; k < c.chi2; ++k) u.push_back({k * br, b, 1, exit0 - k * br});
        u.push_back({p.D2 - p.d2, r * (p.D2 - p.d2) - (c.chi2 - 1) * b, 1, p.d2});
        for (long k = 1; k < c.chi1; ++k) u.push_back({p.D2 - p.D1 + k * br, b, 0, exit0 - (p.D2 - p.D1 + k * br)});
        u.push_back({p.D2 - p.d1, r * (p.D1 - p.d1) - (c.chi1 - 1) * b, 0, p.d1});
        // Category S: pairs leaving together at the sustained rate of both branches.
        Q last_size = r * (p.d2 - p.D1) - c.psi * b;
        for (long k = 1; k < c.psi; ++k) {
            u.push_back({p.D2 - p.d2 + k * br, b, 1, p.d2});
            u.push_back({p.D2 - p.d1 + k * br, b, 0, p.d1});
        }
        u.push_back({p.D2 - p.D1 - br, last_size, 1, p.d2});
        u.push_back({p.D2 + p.d2 - p.D1 - p.d1 - br, last_size, 0, p.d1});
        // Category X: periodic tail on branch 1.
        for (long n = 1; n <= p.tail_units; ++n) u.push_back({p.D2 + p.d2 - p.D1 - p.d1 + (n - 1) * br, b, 0, p.d1});
    } else {
        const Q t0 = p.D2 - p.D1 + br;
        const Q exit0 = t0 + p.D1;
        u.push_back({t0, b, 0, p.D1});
        for (long k = 1; k < c.chi2; ++k) {
            Q t = t0 - (p.D2 - p.D1) + (k - 1) * br;
            u.push_back({t, b, 1, exit0 - t});
        }
        Q tl = c.chi2 >= 2 ? Q(t0 - br) : Q(t0 - (p.D2 - p.D1));
        u.push_back({tl, r * (p.D2 - p.D1) - (c.chi2 - 1) * b, 1, exit0 - tl});
        for (long k = 1; k < c.chi1; ++k) u.push_back({t0 + k * br, b, 0, p.D1 - k * br});
        u.push_back({t0 + p.D1 - p.d1, r * (p.D1 - p.d1) - (c.chi1 - 1) * b, 0, p.d1});
    }
    Scenario s = assemble(std::move(u), p);
    s.name = "tightness";
    s.note = "generated worst-case trajectory for the PEF output curve; may contain zero-size units";
    return s;
}

AdversarialConstants adversarial_constants(const AdversarialParams& p) {
    if (!(p.r > 0) || !(p.b > 0)) throw std::invalid_argument("adversarial model needs r > 0 and b > 0");
    if (p.d1 < 0 || p.D1 < p.d1 || p.d2 < 0 || p.D2 < p.d2) throw std::invalid_argument("invalid branch intervals");
    if (p.D2 < p.D1) throw std::invalid_argument("branches must be ordered with D1 <= D2");
    if (p.d1 == p.d2 && p.D1 == p.D2) throw std::invalid_argument("branch intervals must differ");
    AdversarialConstants c{};
    c.q_min = ir_q_min({p.r, p.b}, {p.d1, Ext(p.D1)}, {p.d2, Ext(p.D2)});
    if (p.q < c.q_min) throw std::invalid_argument("q below q_min = " + std::to_string(c.q_min));
    const Q br = p.b / p.r;
    const Q room = Q(p.q - 2) * br / 2;
    if (p.D1 < p.d2) {
        c.J = p.d2 - p.D1;
        c.D = p.d2;
        c.d = p.D1;
        c.slow_path = 1;
        c.fast_path = 0;
    } else if (p.d2 < p.D1) {
        c.J = q_min(room, p.D1 - p.d2) / 2;
        c.D = p.D1;
        c.d = c.D - c.J;
        c.slow_path = 0;
        c.fast_path = 1;
    } else if (p.d2 < p.D2) {
        // d2 == D1: move branch 2 slightly above D1.
        c.J = q_min(room, p.D2 - p.d2) / 2;
        c.D = p.D1 + c.J;
        c.d = p.D1;
        c.slow_path = 1;
        c.fast_path = 0;
    } else {
        // d2 == D1 == D2, so d1 < D1: move branch 1 slightly below D1.
        c.J = q_min(room, p.D1 - p.d1) / 2;
        c.D = p.D2;
        c.d = p.D1 - c.J;
        c.slow_path = 1;
        c.fast_path = 0;
    }
    Q qq = p.q;
    c.eps = q_min(br - 2 * c.J / (qq - 2), c.J) / 2;
    c.I = q_max(qq * c.J / (qq - 2), br);
    c.phi = c.I - c.J + c.eps;
    c.tau = qq * c.phi;
    c.x1 = c.phi;
    return c;
}

Scenario gen_adversarial_ir(const AdversarialParams& p) {
    auto c = adversarial_constants(p);
    long periods = p.periods;
    if (periods <= 0) {
        Q slope = Q(p.q) * (p.b / p.r - c.phi);
        periods = std::max(51L, to_long(q_ceil((10 * p.D2 + c.D) / slope)) + 2);
    }
    Scenario s;
    s.name = "adversarial-ir";
    s.note = "generated adversarial input for an interleaved regulator after PEFs";
    s.paths.push_back({"P1", p.d1, p.D1, true, PathAction::dropped(), {}});
    s.paths.push_back({"P2", p.d2, p.D2, true, PathAction::dropped(), {}});
    auto& slow = s.paths[c.slow_path];
    auto& fast = s.paths[c.fast_path];
    Stage pef{StageKind::PEF, Ext(0), false, {}};
    Stage ir{StageKind::IR, Ext(0), false, {}};
    for (long i = 1; i <= p.q; ++i) ir.sigma.emplace("f" + std::to_string(i), ConcaveCurve::token_bucket(p.r, p.b));
    for (long k = 0; k < periods; ++k)
        for (long i = 1; i <= p.q; ++i) {
            Q xi = Q(i - 1) * c.phi + c.x1;
            std::string f = "f" + std::to_string(i);
            long id1 = adversarial_unit_id(p.q, i, k, 1);
            long id2 = adversarial_unit_id(p.q, i, k, 2);
            s.units.push_back({id1, f, xi + k * c.tau, p.b});
            s.units.push_back({id2, f, xi + k * c.tau + c.I, p.b});
            slow.actions[id1] = PathAction::forward(c.D);
            fast.actions[id2] = PathAction::forward(c.d);
        }
    s.pipeline = {pef, ir};
    return s;
}

}  // namespace redcalc
