// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "redcalc/redundancy.hpp"
#include "redcalc/regulators.hpp"
#include "redcalc/sim.hpp"
#include "redcalc/tfa.hpp"
#include "redcalc/verify.hpp"

using namespace redcalc;

namespace {

ConcaveCurve tb(const Q& r, const Q& b) { return ConcaveCurve::token_bucket(r, b); }

NetworkSpec net(const std::string& rel) { return load_network(oracle::scenario_path(rel)); }

Trace sim(const std::string& rel) { return run_scenario(load_scenario(oracle::scenario_path(rel))); }

Q worst_delay(const Trace& t, const std::string& to) {
    Q w = 0;
    for (const auto& [u, d] : unit_delays(t, "generated", to)) w = q_max(w, d);
    return w;
}

struct Outcome {
    bool ok = true;
    std::ostringstream why;
    void require(bool c, const std::string& what) {
        if (!c && ok) why << what;
        ok = ok && c;
    }
};

Outcome pef_curve() {
    Outcome o;
    auto rep = analyze(net("toy/toy.json"), {});
    const auto* p = rep.find_pef("f", "F");
    o.require(p != nullptr, "no PEF report");
    if (!p) return o;
    auto expect = ConcaveCurve(std::vector<TokenBucket>{{2, 4}, {1, 8}});
    o.require(p->tight == expect, "tight curve " + to_json(p->tight).dump());
    // Brute-force check of the same curve as a pointwise minimum.
    for (const auto& t : oracle::sample_times({expect}, 30, 60))
        if (t > 0) o.require(eval(p->tight, t) == q_min(eval(tb(2, 4), t), eval(tb(1, 8), t)), "pointwise mismatch");
    return o;
}

Outcome rto_bound() {
    Outcome o;
    auto rep = analyze(net("toy/toy.json"), {});
    const auto* p = rep.find_pef("f", "F");
    o.require(p && p->reordering.size() == 1 && p->reordering[0].rto == 6, "RTO bound is not 6");
    auto t = sim("toy/reordering.json");
    Q m = measure_reordering(t, "pef", "generated").rto;
    o.require(m == 4, "simulated RTO " + to_string(m));
    o.require(oracle::rto(t.at("pef"), t.at("generated")) == 4, "oracle RTO differs");
    return o;
}

Outcome rbo_bound() {
    Outcome o;
    auto rep = analyze(net("toy/toy.json"), {});
    const auto* p = rep.find_pef("f", "F");
    o.require(p && p->reordering.size() == 1 && p->reordering[0].rbo == Ext(14), "RBO bound is not 14");
    return o;
}

Outcome pfr_after_pef() {
    Outcome o;
    auto rep = analyze(net("toy/toy_pfr.json"), {});
    o.require(rep.regs.size() == 1, "no regulator report");
    if (rep.regs.empty()) return o;
    const auto& v = rep.regs[0].verdict;
    o.require(v.bounds == DelayInterval{0, Ext(14)}, "regulator bounds not [0, 14]");
    o.require(v.rto_bound && *v.rto_bound == Ext(13), "regulator RTO bound not 13");
    auto t = sim("toy/pef_pfr.json");
    Q w = worst_delay(t, "reg");
    o.require(w == 14, "simulated worst delay " + to_string(w));
    Q r = measure_reordering(t, "reg", "generated").rto;
    o.require(r == 12, "simulated RTO " + to_string(r));
    o.require(r <= 13, "simulated RTO above bound");
    return o;
}

Outcome preof_for_free() {
    Outcome o;
    AnalysisOptions lossless;
    lossless.lossless = true;
    auto a = analyze(net("toy/toy_pof_pfr.json"), lossless);
    o.require(a.find_ete("f", "F")->bounds.hi <= Ext(7), "lossless bound above 7");
    auto b = analyze(net("toy/toy_pof_pfr.json"), {});
    o.require(b.find_ete("f", "F")->bounds.hi <= Ext(13), "lossy bound above 13");
    Q w = worst_delay(sim("toy/pef_pof_pfr.json"), "reg");
    o.require(w <= 7, "simulated lossless delay " + to_string(w));
    Q wl = worst_delay(sim("toy/pef_pof_pfr_lossy.json"), "reg");
    o.require(wl <= 13, "simulated lossy delay " + to_string(wl));
    return o;
}

Outcome tightness() {
    Outcome o;
    std::mt19937_64 rng(2024);
    int sets = 0;
    while (sets < 24) {
        TightnessParams p;
        p.r = oracle::random_q(rng, 5, 3, 1);
        p.b = oracle::random_q(rng, 5, 3, 1);
        p.d1 = oracle::random_q(rng, 4, 2);
        p.D1 = p.d1 + oracle::random_q(rng, 6, 3);
        p.d2 = p.D1 + p.b / p.r + oracle::random_q(rng, 8, 3);
        p.D2 = p.d2 + oracle::random_q(rng, 6, 3);
        auto c = tightness_constants(p);
        if (!c.separated) continue;
        ++sets;
        auto t = run_scenario(gen_tightness_trajectory(p));
        auto alpha = tb(p.r, p.b);
        auto curve = pef_output_curve_parallel(alpha, {{p.d1, Ext(p.D1)}, {p.d2, Ext(p.D2)}});
        o.require(oracle::compliant(t.at("generated"), alpha), "source not compliant");
        o.require(oracle::compliant(t.at("pef"), curve), "PEF output exceeds its curve");
        o.require(oracle::at_zero_plus(curve) == c.burst, "burst formula disagrees with the curve");
        o.require(oracle::data_at(t.at("pef"), c.burst_instant) == c.burst, "burst not reached at one instant");
    }
    o.require(sets >= 20, "too few parameter sets");
    return o;
}

Outcome adversarial() {
    Outcome o;
    std::vector<AdversarialParams> sets = {
        {0, 1, 1, 0, 1, 6, 7},
        {0, 1, 2, 1, 3, 2, 4},
        {0, 1, 1, 0, 2, 2, 5},
        {0, Q(1, 2), 1, 0, 2, 3, 4},
        {0, 2, 1, 0, 1, 3, 5},
        {0, 1, 3, 1, 2, 0, 4},
    };
    int done = 0;
    for (auto p : sets) {
        p.q = ir_q_min({p.r, p.b}, {p.d1, Ext(p.D1)}, {p.d2, Ext(p.D2)});
        auto c = adversarial_constants(p);
        auto s = gen_adversarial_ir(p);
        auto t = run_scenario(s);
        std::map<long, Q> pef_at, reg_at;
        for (const auto& e : t.at("pef")) pef_at.emplace(e.unit, e.time);
        for (const auto& e : t.at("reg")) reg_at.emplace(e.unit, e.time);
        o.require(pef_at.size() == s.units.size(), "PEF output lost units");
        Q gap = Q(p.q) * (p.b / p.r - c.phi);
        for (long k = 0; k <= 50; ++k) {
            long id = adversarial_unit_id(p.q, 1, k, 1);
            o.require(reg_at.count(id) && pef_at.count(id), "unit missing");
            if (!reg_at.count(id) || !pef_at.count(id)) break;
            o.require(reg_at[id] - pef_at[id] >= -c.D + Q(k) * gap, "sojourn below the linear lower bound");
        }
        o.require(worst_delay(t, "reg") > 10 * p.D2, "regulator delay does not exceed ten times D2");
        std::set<std::string> flows;
        for (const auto& u : s.units) flows.insert(u.flow);
        for (const auto& f : flows) {
            std::vector<TraceEvent> gen;
            long last = 0;
            for (const auto& e : t.at("generated"))
                if (e.flow == f) gen.push_back(e);
            o.require(oracle::compliant(gen, tb(p.r, p.b)), "source of " + f + " not compliant");
            for (const auto& e : t.at("pef"))
                if (e.flow == f) {
                    o.require(e.unit > last, "PEF output of " + f + " not FIFO");
                    last = e.unit;
                }
        }
        ++done;
    }
    o.require(done >= 5, "too few parameter sets");
    return o;
}

Outcome tight_vs_intuitive() {
    Outcome o;
    auto cmp = compare_models(net("backbone/automotive_backbone.json"), {});
    bool strict = false;
    auto check = [&](const ModelComparison& m, bool& better) {
        for (const auto& e : m.tight.ete) {
            const auto* i = m.intuitive.find_ete(e.flow, e.destination);
            o.require(i != nullptr, "missing intuitive result");
            if (!i) continue;
            o.require(e.bounds.hi <= i->bounds.hi, "tight bound above intuitive for " + e.flow);
            better = better || e.bounds.hi < i->bounds.hi;
        }
    };
    check(cmp, strict);
    o.require(strict, "no strict improvement on the backbone");
    std::mt19937_64 rng(99);
    for (int n = 0; n < 60; ++n) {
        bool unused = false;
        auto c = compare_models(oracle::random_network(rng), {});
        o.require(c.tight.convergence == Convergence::Converged, "random network did not converge");
        check(c, unused);
    }
    return o;
}

Outcome soundness() {
    Outcome o;
    int verified = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(REDCALC_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        json j = json::parse(std::ifstream(entry.path()));
        if (!j.contains("paths") && !j.contains("generator")) continue;
        auto s = load_scenario(entry.path().string());
        auto t = run_scenario(s);
        auto res = verify_scenario(s, t, load_network(s.network));
        std::string name = entry.path().filename().string();
        for (const auto& c : res.checks) o.require(c.ok, name + ": " + c.name + " " + c.detail);
        ++verified;
    }
    o.require(verified >= 10, "too few scenarios");
    return o;
}

Outcome algebra() {
    Outcome o;
    std::mt19937_64 rng(4242);
    long checks = 0;
    auto req = [&](bool c, const char* what) {
        o.require(c, what);
        ++checks;
    };
    while (checks < 10000) {
        auto a = oracle::random_curve(rng, 3);
        auto b = oracle::random_curve(rng, 3);
        auto c = oracle::random_curve(rng, 2);
        req(add(a, b) == add(b, a), "add not commutative");
        req(convolve(a, b) == convolve(b, a), "convolution not commutative");
        req(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)), "convolution not associative");
        req(leq(convolve(a, b), a), "convolution above operand");
        Q x = oracle::random_q(rng, 8, 3);
        auto s = deconvolve_delay(a, x);
        for (const auto& t : oracle::sample_times({a, b}, 15, 5)) {
            if (t == 0) continue;
            req(eval(convolve(a, b), t) == oracle::inf_convolution(a, b, t, 6), "convolution differs from grid");
            req(eval(s, t) == oracle::deconvolution_by_delay(a, x, t), "deconvolution differs from scan");
            req(eval(add(a, b), t) == eval(a, t) + eval(b, t), "sum differs pointwise");
        }
        Q y = oracle::random_q(rng, 40, 3);
        req(lower_pseudo_inverse(a, y) == oracle::pseudo_inverse(a, y), "pseudo-inverse differs");
        Q rate = a.tail().rate + oracle::random_q(rng, 4, 2, 1);
        Q lat = oracle::random_q(rng, 4, 2);
        req(h_dev(a, Service(RateLatency{rate, lat})) == oracle::h_dev_rate_latency(a, rate, lat),
            "horizontal deviation differs");
    }
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"toy PEF output curve is min(gamma(2,4), gamma(1,8))", pef_curve},
        {"toy RTO bound 6, simulated reordering measures 4", rto_bound},
        {"toy RBO bound 14", rbo_bound},
        {"per-flow regulator after PEF: bound [0,14], RTO bound 13, simulation attains 14 and RTO 12", pfr_after_pef},
        {"PEF + POF + regulator: lossless delay <= 7, lossy <= 13", preof_for_free},
        {"separated tightness trajectories reach the exact burst", tightness},
        {"interleaved regulator after PEF grows without bound at q = q_min", adversarial},
        {"tight PEF model never worse than intuitive, strictly better on the backbone", tight_vs_intuitive},
        {"every bundled scenario verifies against its analysis", soundness},
        {"randomized min-plus algebra checks", algebra},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.why << "exception: " << e.what();
        }
        std::cout << (o.ok ? "PASS" : "FAIL") << " [" << n << "] " << name;
        if (!o.ok) std::cout << ": " << o.why.str();
        std::cout << "\n";
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
