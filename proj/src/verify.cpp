#include "redcalc/verify.hpp"

#include <set>

namespace redcalc {

bool VerifyResult::ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

namespace {

bool scenario_lossless(const Scenario& s) {
    for (const auto& u : s.units) {
        bool reached = false;
        for (const auto& p : s.paths) reached = reached || !p.action(u.id).drop;
        if (!reached) return false;
    }
    return true;
}

std::string interval_str(const Q& lo, const Ext& hi) { return "[" + to_string(lo) + ", " + to_string(hi) + "]"; }

bool has_point(const Trace& t, const std::string& p) {
    for (const auto& x : t.points)
        if (x == p) return true;
    return false;
}

}  // namespace

VerifyResult verify_scenario(const Scenario& s, const Trace& t, const NetworkSpec& net) {
    VerifyResult res;
    if (s.vertex.empty()) throw ScenarioError("scenario does not name the vertex hosting its pipeline");
    std::set<std::string> flows;
    for (const auto& u : s.units) flows.insert(u.flow);
    for (const auto& f : flows) {
        bool found = false;
        for (const auto& nf : net.flows) found = found || nf.id == f;
        if (!found) throw ScenarioError("flow " + f + " is not in the network");
        if (!FlowGraph(net.flow(f)).contains(s.vertex)) throw ScenarioError("flow " + f + " does not cross " + s.vertex);
    }

    res.lossless = scenario_lossless(s);
    AnalysisOptions opts;
    opts.lossless = res.lossless;
    res.report = analyze(net, opts);
    const auto& rep = res.report;
    if (rep.convergence != Convergence::Converged) {
        res.notes.push_back(std::string("analysis did not converge: ") + to_string(rep.convergence));
        return res;
    }

    const DelayInterval* cbqs = nullptr;
    for (const auto& v : rep.vertices)
        if (v.vertex == s.vertex) cbqs = &v.delay;

    for (const auto& f : flows) {
        const FlowSpec& spec = net.flow(f);
        FlowGraph g(spec);
        const auto& hops = rep.per_hop.at(f);
        PathDelayBounds up = spec.source == s.vertex ? PathDelayBounds{0, Ext(0)} : path_delay_bounds(g, spec.source, s.vertex, hops);

        VerifyCheck pb{"path-bounds:" + f, true, ""};
        for (const auto& p : s.paths)
            if (p.d < up.lo || Ext(p.D) > up.hi) {
                pb.ok = false;
                pb.detail += "path " + p.name + " " + interval_str(p.d, Ext(p.D)) + " not within " + interval_str(up.lo, up.hi) + "; ";
            }
        if (pb.ok) pb.detail = "declared paths within " + interval_str(up.lo, up.hi);
        res.checks.push_back(pb);

        const auto& hop = hops.at(s.vertex);
        Q pipe_lo = hop.lo - cbqs->lo;
        Ext pipe_hi = hop.hi.finite() && cbqs->hi.finite() ? Ext(Q(hop.hi.v - cbqs->hi.v)) : Ext::infinity();
        Q lo = up.lo + pipe_lo;
        Ext hi = up.hi + pipe_hi;
        VerifyCheck ete{"delay:" + f, true, ""};
        Q worst = 0;
        bool any = false;
        auto delays = unit_delays(t, "generated", t.last_point());
        for (const auto& u : s.units) {
            if (u.flow != f) continue;
            auto it = delays.find(u.id);
            if (it == delays.end()) continue;
            if (!any || it->second > worst) worst = it->second;
            any = true;
            if (it->second < lo || Ext(it->second) > hi) {
                ete.ok = false;
                ete.detail = "unit " + std::to_string(u.id) + " delay " + to_string(it->second) + " outside " + interval_str(lo, hi);
                break;
            }
        }
        if (ete.ok) ete.detail = "max delay " + to_string(worst) + " within " + interval_str(lo, hi);
        res.checks.push_back(ete);
        if (ete.ok && any && hi.finite() && worst == hi.v)
            res.notes.push_back("delay bound " + to_string(hi) + " attained by " + f);

        if (has_point(t, "pef")) {
            if (const auto* pr = rep.find_pef(f, s.vertex)) {
                auto c = check_compliance(t, "pef", pr->tight, f);
                res.checks.push_back({"pef-output:" + f, c.ok,
                                      c.ok ? "compliant with the PEF output curve"
                                           : "window [" + to_string(c.start) + ", " + to_string(c.end) + "] carries " +
                                                 to_string(c.data) + " > " + to_string(c.bound)});
                for (const auto& e : pr->reordering) {
                    if (e.reference != spec.source) continue;
                    auto m = measure_reordering(t, "pef", "generated", f);
                    bool ok = m.rto <= e.rto && Ext(m.rbo) <= e.rbo;
                    res.checks.push_back({"pef-reordering:" + f, ok,
                                          "RTO " + to_string(m.rto) + " (bound " + to_string(e.rto) + "), RBO " +
                                              to_string(m.rbo) + " (bound " + to_string(e.rbo) + ")"});
                }
            }
        }

        if (has_point(t, "pof")) {
            for (const auto& p : rep.pofs) {
                if (p.flow != f || p.vertex != s.vertex) continue;
                if (res.lossless && p.timeout_sufficient) {
                    auto m = measure_reordering(t, "pof", "generated", f);
                    res.checks.push_back({"pof-order:" + f, m.rto == 0, "RTO after POF " + to_string(m.rto)});
                }
            }
        }

        if (has_point(t, "reg")) {
            for (const auto& r : rep.regs) {
                if (r.flow != f || r.vertex != s.vertex) continue;
                const FunctionPlacement* pl = net.reg(f, s.vertex);
                auto c = check_compliance(t, "reg", pl->sigma.at(f), f);
                res.checks.push_back({"reg-output:" + f, c.ok, c.ok ? "compliant with the shaping curve" : "shaping violated"});
                if (r.verdict.kind == VerdictKind::Unbounded) {
                    res.notes.push_back("analysis reports unbounded regulator delay for " + f + " (" + r.verdict.reason +
                                        "); simulated maximum delay " + to_string(worst));
                } else if (r.verdict.rto_bound) {
                    auto m = measure_reordering(t, "reg", "generated", f);
                    res.checks.push_back({"reg-reordering:" + f, Ext(m.rto) <= *r.verdict.rto_bound,
                                          "RTO " + to_string(m.rto) + " (bound " + to_string(*r.verdict.rto_bound) + ")"});
                }
            }
        }
    }
    return res;
}

json to_json(const VerifyResult& r) {
    json j;
    j["ok"] = r.ok();
    j["lossless"] = r.lossless;
    j["checks"] = json::array();
    for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    j["notes"] = r.notes;
    return j;
}

}  // namespace redcalc
