#include "redcalc/tfa.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace redcalc {

const char* to_string(PefModel m) { return m == PefModel::Tight ? "tight" : "intuitive"; }

const char* to_string(Convergence c) {
    switch (c) {
        case Convergence::Converged: return "converged";
        case Convergence::Diverged: return "diverged";
        case Convergence::IterationCap: return "iteration-cap";
    }
    return "?";
}

bool AnalysisReport::all_ok() const {
    if (convergence != Convergence::Converged) return false;
    for (const auto& e : ete)
        if (e.verdict == "violated" || e.verdict == "unbounded") return false;
    for (const auto& r : regs)
        if (r.verdict.kind == VerdictKind::Unbounded) return false;
    return true;
}

const EteReport* AnalysisReport::find_ete(const std::string& flow, const std::string& dst) const {
    for (const auto& e : ete)
        if (e.flow == flow && e.destination == dst) return &e;
    return nullptr;
}

const PefReport* AnalysisReport::find_pef(const std::string& flow, const std::string& vertex) const {
    for (const auto& p : pefs)
        if (p.flow == flow && p.vertex == vertex) return &p;
    return nullptr;
}

DelayInterval vertex_delay(const Vertex& v, const ConcaveCurve& aggregate) {
    Ext q(0);
    if (v.service) q = h_dev(aggregate, *v.service);
    return {v.tech_min, Ext(v.tech_max) + q};
}

namespace {

struct Diverged {
    std::string why;
};

struct FlowInfo {
    const FlowSpec* spec;
    FlowGraph graph;
    std::set<std::string> ep;
    std::map<std::string, std::set<std::string>> pef_ancestors;  // PEF vertex -> diamond ancestors (itself excluded)
};

struct PipelineResult {
    ConcaveCurve out;
    DelayInterval delay{0, Ext(0)};
    std::optional<PefReport> pef;
    std::optional<PofReport> pof;
    std::optional<RegReport> reg;
};

class Analyzer {
public:
    Analyzer(const NetworkSpec& net, const AnalysisOptions& opts) : net_(net), opts_(opts) {
        for (const auto& f : net.flows) {
            FlowInfo fi{&f, FlowGraph(f), {}, {}};
            fi.ep = ep_vertices(fi.graph, net.pef_vertices(f.id));
            for (const auto& v : net.pef_vertices(f.id)) {
                auto da = diamond_ancestors(fi.graph, fi.ep, v);
                da.erase(v);
                fi.pef_ancestors[v] = da;
            }
            flows_.emplace(f.id, std::move(fi));
        }
        for (const auto& v : net.vertices) {
            cbqs_[v.id] = {v.tech_min, Ext(v.tech_max)};
            vertices_[v.id] = &v;
        }
        build_order();
    }

    AnalysisReport run() {
        AnalysisReport rep;
        rep.model = opts_.model;
        rep.lossless = opts_.lossless;
        try {
            // Optimistic start: queueing-free vertices.
            for (auto& [fid, fi] : flows_)
                for (const auto& v : fi.graph.order()) compute_flow_at(fi, v);

            size_t sweeps = 0;
            std::vector<std::map<std::string, Q>> history;
            for (;;) {
                if (sweeps >= opts_.iteration_cap) {
                    rep.convergence = Convergence::IterationCap;
                    rep.diagnostics.push_back("iteration cap " + std::to_string(opts_.iteration_cap) + " reached");
                    break;
                }
                ++sweeps;
                bool changed = sweep();
                if (acyclic_ || !changed) break;
                history.push_back(upper_delays());
                if (history.size() > 3) history.erase(history.begin());
                if (sweeps % 8 == 0 && history.size() == 3 && try_certify(history)) {
                    rep.diagnostics.push_back("fixed point bounded by a certified post-fixed point after " +
                                              std::to_string(sweeps) + " sweeps");
                    break;
                }
            }
            rep.iterations = sweeps;
        } catch (const Diverged& d) {
            rep.convergence = Convergence::Diverged;
            rep.diagnostics.push_back(d.why);
        }
        fill(rep);
        return rep;
    }

private:
    void build_order() {
        std::map<std::string, std::set<std::string>> succ;
        for (const auto& v : net_.vertices) succ[v.id];
        for (const auto& f : net_.flows)
            for (const auto& [a, b] : f.edges) succ[a].insert(b);
        // Reverse post-order of a DFS; a back edge means a cyclic dependency.
        std::map<std::string, int> state;
        std::vector<std::string> post;
        acyclic_ = true;
        std::function<void(const std::string&)> dfs = [&](const std::string& v) {
            state[v] = 1;
            for (const auto& w : succ[v]) {
                if (state[w] == 1) acyclic_ = false;
                if (state[w] == 0) dfs(w);
            }
            state[v] = 2;
            post.push_back(v);
        };
        for (const auto& v : net_.vertices)
            if (state[v.id] == 0) dfs(v.id);
        order_.assign(post.rbegin(), post.rend());
    }

    std::map<std::string, DelayInterval>& hops(const std::string& fid) { return per_hop_[fid]; }

    PathDelayBounds bounds(FlowInfo& fi, const std::string& a, const std::string& n) {
        return path_delay_bounds(fi.graph, a, n, hops(fi.spec->id));
    }

    PipelineResult pipeline(FlowInfo& fi, const std::string& v) {
        const FlowSpec& f = *fi.spec;
        auto& outs = out_[f.id];
        ConcaveCurve in;
        if (v == f.source) {
            in = f.arrival;
        } else {
            bool first = true;
            for (const auto& p : fi.graph.parents(v)) {
                in = first ? outs.at(p) : add(in, outs.at(p));
                first = false;
            }
        }

        PipelineResult r;
        ConcaveCurve cur = in;

        if (net_.has_pef(f.id, v)) {
            PefReport pr;
            pr.vertex = v;
            pr.flow = f.id;
            pr.input = in;
            std::vector<AncestorTerm> terms;
            for (const auto& a : fi.pef_ancestors.at(v)) {
                auto b = bounds(fi, a, v);
                if (!b.hi.finite()) continue;
                terms.push_back({a, outs.at(a), b});
            }
            pr.tight = pef_output_curve(in, terms);
            pr.intuitive = in;
            cur = opts_.model == PefModel::Tight ? pr.tight : pr.intuitive;
            for (const auto& t : terms) {
                Q rto = pef_rto_bound(t.alpha, t.delays, f.lmin);
                pr.reordering.push_back({t.vertex, rto, rbo_from_rto(cur, Ext(rto))});
            }
            r.pef = std::move(pr);
        }

        if (const auto* pof = net_.pof(f.id, v)) {
            PofReport pr;
            pr.vertex = v;
            pr.flow = f.id;
            pr.reference = pof->reference;
            pr.timeout = pof->timeout;
            pr.upstream = bounds(fi, pof->reference, v);
            if (!pr.upstream.hi.finite()) throw Diverged{"unbounded delay upstream of the POF at " + v};
            const auto& aref = outs.at(pof->reference);
            pr.rto = pef_rto_bound(aref, pr.upstream, f.lmin);
            pr.rbo = rbo_from_rto(cur, Ext(pr.rto));
            pr.timeout_sufficient = pof->timeout >= pr.rto;
            pr.output_lossless = pof_output_curve(aref, pr.upstream, pof->timeout, true);
            pr.output_lossy = pof_output_curve(aref, pr.upstream, pof->timeout, false);
            bool lossless = opts_.lossless.value_or(false);
            cur = lossless ? pr.output_lossless : pr.output_lossy;
            if (!lossless) r.delay.hi = r.delay.hi + Ext(pof->timeout);
            r.pof = std::move(pr);
        }

        if (const auto* reg = net_.reg(f.id, v)) {
            r.reg = regulate(fi, v, *reg, cur, r.delay);
            const auto& sigma = reg->sigma.at(f.id);
            const auto& vb = r.reg->verdict;
            Ext penalty = vb.kind == VerdictKind::Bounded ? vb.bounds.hi + Ext(Q(-r.reg->upstream.hi.v)) : Ext::infinity();
            if (vb.kind == VerdictKind::Bounded && r.pof && !opts_.lossless.value_or(false))
                penalty = penalty + Ext(Q(-r.pof->timeout));
            if (penalty.finite()) {
                cur = convolve(sigma, deconvolve_delay(cur, penalty.v));
            } else {
                cur = sigma;
            }
            r.delay.hi = r.delay.hi + penalty;
        }
        r.out = cur;
        return r;
    }

    RegReport regulate(FlowInfo& fi, const std::string& v, const FunctionPlacement& reg, const ConcaveCurve& /*in*/,
                       const DelayInterval& /*pipe_so_far*/) {
        const FlowSpec& f = *fi.spec;
        const auto& sigma = reg.sigma.at(f.id);
        const auto& aref = out_[f.id].at(reg.reference);
        if (!leq(aref, sigma))
            throw ConfigError("shaping curve of " + f.id + " at " + v + " is not an arrival curve at " + reg.reference);

        RegReport rr;
        rr.vertex = v;
        rr.flow = f.id;
        rr.type = reg.reg_type == RegType::PerFlow ? "per-flow" : "interleaved";
        rr.reference = reg.reference;
        rr.upstream = bounds(fi, reg.reference, v);
        if (!rr.upstream.hi.finite()) {
            rr.verdict = RegulatorVerdict::unbounded(reason::UnprovenConfiguration);
            return rr;
        }
        bool lossless = opts_.lossless.value_or(false);

        std::vector<std::string> group{f.id};
        if (reg.reg_type == RegType::Interleaved) group = reg.flows;

        // POF with the same reference in front of the regulator, covering the group.
        const FunctionPlacement* pof = net_.pof(f.id, v);
        bool pof_covers = pof != nullptr;
        if (pof)
            for (const auto& g : group)
                pof_covers = pof_covers && std::find(pof->flows.begin(), pof->flows.end(), g) != pof->flows.end();
        if (pof_covers) {
            rr.verdict = RegulatorVerdict::bounded(preof_for_free_bounds(rr.upstream, pof->timeout, lossless));
            return rr;
        }

        // A single common path from the reference is a FIFO system.
        std::optional<std::vector<std::string>> common;
        bool fifo = true;
        for (const auto& g : group) {
            auto paths = enumerate_paths(flows_.at(g).graph, reg.reference, v);
            if (paths.size() != 1 || (common && *common != paths.front())) {
                fifo = false;
                break;
            }
            common = paths.front();
        }
        if (fifo) {
            rr.verdict = RegulatorVerdict::bounded(rr.upstream);
            return rr;
        }

        if (group.size() == 1) {
            if (sigma.segments().size() == 1) {
                rr.verdict = RegulatorVerdict::bounded(pfr_after_pef_bounds(sigma.segments().front(), rr.upstream));
            } else {
                Ext pen = pfr_after_pef_penalty(aref, sigma, rr.upstream);
                rr.verdict = RegulatorVerdict::bounded({rr.upstream.lo, rr.upstream.hi + pen});
            }
            Q base = pef_rto_bound(aref, rr.upstream, f.lmin);
            rr.verdict.rto_bound = pfr_after_pef_rto(Ext(base), rr.upstream);
            return rr;
        }

        IrContext ctx;
        ctx.flow_count = group.size();
        ctx.upstream = rr.upstream;
        ctx.lossless = lossless;
        const ConcaveCurve& s0 = reg.sigma.at(group.front());
        for (const auto& g : group) ctx.homogeneous_sigma = ctx.homogeneous_sigma && reg.sigma.at(g) == s0;
        if (s0.segments().size() == 1) ctx.sigma = s0.segments().front();
        for (const auto& g : group) {
            auto& gi = flows_.at(g);
            for (const auto& path : enumerate_paths(gi.graph, reg.reference, v)) {
                DelayInterval sum{0, Ext(0)};
                for (size_t i = 1; i + 1 < path.size(); ++i) {
                    auto& gh = hops(g);
                    auto hit = gh.find(path[i]);
                    const auto& h = hit != gh.end() ? hit->second : cbqs_.at(path[i]);
                    sum = {sum.lo + h.lo, sum.hi + h.hi};
                }
                if (std::find(ctx.branch_intervals.begin(), ctx.branch_intervals.end(), sum) == ctx.branch_intervals.end())
                    ctx.branch_intervals.push_back(sum);
            }
        }
        rr.verdict = ir_after_pef_verdict(ctx);
        return rr;
    }

    // Recomputes one flow at one vertex from the current state; returns true
    // when its output curve or hop interval changed.
    bool compute_flow_at(FlowInfo& fi, const std::string& v) {
        PipelineResult r = pipeline(fi, v);
        const auto& c = cbqs_.at(v);
        if (!c.hi.finite()) throw Diverged{"rate overload at " + v};
        ConcaveCurve out = deconvolve_delay(r.out, Q(c.hi.v - c.lo));
        if (out.burst0() > opts_.burst_cap) throw Diverged{"burst cap exceeded at " + v + " for " + fi.spec->id};
        DelayInterval hop{r.delay.lo + c.lo, r.delay.hi + c.hi};

        const std::string& fid = fi.spec->id;
        bool changed = false;
        auto& o = out_[fid];
        auto it = o.find(v);
        if (it == o.end() || !(it->second == out)) changed = true;
        o.insert_or_assign(v, out);
        auto& h = hops(fid);
        auto ht = h.find(v);
        if (ht == h.end() || !(ht->second == hop)) changed = true;
        h.insert_or_assign(v, hop);
        after_pipe_[fid].insert_or_assign(v, r.out);
        sites_[fid].insert_or_assign(v, std::move(r));
        return changed;
    }

    std::map<std::string, Q> upper_delays() const {
        std::map<std::string, Q> x;
        for (const auto& [v, d] : cbqs_) x[v] = d.hi.v;
        return x;
    }

    // Evaluates every flow with the vertex delays frozen at `x` and returns
    // the vertex delays implied by the resulting aggregates.
    std::map<std::string, DelayInterval> evaluate_at(const std::map<std::string, Q>& x) {
        for (auto& [v, d] : cbqs_) d.hi = Ext(x.at(v));
        for (auto& [fid, fi] : flows_)
            for (const auto& v : fi.graph.order()) compute_flow_at(fi, v);
        std::map<std::string, DelayInterval> implied;
        for (const auto& v : order_) {
            ConcaveCurve agg;
            bool any = false;
            for (auto& [fid, fi] : flows_)
                if (fi.graph.contains(v)) {
                    agg = add(agg, after_pipe_[fid].at(v));
                    any = true;
                }
            implied[v] = any ? vertex_delay(*vertices_.at(v), agg) : cbqs_.at(v);
            aggregate_.insert_or_assign(v, agg);
        }
        return implied;
    }

    // Monotone iteration from below may approach the least fixed point only
    // in the limit. Extrapolate the geometric tail and accept the candidate
    // when the analysis maps it below itself: every fixed point reachable from
    // the optimistic start is then below the candidate, so it is a sound bound.
    bool try_certify(const std::vector<std::map<std::string, Q>>& h) {
        const Q grid = Q(1, 1 << 20);
        std::map<std::string, Q> cand;
        for (const auto& [v, x2] : h[2]) {
            Q d2 = x2 - h[1].at(v);
            Q d1 = h[1].at(v) - h[0].at(v);
            Q tail = 0;
            if (d2 > 0) {
                if (!(d1 > d2)) return false;
                Q rho = d2 / d1;
                tail = 2 * d2 * rho / (1 - rho);
            }
            cand[v] = q_ceil((x2 + tail) / grid + 1) * grid;
        }
        auto saved_cbqs = cbqs_;
        auto saved_out = out_;
        auto saved_hop = per_hop_;
        auto saved_pipe = after_pipe_;
        auto saved_sites = sites_;
        auto saved_agg = aggregate_;
        auto implied = evaluate_at(cand);
        bool ok = true;
        for (const auto& [v, d] : implied) ok = ok && d.hi.finite() && d.hi.v <= cand.at(v);
        if (ok) return true;
        cbqs_ = std::move(saved_cbqs);
        out_ = std::move(saved_out);
        per_hop_ = std::move(saved_hop);
        after_pipe_ = std::move(saved_pipe);
        sites_ = std::move(saved_sites);
        aggregate_ = std::move(saved_agg);
        return false;
    }

    bool sweep() {
        bool changed = false;
        for (const auto& v : order_) {
            std::vector<FlowInfo*> here;
            for (auto& [fid, fi] : flows_)
                if (fi.graph.contains(v)) here.push_back(&fi);
            if (here.empty()) continue;

            ConcaveCurve agg;
            for (auto* fi : here) {
                PipelineResult r = pipeline(*fi, v);
                agg = add(agg, r.out);
                after_pipe_[fi->spec->id].insert_or_assign(v, r.out);
            }
            DelayInterval d = vertex_delay(*vertices_.at(v), agg);
            if (!d.hi.finite()) throw Diverged{std::string(reason::RateOverload) + " at " + v};
            if (!(cbqs_.at(v) == d)) changed = true;
            cbqs_[v] = d;
            aggregate_.insert_or_assign(v, agg);
            for (auto* fi : here) changed = compute_flow_at(*fi, v) || changed;
        }
        return changed;
    }

    void fill(AnalysisReport& rep) {
        bool failed = rep.convergence != Convergence::Converged;
        for (const auto& v : net_.vertices) {
            auto it = aggregate_.find(v.id);
            rep.vertices.push_back({v.id, cbqs_.at(v.id), it == aggregate_.end() ? ConcaveCurve() : it->second});
        }
        for (const auto& f : net_.flows) {
            auto& fi = flows_.at(f.id);
            for (const auto& v : fi.graph.order()) {
                auto it = sites_[f.id].find(v);
                if (it == sites_[f.id].end()) continue;
                if (it->second.pef) rep.pefs.push_back(*it->second.pef);
                if (it->second.pof) rep.pofs.push_back(*it->second.pof);
                if (it->second.reg) rep.regs.push_back(*it->second.reg);
            }
            rep.flow_curves[f.id] = out_[f.id];
            rep.per_hop[f.id] = hops(f.id);
            for (const auto& dst : f.destinations) {
                EteReport e;
                e.flow = f.id;
                e.destination = dst;
                if (auto d = f.deadline.find(dst); d != f.deadline.end()) e.deadline = d->second;
                if (failed) {
                    e.bounds = {0, Ext::infinity()};
                } else {
                    auto& h = hops(f.id);
                    auto mid = path_delay_bounds(fi.graph, f.source, dst, h);
                    if (f.source == dst) {
                        e.bounds = h.at(dst);
                    } else {
                        const auto& s = h.at(f.source);
                        const auto& t = h.at(dst);
                        e.bounds = {s.lo + mid.lo + t.lo, s.hi + mid.hi + t.hi};
                    }
                }
                if (!e.bounds.hi.finite()) e.verdict = "unbounded";
                else if (!e.deadline) e.verdict = "no-deadline";
                else e.verdict = e.bounds.hi.v <= *e.deadline ? "met" : "violated";
                rep.ete.push_back(e);
            }
        }
    }

    const NetworkSpec& net_;
    AnalysisOptions opts_;
    std::map<std::string, FlowInfo> flows_;
    std::map<std::string, const Vertex*> vertices_;
    std::vector<std::string> order_;
    bool acyclic_ = true;
    std::map<std::string, DelayInterval> cbqs_;
    std::map<std::string, ConcaveCurve> aggregate_;
    std::map<std::string, std::map<std::string, ConcaveCurve>> out_;
    std::map<std::string, std::map<std::string, ConcaveCurve>> after_pipe_;
    std::map<std::string, std::map<std::string, DelayInterval>> per_hop_;
    std::map<std::string, std::map<std::string, PipelineResult>> sites_;
};

}  // namespace

AnalysisReport analyze(const NetworkSpec& net, const AnalysisOptions& opts) {
    Analyzer a(net, opts);
    return a.run();
}

ModelComparison compare_models(const NetworkSpec& net, AnalysisOptions opts) {
    ModelComparison c;
    opts.model = PefModel::Tight;
    c.tight = analyze(net, opts);
    opts.model = PefModel::Intuitive;
    c.intuitive = analyze(net, opts);
    return c;
}

}  // namespace redcalc
