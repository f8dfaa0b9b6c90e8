#include "redcalc/topology.hpp"

#include <algorithm>
#include <functional>

namespace redcalc {

FlowGraph::FlowGraph(const FlowSpec& f) : source_(f.source) {
    parents_[source_];
    children_[source_];
    for (const auto& [a, b] : f.edges) {
        if (a == b) throw std::invalid_argument("self loop on " + a);
        auto& ch = children_[a];
        if (std::find(ch.begin(), ch.end(), b) != ch.end()) throw std::invalid_argument("duplicate edge " + a + "->" + b);
        ch.push_back(b);
        parents_[b].push_back(a);
        parents_[a];
        children_[b];
    }
    if (!parents_.at(source_).empty()) throw std::invalid_argument("source " + source_ + " has incoming edges");

    // Kahn, keeping the order of first appearance for determinism.
    std::map<std::string, size_t> indeg;
    for (const auto& [v, ps] : parents_) indeg[v] = ps.size();
    std::vector<std::string> ready{source_};
    while (!ready.empty()) {
        std::string v = ready.front();
        ready.erase(ready.begin());
        order_.push_back(v);
        for (const auto& c : children_.at(v))
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (order_.size() != parents_.size()) {
        for (const auto& [v, d] : indeg)
            if (d > 0 && v != source_) {
                // Either a cycle or a vertex unreachable from the source.
                throw std::invalid_argument("flow graph is cyclic or not rooted at the source (at " + v + ")");
            }
        throw std::invalid_argument("flow graph is not rooted at the source");
    }
}

const Vertex& NetworkSpec::vertex(const std::string& id) const {
    for (const auto& v : vertices)
        if (v.id == id) return v;
    throw std::out_of_range("unknown vertex " + id);
}

const FlowSpec& NetworkSpec::flow(const std::string& id) const {
    for (const auto& f : flows)
        if (f.id == id) return f;
    throw std::out_of_range("unknown flow " + id);
}

namespace {

const FunctionPlacement* find_placement(const NetworkSpec& net, FunctionKind kind, const std::string& flow,
                                        const std::string& vertex) {
    for (const auto& p : net.placements) {
        if (p.kind != kind || p.vertex != vertex) continue;
        if (std::find(p.flows.begin(), p.flows.end(), flow) != p.flows.end()) return &p;
    }
    return nullptr;
}

}  // namespace

bool NetworkSpec::has_pef(const std::string& flow, const std::string& v) const {
    return find_placement(*this, FunctionKind::PEF, flow, v) != nullptr;
}

const FunctionPlacement* NetworkSpec::pof(const std::string& flow, const std::string& v) const {
    return find_placement(*this, FunctionKind::POF, flow, v);
}

const FunctionPlacement* NetworkSpec::reg(const std::string& flow, const std::string& v) const {
    return find_placement(*this, FunctionKind::REG, flow, v);
}

std::set<std::string> NetworkSpec::pef_vertices(const std::string& flow) const {
    std::set<std::string> out;
    for (const auto& p : placements)
        if (p.kind == FunctionKind::PEF && std::find(p.flows.begin(), p.flows.end(), flow) != p.flows.end())
            out.insert(p.vertex);
    return out;
}

std::set<std::string> ep_vertices(const FlowGraph& g, const std::set<std::string>& pefs) {
    std::set<std::string> ep;
    for (const auto& v : g.order()) {
        if (pefs.count(v)) continue;
        const auto& ps = g.parents(v);
        bool is_ep = ps.size() >= 2;
        for (const auto& p : ps) is_ep = is_ep || ep.count(p);
        if (!is_ep) continue;
        if (g.children(v).size() > 1)
            throw std::invalid_argument("paths split again at " + v + " before duplicates are eliminated");
        ep.insert(v);
    }
    return ep;
}

std::set<std::string> diamond_ancestors(const FlowGraph& g, const std::set<std::string>& ep, const std::string& n) {
    if (!g.contains(n)) throw std::invalid_argument("vertex " + n + " not in flow graph");
    std::map<std::string, std::set<std::string>> dom;
    for (const auto& v : g.order()) {
        std::set<std::string> d;
        const auto& ps = g.parents(v);
        if (!ps.empty()) {
            d = dom.at(ps.front());
            for (size_t i = 1; i < ps.size(); ++i) {
                std::set<std::string> keep;
                const auto& other = dom.at(ps[i]);
                std::set_intersection(d.begin(), d.end(), other.begin(), other.end(), std::inserter(keep, keep.end()));
                d = std::move(keep);
            }
        }
        d.insert(v);
        dom[v] = std::move(d);
        if (v == n) break;
    }
    std::set<std::string> out;
    for (const auto& a : dom.at(n))
        if (!ep.count(a)) out.insert(a);
    return out;
}

PathDelayBounds path_delay_bounds(const FlowGraph& g, const std::string& a, const std::string& n,
                                  const std::map<std::string, DelayInterval>& per_hop) {
    if (!g.contains(a) || !g.contains(n)) throw std::invalid_argument("path endpoints not in flow graph");
    if (a == n) return {0, Ext(0)};
    // best[v] = extremal sums over a->v paths of hops strictly after a, v included
    std::map<std::string, DelayInterval> best;
    bool started = false;
    for (const auto& v : g.order()) {
        if (v == a) {
            started = true;
            best[v] = {0, Ext(0)};
            continue;
        }
        if (!started) continue;
        std::optional<DelayInterval> acc;
        for (const auto& p : g.parents(v)) {
            auto it = best.find(p);
            if (it == best.end()) continue;
            if (!acc) {
                acc = it->second;
            } else {
                acc->lo = q_min(acc->lo, it->second.lo);
                acc->hi = ext_max(acc->hi, it->second.hi);
            }
        }
        if (!acc) continue;
        if (v == n) return *acc;
        auto hop = per_hop.find(v);
        if (hop == per_hop.end()) throw std::logic_error("no per-hop delay bound for " + v + " yet");
        best[v] = {acc->lo + hop->second.lo, acc->hi + hop->second.hi};
    }
    throw std::invalid_argument(a + " is not an ancestor of " + n);
}

std::vector<std::vector<std::string>> enumerate_paths(const FlowGraph& g, const std::string& a, const std::string& n,
                                                      size_t limit) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> cur{a};
    std::function<void(const std::string&)> walk = [&](const std::string& v) {
        if (out.size() >= limit) throw std::length_error("too many paths");
        if (v == n) {
            out.push_back(cur);
            return;
        }
        for (const auto& c : g.children(v)) {
            cur.push_back(c);
            walk(c);
            cur.pop_back();
        }
    };
    walk(a);
    return out;
}

void validate(const NetworkSpec& net) {
    std::set<std::string> vids;
    for (size_t i = 0; i < net.vertices.size(); ++i) {
        const auto& v = net.vertices[i];
        std::string p = "/vertices/" + std::to_string(i);
        if (!vids.insert(v.id).second) throw SpecError(p, "duplicate vertex " + v.id);
        if (v.tech_min < 0 || v.tech_max < v.tech_min) throw SpecError(p + "/tech", "need 0 <= min <= max");
        if (v.service)
            if (auto rl = std::get_if<RateLatency>(&*v.service))
                if (rl->rate <= 0 || rl->latency < 0) throw SpecError(p + "/service", "rate-latency needs rate > 0, latency >= 0");
    }
    std::set<std::pair<std::string, std::string>> eset;
    for (size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        std::string p = "/edges/" + std::to_string(i);
        if (!vids.count(e.from) || !vids.count(e.to)) throw SpecError(p, "edge endpoint is not a vertex");
        eset.insert({e.from, e.to});
    }

    std::set<std::string> fids;
    for (size_t i = 0; i < net.flows.size(); ++i) {
        const auto& f = net.flows[i];
        std::string p = "/flows/" + std::to_string(i);
        if (!fids.insert(f.id).second) throw SpecError(p + "/id", "duplicate flow " + f.id);
        if (!vids.count(f.source)) throw SpecError(p + "/source", "unknown vertex " + f.source);
        if (!(f.lmin > 0) || f.lmax < f.lmin) throw SpecError(p + "/lmin", "need 0 < lmin <= lmax");
        for (size_t j = 0; j < f.edges.size(); ++j)
            if (!eset.count(f.edges[j])) throw SpecError(p + "/edges/" + std::to_string(j), "not a network edge");
        std::optional<FlowGraph> g;
        try {
            g.emplace(f);
        } catch (const std::invalid_argument& e) {
            throw SpecError(p + "/edges", e.what());
        }
        for (size_t j = 0; j < f.destinations.size(); ++j)
            if (!g->contains(f.destinations[j]))
                throw SpecError(p + "/destinations/" + std::to_string(j), "destination not reachable");
        for (const auto& [d, _] : f.deadline)
            if (std::find(f.destinations.begin(), f.destinations.end(), d) == f.destinations.end())
                throw SpecError(p + "/deadline", "deadline for non-destination " + d);
        try {
            ep_vertices(*g, net.pef_vertices(f.id));
        } catch (const std::invalid_argument& e) {
            throw SpecError(p, e.what());
        }
    }

    // Pipeline order per vertex: PEFs, then POFs, then REGs.
    std::map<std::string, int> stage;
    std::set<std::pair<std::string, std::string>> seen_pof, seen_reg, seen_pef;
    for (size_t i = 0; i < net.placements.size(); ++i) {
        const auto& pl = net.placements[i];
        std::string p = "/placements/" + std::to_string(i);
        if (!vids.count(pl.vertex)) throw SpecError(p + "/vertex", "unknown vertex " + pl.vertex);
        int k = static_cast<int>(pl.kind);
        if (stage[pl.vertex] > k) throw SpecError(p, "pipeline order at " + pl.vertex + " must be PEF, POF, REG");
        stage[pl.vertex] = k;
        if (pl.flows.empty()) throw SpecError(p + "/flows", "empty flow set");

        for (size_t j = 0; j < pl.flows.size(); ++j) {
            const auto& fid = pl.flows[j];
            std::string fp = p + "/flows/" + std::to_string(j);
            if (!fids.count(fid)) throw SpecError(fp, "unknown flow " + fid);
            const auto& f = net.flow(fid);
            FlowGraph g(f);
            if (!g.contains(pl.vertex)) throw SpecError(fp, "flow " + fid + " does not cross " + pl.vertex);
            auto key = std::make_pair(fid, pl.vertex);
            auto& seen = pl.kind == FunctionKind::PEF ? seen_pef : pl.kind == FunctionKind::POF ? seen_pof : seen_reg;
            if (!seen.insert(key).second) throw SpecError(fp, "flow " + fid + " placed twice in the same function kind");

            auto pefs = net.pef_vertices(fid);
            auto ep = ep_vertices(g, pefs);
            if (pl.kind == FunctionKind::PEF) {
                const auto& ps = g.parents(pl.vertex);
                bool merge = ps.size() >= 2;
                for (const auto& q : ps) merge = merge || ep.count(q);
                if (!merge) throw SpecError(fp, "PEF for " + fid + " at " + pl.vertex + " is not at or after a merge");
                continue;
            }
            if (ep.count(pl.vertex)) throw SpecError(fp, pl.vertex + " is an EP-vertex of " + fid);
            if (!vids.count(pl.reference)) throw SpecError(p + "/reference", "unknown vertex " + pl.reference);
            auto da = diamond_ancestors(g, ep, pl.vertex);
            if (!da.count(pl.reference) || pl.reference == pl.vertex)
                throw SpecError(p + "/reference",
                                pl.reference + " is not a diamond ancestor of " + pl.vertex + " for " + fid);
            if (pl.kind == FunctionKind::REG) {
                if (!pl.sigma.count(fid)) throw SpecError(p + "/sigma", "no shaping curve for " + fid);
                if (auto pof = net.pof(fid, pl.vertex); pof && pof->reference != pl.reference)
                    throw SpecError(p + "/reference", "POF and REG at " + pl.vertex + " use different references");
            }
        }
        if (pl.kind == FunctionKind::POF && pl.timeout < 0) throw SpecError(p + "/timeout", "negative timeout");
    }
}

}  // namespace redcalc
