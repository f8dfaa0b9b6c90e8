#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace oracle {

using namespace redcalc;

std::string scenario_path(const std::string& rel) { return std::string(REDCALC_SCENARIO_DIR) + "/" + rel; }

Q at_zero_plus(const ConcaveCurve& c) { return c.burst0(); }

std::vector<Q> sample_times(const std::vector<ConcaveCurve>& curves, const Q& horizon, int steps) {
    std::vector<Q> ts{Q(0)};
    for (const auto& c : curves)
        for (const auto& b : c.breakpoints()) ts.push_back(b);
    for (int i = 1; i <= steps; ++i) ts.push_back(horizon * i / steps);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

Q inf_convolution(const ConcaveCurve& a, const ConcaveCurve& b, const Q& t, int steps) {
    Q best = eval(b, t);  // s = 0
    for (int i = 1; i <= steps; ++i) {
        Q s = t * i / steps;
        best = q_min(best, eval(a, s) + eval(b, t - s));
    }
    return best;
}

Q deconvolution_by_delay(const ConcaveCurve& a, const Q& D, const Q& t) {
    // delta_D(u) is 0 up to D and infinite after, so the sup runs over u <= D
    // and a is non-decreasing.
    Q best = eval(a, t);
    for (int i = 1; i <= 16; ++i) best = q_max(best, eval(a, t + D * i / 16));
    return best;
}

Ext pseudo_inverse(const ConcaveCurve& a, const Q& y) {
    if (y <= 0) return Ext(0);
    if (at_zero_plus(a) >= y) return Ext(0);
    // a is piecewise linear; find the first segment of the lower envelope reaching y.
    std::vector<Q> pts{Q(0)};
    for (const auto& b : a.breakpoints()) pts.push_back(b);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Q lo = pts[i], hi = pts[i + 1];
        Q vlo = i == 0 ? at_zero_plus(a) : eval(a, lo);
        Q vhi = eval(a, hi);
        if (vhi >= y) return Ext(lo + (y - vlo) * (hi - lo) / (vhi - vlo));
    }
    const auto& tail = a.tail();
    if (tail.rate == 0) return Ext::infinity();
    Q last = pts.back();
    Q vlast = pts.size() == 1 ? at_zero_plus(a) : eval(a, last);
    return Ext(last + (y - vlast) / tail.rate);
}

Ext h_dev_rate_latency(const ConcaveCurve& a, const Q& rate, const Q& latency) {
    if (a.tail().rate > rate) return Ext::infinity();
    bool zero = a.segments().size() == 1 && a.tail().rate == 0 && a.tail().burst == 0;
    if (zero) return Ext(0);
    // For t > 0 the delay of the bit arriving at t is latency + a(t)/rate - t.
    Q best = latency + at_zero_plus(a) / rate;
    for (const auto& t : a.breakpoints()) best = q_max(best, latency + eval(a, t) / rate - t);
    return Ext(best);
}

std::vector<std::vector<std::string>> all_paths(const std::vector<std::pair<std::string, std::string>>& edges,
                                                const std::string& from, const std::string& to) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> cur{from};
    std::function<void(const std::string&)> walk = [&](const std::string& v) {
        if (v == to) {
            out.push_back(cur);
            return;
        }
        for (const auto& [a, b] : edges)
            if (a == v) {
                cur.push_back(b);
                walk(b);
                cur.pop_back();
            }
    };
    walk(from);
    return out;
}

std::set<std::string> dominators(const std::vector<std::pair<std::string, std::string>>& edges,
                                 const std::string& source, const std::string& n) {
    auto paths = all_paths(edges, source, n);
    std::set<std::string> common(paths.front().begin(), paths.front().end());
    for (const auto& p : paths) {
        std::set<std::string> s(p.begin(), p.end()), keep;
        std::set_intersection(common.begin(), common.end(), s.begin(), s.end(), std::inserter(keep, keep.begin()));
        common = keep;
    }
    return common;
}

bool compliant(const std::vector<TraceEvent>& events, const ConcaveCurve& c) {
    for (size_t i = 0; i < events.size(); ++i)
        for (size_t j = 0; j < events.size(); ++j) {
            const Q& s = events[i].time;
            const Q& t = events[j].time;
            if (t < s) continue;
            Q data = 0;
            for (const auto& e : events)
                if (e.time >= s && e.time <= t) data += e.size;
            Q bound = t == s ? at_zero_plus(c) : eval(c, t - s);
            if (data > bound) return false;
        }
    return true;
}

Q rto(const std::vector<TraceEvent>& out, const std::vector<TraceEvent>& ref) {
    std::map<long, Q> emitted;
    for (const auto& e : ref) emitted.emplace(e.unit, e.time);
    // Reference order: emission time then unit id.
    auto before = [&](long a, long b) {
        if (emitted.at(a) != emitted.at(b)) return emitted.at(a) < emitted.at(b);
        return a < b;
    };
    Q worst = 0;
    for (const auto& k : out)
        for (const auto& j : out)
            if (before(k.unit, j.unit) && j.time < k.time) worst = q_max(worst, k.time - j.time);
    return worst;
}

Q data_at(const std::vector<TraceEvent>& events, const Q& t) {
    Q sum = 0;
    for (const auto& e : events)
        if (e.time == t) sum += e.size;
    return sum;
}

Q random_q(std::mt19937_64& rng, long num_max, long den_max, long num_min) {
    std::uniform_int_distribution<long> num(num_min, num_max), den(1, den_max);
    Q v(num(rng), den(rng));
    v.canonicalize();
    return v;
}

ConcaveCurve random_curve(std::mt19937_64& rng, int max_segments) {
    std::uniform_int_distribution<int> n(1, max_segments);
    std::vector<TokenBucket> segs;
    int k = n(rng);
    for (int i = 0; i < k; ++i) segs.push_back({random_q(rng, 20, 4), random_q(rng, 40, 4)});
    return ConcaveCurve(segs);
}

NetworkSpec random_network(std::mt19937_64& rng) {
    NetworkSpec net;
    std::uniform_int_distribution<int> nv(8, 12);
    int n = nv(rng);
    auto name = [](int i) { return "v" + std::to_string(i); };
    for (int i = 0; i < n; ++i) {
        Vertex v;
        v.id = name(i);
        v.tech_max = random_q(rng, 2, 2);
        v.service = RateLatency{random_q(rng, 40, 2, 20), random_q(rng, 3, 2)};
        net.vertices.push_back(v);
    }
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::set<std::pair<std::string, std::string>> edges;
    auto add_flow = [&](FlowSpec f) {
        for (const auto& e : f.edges) edges.insert(e);
        net.flows.push_back(std::move(f));
    };
    std::vector<std::pair<int, int>> merges;  // (merge vertex, tail vertex or -1)
    int redundant = 1 + pick(rng) % 2;
    for (int k = 0; k < redundant; ++k) {
        std::vector<int> idx;
        while (idx.size() < 5) {
            int x = pick(rng);
            if (std::find(idx.begin(), idx.end(), x) == idx.end()) idx.push_back(x);
        }
        std::sort(idx.begin(), idx.end());
        int a = idx[0], b = idx[1], c = idx[2], m = idx[3], e = idx[4];
        FlowSpec f;
        f.id = "r" + std::to_string(k);
        f.source = name(a);
        f.edges = {{name(a), name(b)}, {name(a), name(c)}, {name(b), name(m)}, {name(c), name(m)}, {name(m), name(e)}};
        f.destinations = {name(e)};
        f.arrival = ConcaveCurve::token_bucket(random_q(rng, 2, 2, 1), random_q(rng, 8, 2, 1));
        add_flow(f);
        FunctionPlacement p;
        p.kind = FunctionKind::PEF;
        p.vertex = name(m);
        p.flows = {f.id};
        net.placements.push_back(p);
        merges.push_back({m, e});
    }
    int plain = 2 + pick(rng) % 3;
    for (int k = 0; k < plain; ++k) {
        // Half of the plain flows go through a merge vertex and its successor.
        std::vector<int> hops;
        if (k % 2 == 0) {
            auto [m, e] = merges[k / 2 % merges.size()];
            for (int i = 0; i < m; ++i)
                if (pick(rng) % 3 == 0) hops.push_back(i);
            if (!hops.empty()) hops = {hops.back()};
            hops.push_back(m);
            hops.push_back(e);
        } else {
            std::set<int> s;
            int len = 2 + pick(rng) % 3;
            while (static_cast<int>(s.size()) < len) s.insert(pick(rng));
            hops.assign(s.begin(), s.end());
        }
        FlowSpec f;
        f.id = "p" + std::to_string(k);
        f.source = name(hops.front());
        for (size_t i = 0; i + 1 < hops.size(); ++i) f.edges.push_back({name(hops[i]), name(hops[i + 1])});
        f.destinations = {name(hops.back())};
        f.arrival = ConcaveCurve::token_bucket(random_q(rng, 2, 2, 1), random_q(rng, 8, 2, 1));
        add_flow(f);
    }
    for (const auto& [a, b] : edges) net.edges.push_back({a, b, false});
    validate(net);
    return net;
}

}  // namespace oracle
