#include "redcalc/sim.hpp"

#include <algorithm>
#include <set>

namespace redcalc {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Generated: return "generated";
        case EventKind::BranchExit: return "branch_exit";
        case EventKind::PefExit: return "pef_exit";
        case EventKind::PofExit: return "pof_exit";
        case EventKind::RegExit: return "reg_exit";
    }
    return "?";
}

const PathAction& PathSchedule::action(long unit) const {
    auto it = actions.find(unit);
    if (it != actions.end()) return it->second;
    if (fallback) return *fallback;
    throw ScenarioError("path " + name + " has no action for unit " + std::to_string(unit));
}

std::vector<TraceEvent> Trace::at(const std::string& point) const {
    std::vector<TraceEvent> out;
    for (const auto& e : events)
        if (e.point == point) out.push_back(e);
    return out;
}

namespace {

struct Item {
    Q time;
    const DataUnit* unit;
    size_t rank;  // position in the reference order
};

// Token-bucket state for a concave shaping curve (min of buckets).
class Shaper {
public:
    explicit Shaper(const ConcaveCurve& sigma) : sigma_(sigma) {
        for (const auto& s : sigma.segments()) tokens_.push_back(s.burst);
    }

    // Earliest time >= t at which a packet of the given size conforms.
    Q eligible(const Q& t, const Q& size) const {
        Q when = t;
        const auto& segs = sigma_.segments();
        for (size_t i = 0; i < segs.size(); ++i) {
            if (size > segs[i].burst) throw ScenarioError("packet larger than the shaping burst");
            Q have = level(i, t);
            if (have >= size) continue;
            if (segs[i].rate == 0) throw ScenarioError("shaping curve never admits the packet");
            when = q_max(when, t + (size - have) / segs[i].rate);
        }
        return when;
    }

    void consume(const Q& t, const Q& size) {
        for (size_t i = 0; i < tokens_.size(); ++i) tokens_[i] = level(i, t) - size;
        last_ = t;
        started_ = true;
    }

private:
    Q level(size_t i, const Q& t) const {
        const auto& s = sigma_.segments()[i];
        if (!started_) return s.burst;
        return q_min(s.burst, tokens_[i] + s.rate * (t - last_));
    }

    ConcaveCurve sigma_;
    std::vector<Q> tokens_;
    Q last_;
    bool started_ = false;
};

std::vector<Item> run_pef(const std::vector<Item>& in) {
    std::set<long> seen;
    std::vector<Item> out;
    for (const auto& x : in)
        if (seen.insert(x.unit->id).second) out.push_back(x);
    return out;
}

std::vector<Item> run_pof(const std::vector<Item>& in, const Stage& st, const std::vector<const DataUnit*>& units) {
    // Ordering domains: the aggregate, or one per flow. Positions follow the
    // reference order of every emitted unit, so a unit lost on all paths is
    // waited for until the timeout of a successor expires.
    auto domain = [&](const DataUnit* u) { return st.per_flow ? u->flow : std::string(); };
    std::map<std::string, size_t> domain_size;
    std::vector<size_t> pos_in_domain(units.size());
    for (size_t k = 0; k < units.size(); ++k) pos_in_domain[k] = domain_size[domain(units[k])]++;

    struct Domain {
        size_t expected = 0;
        std::map<size_t, std::pair<Item, Ext>> buffer;  // position -> (item, deadline)
    };
    std::map<std::string, Domain> doms;
    std::set<size_t> released;
    std::vector<Item> out;

    auto release = [&](Item x, const Q& t) {
        x.time = t;
        released.insert(x.rank);
        out.push_back(x);
    };
    auto drain = [&](Domain& d, const Q& t) {
        while (!d.buffer.empty() && d.buffer.begin()->first == d.expected) {
            release(d.buffer.begin()->second.first, t);
            d.buffer.erase(d.buffer.begin());
            ++d.expected;
        }
    };
    size_t i = 0;
    for (;;) {
        // Next timeout among buffered units.
        std::optional<Q> next_to;
        std::string to_dom;
        size_t to_pos = 0;
        for (auto& [name, d] : doms)
            for (auto& [p, entry] : d.buffer)
                if (entry.second.finite() && (!next_to || entry.second.v < *next_to)) {
                    next_to = entry.second.v;
                    to_dom = name;
                    to_pos = p;
                }
        bool have_arrival = i < in.size();
        if (!have_arrival && !next_to) break;
        if (have_arrival && (!next_to || in[i].time <= *next_to)) {
            const Item& x = in[i++];
            if (released.count(x.rank)) {
                release(x, x.time);  // duplicate of an already released unit
                continue;
            }
            Domain& d = doms[domain(x.unit)];
            size_t p = pos_in_domain.at(x.rank);
            if (p < d.expected) {
                release(x, x.time);
            } else if (p == d.expected) {
                release(x, x.time);
                ++d.expected;
                drain(d, x.time);
            } else if (!d.buffer.count(p)) {
                Ext deadline = st.timeout.finite() ? Ext(Q(x.time + st.timeout.v)) : Ext::infinity();
                d.buffer.emplace(p, std::make_pair(x, deadline));
            }
        } else {
            Domain& d = doms[to_dom];
            Q t = *next_to;
            while (!d.buffer.empty() && d.buffer.begin()->first <= to_pos) {
                release(d.buffer.begin()->second.first, t);
                d.buffer.erase(d.buffer.begin());
            }
            d.expected = to_pos + 1;
            drain(d, t);
        }
    }
    // With an infinite timeout, units behind a lost predecessor stay buffered.
    return out;
}

std::vector<Item> run_pfr(const std::vector<Item>& in, const Stage& st) {
    std::map<std::string, Shaper> shapers;
    std::map<std::string, Q> last;
    std::vector<std::pair<size_t, Item>> out;
    for (size_t k = 0; k < in.size(); ++k) {
        const Item& x = in[k];
        const auto& f = x.unit->flow;
        auto sg = st.sigma.find(f);
        if (sg == st.sigma.end()) throw ScenarioError("no shaping curve for flow " + f);
        auto it = shapers.try_emplace(f, sg->second).first;
        Q t = x.time;
        if (auto l = last.find(f); l != last.end()) t = q_max(t, l->second);
        Q when = it->second.eligible(t, x.unit->size);
        it->second.consume(when, x.unit->size);
        last[f] = when;
        Item y = x;
        y.time = when;
        out.push_back({k, y});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second.time < b.second.time; });
    std::vector<Item> res;
    for (auto& [k, y] : out) res.push_back(y);
    return res;
}

std::vector<Item> run_ir(const std::vector<Item>& in, const Stage& st) {
    std::map<std::string, Shaper> shapers;
    std::vector<Item> out;
    Q last;
    bool any = false;
    for (const auto& x : in) {
        const auto& f = x.unit->flow;
        auto sg = st.sigma.find(f);
        if (sg == st.sigma.end()) throw ScenarioError("no shaping curve for flow " + f);
        auto it = shapers.try_emplace(f, sg->second).first;
        Q t = any ? q_max(x.time, last) : x.time;
        Q when = it->second.eligible(t, x.unit->size);
        it->second.consume(when, x.unit->size);
        last = when;
        any = true;
        Item y = x;
        y.time = when;
        out.push_back(y);
    }
    return out;
}

}  // namespace

Trace run_scenario(const Scenario& s) {
    Trace tr;
    std::vector<const DataUnit*> units;
    std::set<long> ids;
    for (const auto& u : s.units) {
        if (!ids.insert(u.id).second) throw ScenarioError("duplicate unit id " + std::to_string(u.id));
        if (u.size < 0 || (u.size == 0 && !s.zero_size_units))
            throw ScenarioError("unit " + std::to_string(u.id) + " has a non-positive size");
        units.push_back(&u);
    }
    std::stable_sort(units.begin(), units.end(), [](const DataUnit* a, const DataUnit* b) {
        if (a->time != b->time) return a->time < b->time;
        return a->id < b->id;
    });
    if (s.zero_size_units) {
        for (const auto* u : units)
            if (u->size == 0) {
                tr.warnings.push_back("scenario contains zero-size data units");
                break;
            }
    }

    tr.points.push_back("generated");
    std::vector<Item> arrivals;
    for (size_t k = 0; k < units.size(); ++k)
        tr.events.push_back({units[k]->time, EventKind::Generated, "generated", units[k]->id, units[k]->flow, units[k]->size});

    for (size_t p = 0; p < s.paths.size(); ++p) {
        const auto& path = s.paths[p];
        if (path.d < 0 || path.D < path.d) throw ScenarioError("path " + path.name + " has invalid bounds");
        std::string point = "branch:" + path.name;
        tr.points.push_back(point);
        std::vector<Item> exits;
        std::optional<Q> last_exit;
        for (size_t k = 0; k < units.size(); ++k) {
            const auto& a = path.action(units[k]->id);
            if (a.drop) continue;
            if (a.delay < path.d || a.delay > path.D)
                throw ScenarioError("path " + path.name + " delays unit " + std::to_string(units[k]->id) + " by " +
                                    to_string(a.delay) + ", outside [" + to_string(path.d) + ", " + to_string(path.D) + "]");
            Q t = units[k]->time + a.delay;
            if (path.fifo && last_exit && t < *last_exit)
                throw ScenarioError("path " + path.name + " is declared FIFO but reorders unit " +
                                    std::to_string(units[k]->id));
            last_exit = t;
            exits.push_back({t, units[k], k});
        }
        std::stable_sort(exits.begin(), exits.end(), [](const Item& a, const Item& b) { return a.time < b.time; });
        for (const auto& x : exits) {
            tr.events.push_back({x.time, EventKind::BranchExit, point, x.unit->id, x.unit->flow, x.unit->size});
            arrivals.push_back(x);
        }
    }
    // Simultaneous arrivals: path declaration order, then reference order.
    std::stable_sort(arrivals.begin(), arrivals.end(), [](const Item& a, const Item& b) { return a.time < b.time; });

    std::map<StageKind, int> count;
    std::vector<Item> stream = arrivals;
    for (const auto& st : s.pipeline) {
        std::string base;
        EventKind kind = EventKind::PefExit;
        switch (st.kind) {
            case StageKind::PEF:
                stream = run_pef(stream);
                base = "pef";
                kind = EventKind::PefExit;
                break;
            case StageKind::POF:
                stream = run_pof(stream, st, units);
                base = "pof";
                kind = EventKind::PofExit;
                break;
            case StageKind::PFR:
                stream = run_pfr(stream, st);
                base = "reg";
                kind = EventKind::RegExit;
                break;
            case StageKind::IR:
                stream = run_ir(stream, st);
                base = "reg";
                kind = EventKind::RegExit;
                break;
        }
        int n = ++count[st.kind == StageKind::IR ? StageKind::PFR : st.kind];
        std::string point = n == 1 ? base : base + "." + std::to_string(n);
        tr.points.push_back(point);
        for (const auto& x : stream) tr.events.push_back({x.time, kind, point, x.unit->id, x.unit->flow, x.unit->size});
    }
    return tr;
}

ComplianceResult check_compliance(const Trace& t, const std::string& point, const ConcaveCurve& curve,
                                  const std::string& flow) {
    std::map<Q, Q> per_time;
    for (const auto& e : t.events)
        if (e.point == point && (flow.empty() || e.flow == flow)) per_time[e.time] += e.size;
    std::vector<Q> times, cum;
    Q acc = 0;
    for (const auto& [tm, sz] : per_time) {
        times.push_back(tm);
        acc += sz;
        cum.push_back(acc);
    }
    for (size_t j = 0; j < times.size(); ++j)
        for (size_t i = 0; i <= j; ++i) {
            Q data = cum[j] - (i ? cum[i - 1] : Q(0));
            Q len = times[j] - times[i];
            Q bound = len == 0 ? curve.burst0() : eval(curve, len);
            if (data > bound) return {false, times[i], times[j], data, bound};
        }
    return {};
}

ReorderingMeasure measure_reordering(const Trace& t, const std::string& point, const std::string& reference_point,
                                     const std::string& flow) {
    std::vector<long> seq;
    std::set<long> in_seq;
    for (const auto& e : t.events)
        if (e.point == reference_point && (flow.empty() || e.flow == flow) && in_seq.insert(e.unit).second)
            seq.push_back(e.unit);
    std::map<long, std::pair<Q, Q>> seen;  // unit -> (time, size)
    for (const auto& e : t.events)
        if (e.point == point && in_seq.count(e.unit)) seen.try_emplace(e.unit, e.time, e.size);

    std::vector<std::pair<Q, Q>> ev;  // in reference order, lost units skipped
    std::vector<long> ev_unit;
    for (long u : seq)
        if (auto it = seen.find(u); it != seen.end()) {
            ev.push_back(it->second);
            ev_unit.push_back(u);
        }

    ReorderingMeasure m;
    std::optional<Q> min_later;
    for (size_t k = ev.size(); k-- > 0;) {
        if (min_later && ev[k].first - *min_later > m.rto) {
            m.rto = ev[k].first - *min_later;
            m.late_unit = ev_unit[k];
        }
        min_later = min_later ? q_min(*min_later, ev[k].first) : ev[k].first;
    }
    for (size_t k = 0; k < ev.size(); ++k) {
        Q sum = 0;
        for (size_t j = k + 1; j < ev.size(); ++j)
            if (ev[j].first < ev[k].first) sum += ev[j].second;
        m.rbo = q_max(m.rbo, sum);
    }
    return m;
}

std::map<long, Q> unit_delays(const Trace& t, const std::string& from, const std::string& to) {
    std::map<long, Q> start, out;
    for (const auto& e : t.events)
        if (e.point == from) start.try_emplace(e.unit, e.time);
    for (const auto& e : t.events)
        if (e.point == to && !out.count(e.unit))
            if (auto it = start.find(e.unit); it != start.end()) out.emplace(e.unit, e.time - it->second);
    return out;
}

}  // namespace redcalc
