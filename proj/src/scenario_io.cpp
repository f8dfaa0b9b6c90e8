#include <filesystem>
#include <fstream>
#include <sstream>

#include "redcalc/sim.hpp"

namespace redcalc {

namespace {

Q num(const json& j, const std::string& path) {
    try {
        return q_from_json(j, path);
    } catch (const SpecError& e) {
        throw ScenarioError(e.what());
    }
}

Ext ext_num(const json& j, const std::string& path) {
    if (j.is_string() && j.get<std::string>() == "inf") return Ext::infinity();
    return Ext(num(j, path));
}

const json& need(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ScenarioError(path + ": missing member '" + key + "'");
    return *it;
}

PathAction action_from_json(const json& j, const std::string& path) {
    if (j.is_string() && j.get<std::string>() == "drop") return PathAction::dropped();
    if (j.is_object()) return PathAction::forward(num(need(j, "delay", path), path + "/delay"));
    return PathAction::forward(num(j, path));
}

json action_to_json(const PathAction& a) {
    if (a.drop) return "drop";
    return to_string(a.delay);
}

std::map<std::string, ConcaveCurve> sigma_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ScenarioError(path + ": expected an object keyed by flow id");
    std::map<std::string, ConcaveCurve> out;
    for (auto& [k, v] : j.items()) {
        try {
            out.emplace(k, curve_from_json(v, path + "/" + k));
        } catch (const SpecError& e) {
            throw ScenarioError(e.what());
        }
    }
    return out;
}

// "7" or an inclusive range "1-6".
std::pair<long, long> id_range(const std::string& key, const std::string& path) {
    try {
        auto dash = key.find('-', 1);
        if (dash == std::string::npos) {
            long v = std::stol(key);
            return {v, v};
        }
        return {std::stol(key.substr(0, dash)), std::stol(key.substr(dash + 1))};
    } catch (const std::exception&) {
        throw ScenarioError(path + ": bad unit id or range '" + key + "'");
    }
}

Scenario from_generator(const json& g, const std::string& path) {
    std::string type = need(g, "type", path).get<std::string>();
    auto get = [&](const char* k) { return num(need(g, k, path), path + "/" + k); };
    if (type == "tightness") {
        TightnessParams p{get("r"), get("b"), get("d1"), get("D1"), get("d2"), get("D2")};
        p.tail_units = g.value("tail_units", 4L);
        try {
            return gen_tightness_trajectory(p);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(path + ": " + e.what());
        }
    }
    if (type == "adversarial-ir") {
        AdversarialParams p{need(g, "q", path).get<long>(), get("r"), get("b"), get("d1"), get("D1"), get("d2"), get("D2")};
        p.periods = g.value("periods", 0L);
        try {
            return gen_adversarial_ir(p);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(path + ": " + e.what());
        }
    }
    throw ScenarioError(path + "/type: unknown generator '" + type + "'");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
    Scenario s;
    if (auto it = j.find("generator"); it != j.end()) s = from_generator(*it, "/generator");
    s.name = j.value("name", s.name);
    s.note = j.value("note", s.note);
    s.network = j.value("network", s.network);
    s.vertex = j.value("vertex", s.vertex);
    s.zero_size_units = j.value("zero_size_units", s.zero_size_units);
    if (j.contains("generator")) return s;

    if (auto it = j.find("units"); it != j.end()) {
        for (size_t i = 0; i < it->size(); ++i) {
            const json& u = (*it)[i];
            std::string p = "/units/" + std::to_string(i);
            s.units.push_back({need(u, "id", p).get<long>(), u.value("flow", std::string("f")),
                               num(need(u, "time", p), p + "/time"), u.contains("size") ? num(u["size"], p + "/size") : Q(1)});
        }
    }
    if (auto it = j.find("periodic"); it != j.end()) {
        for (size_t i = 0; i < it->size(); ++i) {
            const json& g = (*it)[i];
            std::string p = "/periodic/" + std::to_string(i);
            long first = g.value("first_id", 1L);
            long count = need(g, "count", p).get<long>();
            Q start = num(need(g, "start", p), p + "/start");
            Q period = num(need(g, "period", p), p + "/period");
            Q size = g.contains("size") ? num(g["size"], p + "/size") : Q(1);
            std::string flow = g.value("flow", std::string("f"));
            for (long k = 0; k < count; ++k) s.units.push_back({first + k, flow, start + k * period, size});
        }
    }

    const json& paths = need(j, "paths", "");
    for (size_t i = 0; i < paths.size(); ++i) {
        const json& pj = paths[i];
        std::string p = "/paths/" + std::to_string(i);
        PathSchedule ps;
        ps.name = need(pj, "name", p).get<std::string>();
        const json& b = need(pj, "bounds", p);
        if (!b.is_array() || b.size() != 2) throw ScenarioError(p + "/bounds: expected [d, D]");
        ps.d = num(b[0], p + "/bounds/0");
        ps.D = num(b[1], p + "/bounds/1");
        ps.fifo = pj.value("fifo", false);
        if (auto d = pj.find("default"); d != pj.end()) ps.fallback = action_from_json(*d, p + "/default");
        if (auto sc = pj.find("schedule"); sc != pj.end()) {
            for (auto& [k, v] : sc->items()) {
                auto [lo, hi] = id_range(k, p + "/schedule");
                for (long id = lo; id <= hi; ++id) ps.actions[id] = action_from_json(v, p + "/schedule/" + k);
            }
        }
        s.paths.push_back(std::move(ps));
    }

    if (auto it = j.find("pipeline"); it != j.end()) {
        for (size_t i = 0; i < it->size(); ++i) {
            const json& st = (*it)[i];
            std::string p = "/pipeline/" + std::to_string(i);
            std::string kind = need(st, "kind", p).get<std::string>();
            Stage g;
            if (kind == "PEF") {
                g.kind = StageKind::PEF;
            } else if (kind == "POF") {
                g.kind = StageKind::POF;
                g.timeout = ext_num(need(st, "timeout", p), p + "/timeout");
                g.per_flow = st.value("per_flow", false);
            } else if (kind == "PFR" || kind == "IR") {
                g.kind = kind == "PFR" ? StageKind::PFR : StageKind::IR;
                g.sigma = sigma_from_json(need(st, "sigma", p), p + "/sigma");
            } else {
                throw ScenarioError(p + "/kind: unknown stage '" + kind + "'");
            }
            s.pipeline.push_back(std::move(g));
        }
    }
    return s;
}

json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (!s.note.empty()) j["note"] = s.note;
    if (!s.network.empty()) j["network"] = s.network;
    if (!s.vertex.empty()) j["vertex"] = s.vertex;
    j["zero_size_units"] = s.zero_size_units;
    j["units"] = json::array();
    for (const auto& u : s.units)
        j["units"].push_back({{"id", u.id}, {"flow", u.flow}, {"time", to_string(u.time)}, {"size", to_string(u.size)}});
    j["paths"] = json::array();
    for (const auto& p : s.paths) {
        json pj{{"name", p.name}, {"bounds", {to_string(p.d), to_string(p.D)}}, {"fifo", p.fifo}};
        if (p.fallback) pj["default"] = action_to_json(*p.fallback);
        json sc = json::object();
        for (const auto& [id, a] : p.actions) sc[std::to_string(id)] = action_to_json(a);
        pj["schedule"] = sc;
        j["paths"].push_back(pj);
    }
    j["pipeline"] = json::array();
    for (const auto& st : s.pipeline) {
        json sj;
        switch (st.kind) {
            case StageKind::PEF: sj["kind"] = "PEF"; break;
            case StageKind::POF:
                sj["kind"] = "POF";
                sj["timeout"] = to_string(st.timeout);
                sj["per_flow"] = st.per_flow;
                break;
            case StageKind::PFR:
            case StageKind::IR: {
                sj["kind"] = st.kind == StageKind::PFR ? "PFR" : "IR";
                json sg = json::object();
                for (const auto& [f, c] : st.sigma) sg[f] = to_json(c);
                sj["sigma"] = sg;
                break;
            }
        }
        j["pipeline"].push_back(sj);
    }
    return j;
}

Scenario load_scenario(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError("cannot open scenario file " + file);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(file + ": " + e.what());
    }
    try {
        Scenario s = scenario_from_json(j);
        if (!s.network.empty() && std::filesystem::path(s.network).is_relative())
            s.network = (std::filesystem::path(file).parent_path() / s.network).string();
        return s;
    } catch (const json::exception& e) {
        throw ScenarioError(file + ": " + e.what());
    }
}

std::string trace_csv(const Trace& t) {
    std::ostringstream os;
    os << "time,point,unit,flow,size\n";
    for (const auto& e : t.events)
        os << to_string(e.time) << ',' << e.point << ',' << e.unit << ',' << e.flow << ',' << to_string(e.size) << '\n';
    return os.str();
}

}  // namespace redcalc
