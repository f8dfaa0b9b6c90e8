#include <sstream>

#include "redcalc/tfa.hpp"

namespace redcalc {

namespace {

DelayInterval interval_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw SpecError(path, "expected [lower, upper]");
    return {q_from_json(j[0], path + "/0"), parse_ext(j[1].get<std::string>())};
}

json verdict_to_json(const RegulatorVerdict& v) {
    json j;
    if (v.kind == VerdictKind::Bounded) {
        j["kind"] = "bounded";
        j["bounds"] = to_json(v.bounds);
    } else {
        j["kind"] = "unbounded";
        j["reason"] = v.reason;
    }
    if (v.rto_bound) j["rto_bound"] = to_string(*v.rto_bound);
    if (v.q_min) j["q_min"] = *v.q_min;
    return j;
}

RegulatorVerdict verdict_from_json(const json& j, const std::string& path) {
    RegulatorVerdict v;
    if (j.at("kind") == "bounded") {
        v = RegulatorVerdict::bounded(interval_from_json(j.at("bounds"), path + "/bounds"));
    } else {
        v = RegulatorVerdict::unbounded(j.at("reason").get<std::string>());
    }
    if (j.contains("rto_bound")) v.rto_bound = parse_ext(j["rto_bound"].get<std::string>());
    if (j.contains("q_min")) v.q_min = j["q_min"].get<long>();
    return v;
}

}  // namespace

json to_json(const AnalysisReport& r) {
    json j;
    j["model"] = to_string(r.model);
    j["lossless"] = r.lossless ? json(*r.lossless) : json(nullptr);
    j["convergence"] = to_string(r.convergence);
    j["iterations"] = r.iterations;
    j["diagnostics"] = r.diagnostics;

    j["vertices"] = json::array();
    for (const auto& v : r.vertices)
        j["vertices"].push_back({{"vertex", v.vertex}, {"delay", to_json(v.delay)}, {"aggregate", to_json(v.aggregate)}});

    j["ete"] = json::array();
    for (const auto& e : r.ete) {
        json je{{"flow", e.flow},
                {"destination", e.destination},
                {"lower", to_string(e.bounds.lo)},
                {"upper", to_string(e.bounds.hi)},
                {"verdict", e.verdict}};
        if (e.deadline) je["deadline"] = to_string(*e.deadline);
        j["ete"].push_back(je);
    }

    j["pefs"] = json::array();
    for (const auto& p : r.pefs) {
        json reo = json::array();
        for (const auto& x : p.reordering)
            reo.push_back({{"reference", x.reference}, {"rto", to_string(x.rto)}, {"rbo", to_string(x.rbo)}});
        j["pefs"].push_back({{"vertex", p.vertex},
                             {"flow", p.flow},
                             {"input", to_json(p.input)},
                             {"tight", to_json(p.tight)},
                             {"intuitive", to_json(p.intuitive)},
                             {"reordering", reo}});
    }

    j["pofs"] = json::array();
    for (const auto& p : r.pofs)
        j["pofs"].push_back({{"vertex", p.vertex},
                             {"flow", p.flow},
                             {"reference", p.reference},
                             {"timeout", to_string(p.timeout)},
                             {"upstream", to_json(p.upstream)},
                             {"rto", to_string(p.rto)},
                             {"rbo", to_string(p.rbo)},
                             {"timeout_sufficient", p.timeout_sufficient},
                             {"output_lossless", to_json(p.output_lossless)},
                             {"output_lossy", to_json(p.output_lossy)}});

    j["regs"] = json::array();
    for (const auto& g : r.regs)
        j["regs"].push_back({{"vertex", g.vertex},
                             {"flow", g.flow},
                             {"type", g.type},
                             {"reference", g.reference},
                             {"upstream", to_json(g.upstream)},
                             {"verdict", verdict_to_json(g.verdict)}});

    json fc = json::object();
    for (const auto& [f, m] : r.flow_curves) {
        json jm = json::object();
        for (const auto& [v, c] : m) jm[v] = to_json(c);
        fc[f] = jm;
    }
    j["flow_curves"] = fc;
    json ph = json::object();
    for (const auto& [f, m] : r.per_hop) {
        json jm = json::object();
        for (const auto& [v, d] : m) jm[v] = to_json(d);
        ph[f] = jm;
    }
    j["per_hop"] = ph;
    return j;
}

AnalysisReport report_from_json(const json& j) {
    AnalysisReport r;
    r.model = j.at("model") == "tight" ? PefModel::Tight : PefModel::Intuitive;
    if (!j.at("lossless").is_null()) r.lossless = j["lossless"].get<bool>();
    std::string conv = j.at("convergence");
    r.convergence = conv == "converged" ? Convergence::Converged
                    : conv == "diverged" ? Convergence::Diverged
                                         : Convergence::IterationCap;
    r.iterations = j.at("iterations").get<size_t>();
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();

    for (const auto& v : j.at("vertices"))
        r.vertices.push_back({v.at("vertex"), interval_from_json(v.at("delay"), "/vertices"),
                              curve_from_json(v.at("aggregate"), "/vertices")});
    for (const auto& e : j.at("ete")) {
        EteReport x;
        x.flow = e.at("flow");
        x.destination = e.at("destination");
        x.bounds = {parse_q(e.at("lower").get<std::string>()), parse_ext(e.at("upper").get<std::string>())};
        if (e.contains("deadline")) x.deadline = parse_q(e["deadline"].get<std::string>());
        x.verdict = e.at("verdict");
        r.ete.push_back(x);
    }
    for (const auto& p : j.at("pefs")) {
        PefReport x;
        x.vertex = p.at("vertex");
        x.flow = p.at("flow");
        x.input = curve_from_json(p.at("input"), "/pefs");
        x.tight = curve_from_json(p.at("tight"), "/pefs");
        x.intuitive = curve_from_json(p.at("intuitive"), "/pefs");
        for (const auto& o : p.at("reordering"))
            x.reordering.push_back(
                {o.at("reference"), parse_q(o.at("rto").get<std::string>()), parse_ext(o.at("rbo").get<std::string>())});
        r.pefs.push_back(x);
    }
    for (const auto& p : j.at("pofs")) {
        PofReport x;
        x.vertex = p.at("vertex");
        x.flow = p.at("flow");
        x.reference = p.at("reference");
        x.timeout = parse_q(p.at("timeout").get<std::string>());
        x.upstream = interval_from_json(p.at("upstream"), "/pofs");
        x.rto = parse_q(p.at("rto").get<std::string>());
        x.rbo = parse_ext(p.at("rbo").get<std::string>());
        x.timeout_sufficient = p.at("timeout_sufficient");
        x.output_lossless = curve_from_json(p.at("output_lossless"), "/pofs");
        x.output_lossy = curve_from_json(p.at("output_lossy"), "/pofs");
        r.pofs.push_back(x);
    }
    for (const auto& g : j.at("regs")) {
        RegReport x;
        x.vertex = g.at("vertex");
        x.flow = g.at("flow");
        x.type = g.at("type");
        x.reference = g.at("reference");
        x.upstream = interval_from_json(g.at("upstream"), "/regs");
        x.verdict = verdict_from_json(g.at("verdict"), "/regs");
        r.regs.push_back(x);
    }
    for (const auto& [f, m] : j.at("flow_curves").items())
        for (const auto& [v, c] : m.items()) r.flow_curves[f].emplace(v, curve_from_json(c, "/flow_curves"));
    for (const auto& [f, m] : j.at("per_hop").items())
        for (const auto& [v, d] : m.items()) r.per_hop[f][v] = interval_from_json(d, "/per_hop");
    return r;
}

std::string to_csv(const AnalysisReport& r) {
    std::ostringstream os;
    os << "flow,destination,model,lower,upper,deadline,verdict\n";
    for (const auto& e : r.ete)
        os << e.flow << ',' << e.destination << ',' << to_string(r.model) << ',' << to_string(e.bounds.lo) << ','
           << to_string(e.bounds.hi) << ',' << (e.deadline ? to_string(*e.deadline) : "") << ',' << e.verdict << '\n';
    return os.str();
}

}  // namespace redcalc
