#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "redcalc/io.hpp"
#include "redcalc/topology.hpp"

using namespace redcalc;

namespace {

using Edges = std::vector<std::pair<std::string, std::string>>;

FlowSpec flow_of(const std::string& src, Edges edges, std::vector<std::string> dst) {
    FlowSpec f;
    f.id = "f";
    f.source = src;
    f.edges = std::move(edges);
    f.destinations = std::move(dst);
    f.arrival = ConcaveCurve::token_bucket(1, 1);
    return f;
}

// A->B, B->C, B->D, C->E, C->F, D->F, F->G
const Edges kBranching = {{"A", "B"}, {"B", "C"}, {"B", "D"}, {"C", "E"}, {"C", "F"}, {"D", "F"}, {"F", "G"}};

}  // namespace

TEST_CASE("EP vertices") {
    FlowGraph g(flow_of("A", kBranching, {"E", "G"}));
    CHECK(ep_vertices(g, {"G"}) == std::set<std::string>{"F"});
    CHECK(ep_vertices(g, {"F"}).empty());
    FlowGraph chain(flow_of("A", {{"A", "B"}, {"B", "C"}}, {"C"}));
    CHECK(ep_vertices(chain, {}).empty());
}

TEST_CASE("EP vertex with two children is rejected") {
    json j = json::parse(R"({
      "vertices": ["A","B","C","D","E","F"],
      "flows": [{"id":"f","source":"A","destinations":["E","F"],
                 "edges":[["A","B"],["A","C"],["B","D"],["C","D"],["D","E"],["D","F"]],
                 "arrival":{"rate":1,"burst":1}}],
      "placements": []})");
    CHECK_THROWS_AS(network_from_json(j), SpecError);
}

TEST_CASE("diamond ancestors") {
    FlowGraph toy(flow_of("B", {{"B", "C"}, {"B", "D"}, {"C", "F"}, {"D", "F"}}, {"F"}));
    auto ep = ep_vertices(toy, {"F"});
    CHECK(diamond_ancestors(toy, ep, "F").count("B") == 1);
    CHECK(diamond_ancestors(toy, ep, "B") == std::set<std::string>{"B"});

    FlowGraph g(flow_of("A", kBranching, {"E", "G"}));
    auto ep2 = ep_vertices(g, {"G"});
    auto da = diamond_ancestors(g, ep2, "F");
    da.erase("F");
    CHECK(da == std::set<std::string>{"A", "B"});
    auto brute = oracle::dominators(kBranching, "A", "F");
    brute.erase("F");
    CHECK(da == brute);
}

TEST_CASE("diamond ancestors equal brute-force dominators on random DAGs") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int n = 0; n < 200; ++n) {
        int nv = 4 + static_cast<int>(rng() % 9);
        Edges edges;
        auto name = [](int i) { return "v" + std::to_string(i); };
        for (int i = 0; i + 1 < nv; ++i) {
            // Every vertex reaches the next one so the source reaches everything.
            edges.push_back({name(i), name(i + 1)});
            for (int j = i + 2; j < nv; ++j)
                if (rng() % 4 == 0) edges.push_back({name(i), name(j)});
        }
        FlowGraph g(flow_of(name(0), edges, {name(nv - 1)}));
        // Every vertex gets a PEF so nothing is EP and validity is not at stake.
        std::set<std::string> pefs;
        for (int i = 0; i < nv; ++i) pefs.insert(name(i));
        auto ep = ep_vertices(g, pefs);
        CHECK(ep.empty());
        for (int i = 0; i < nv; ++i) {
            auto da = diamond_ancestors(g, ep, name(i));
            CHECK(da == oracle::dominators(edges, name(0), name(i)));
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("path delay bounds") {
    FlowGraph toy(flow_of("B", {{"B", "C"}, {"B", "D"}, {"C", "F"}, {"D", "F"}}, {"F"}));
    std::map<std::string, DelayInterval> hops{{"C", {0, Ext(1)}}, {"D", {6, Ext(7)}}};
    CHECK(path_delay_bounds(toy, "B", "F", hops) == DelayInterval{0, Ext(7)});

    FlowGraph chain(flow_of("A", {{"A", "X"}, {"X", "Y"}, {"Y", "Z"}}, {"Z"}));
    std::map<std::string, DelayInterval> ch{{"X", {1, Ext(2)}}, {"Y", {3, Ext(4)}}};
    CHECK(path_delay_bounds(chain, "A", "Z", ch) == DelayInterval{4, Ext(6)});

    Edges par{{"S", "P"}, {"S", "Q"}, {"S", "R"}, {"P", "T"}, {"Q", "T"}, {"R", "T"}};
    FlowGraph three(flow_of("S", par, {"T"}));
    std::map<std::string, DelayInterval> ph{{"P", {1, Ext(2)}}, {"Q", {2, Ext(5)}}, {"R", {0, Ext(9)}}};
    auto b = path_delay_bounds(three, "S", "T", ph);
    CHECK(b == DelayInterval{0, Ext(9)});
    Q lo = 100, hi = 0;
    for (const auto& p : oracle::all_paths(par, "S", "T")) {
        Q l = 0, h = 0;
        for (size_t i = 1; i + 1 < p.size(); ++i) {
            l += ph.at(p[i]).lo;
            h += ph.at(p[i]).hi.v;
        }
        lo = q_min(lo, l);
        hi = q_max(hi, h);
    }
    CHECK(b == DelayInterval{lo, Ext(hi)});

    std::map<std::string, DelayInterval> missing{{"X", {1, Ext(2)}}};
    CHECK_THROWS_AS(path_delay_bounds(chain, "A", "Z", missing), std::logic_error);
}

TEST_CASE("loader reports JSON pointers") {
    auto bad = [](const char* text) {
        try {
            network_from_json(json::parse(text));
        } catch (const SpecError& e) {
            return e.path();
        }
        return std::string("<none>");
    };
    CHECK(bad(R"({"vertices":["A"],"flows":[{"id":"f","source":"A","destinations":["A"],"edges":[],"arrival":{"rate":"x","burst":1}}]})") ==
          "/flows/0/arrival/rate");
    CHECK(bad(R"({"vertices":["A","B"],"edges":[["A","C"]]})") == "/edges/0");
    CHECK(bad(R"({"vertices":["A","B"],"flows":[{"id":"f","source":"A","destinations":["B"],"edges":[["A","B"],["B","A"]],"arrival":{"rate":1,"burst":1}}]})")
              .rfind("/flows/0", 0) == 0);
}

TEST_CASE("placement rules") {
    const char* base = R"({
      "vertices": ["B","C","D","F","G"],
      "flows": [{"id":"f","source":"B","destinations":["G"],
                 "edges":[["B","C"],["B","D"],["C","F"],["D","F"],["F","G"]],
                 "arrival":{"rate":1,"burst":1}}],
      "placements": []})";
    auto with = [&](const char* placements) {
        json j = json::parse(base);
        j["placements"] = json::parse(placements);
        return j;
    };
    CHECK_NOTHROW(network_from_json(with(R"([{"kind":"PEF","vertex":"F","flows":["f"]}])")));
    // PEF before the merge point.
    CHECK_THROWS_AS(network_from_json(with(R"([{"kind":"PEF","vertex":"C","flows":["f"]}])")), SpecError);
    // POF reference not a diamond ancestor.
    CHECK_THROWS_AS(network_from_json(with(R"([{"kind":"PEF","vertex":"F","flows":["f"]},
        {"kind":"POF","vertex":"F","flows":["f"],"reference":"C","timeout":6}])")),
                    SpecError);
    // Regulator without a shaping curve for its flow.
    CHECK_THROWS_AS(network_from_json(with(R"([{"kind":"PEF","vertex":"F","flows":["f"]},
        {"kind":"REG","vertex":"F","flows":["f"],"reference":"B","sigma":{}}])")),
                    SpecError);
    // POF and REG at one vertex with different references.
    CHECK_THROWS_AS(network_from_json(with(R"([{"kind":"PEF","vertex":"F","flows":["f"]},
        {"kind":"POF","vertex":"G","flows":["f"],"reference":"B","timeout":6},
        {"kind":"REG","vertex":"G","flows":["f"],"reference":"F","sigma":{"f":{"rate":1,"burst":1}}}])")),
                    SpecError);
}

TEST_CASE("bundled networks load") {
    for (const char* f : {"toy/toy.json", "toy/toy_pfr.json", "toy/toy_pof_pfr.json", "backbone/automotive_backbone.json",
                          "misc/ring.json", "misc/empty.json"})
        CHECK_NOTHROW(load_network(oracle::scenario_path(f)));
}
