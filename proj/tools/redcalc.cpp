// redcalc command-line front end.
//
// Exit codes: 0 success (all deadlines met / all checks passed),
//             1 input or scenario error,
//             2 deadline violated, unbounded verdict, no convergence, or a failed check.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "redcalc/sim.hpp"
#include "redcalc/tfa.hpp"
#include "redcalc/verify.hpp"

using namespace redcalc;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotOk = 2;

AnalysisOptions options_from_env(AnalysisOptions o) {
    if (const char* cap = std::getenv("REDCALC_ITER_CAP")) {
        try {
            long v = std::stol(cap);
            if (v <= 0) throw std::invalid_argument("non-positive");
            o.iteration_cap = static_cast<size_t>(v);
        } catch (const std::exception&) {
            throw SpecError("REDCALC_ITER_CAP", "expected a positive integer, got '" + std::string(cap) + "'");
        }
    }
    return o;
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay and burstiness analysis for networks with packet replication and elimination"};
    app.require_subcommand(1);

    std::string in_file, out_file, format = "json", model = "tight";
    bool lossless = false;
    std::string burst_cap;
    auto* analyze_cmd = app.add_subcommand("analyze", "Compute delay bounds for a network description");
    analyze_cmd->add_option("--in", in_file, "Network JSON file")->required();
    analyze_cmd->add_option("--out", out_file, "Report file (stdout if omitted)");
    analyze_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    analyze_cmd->add_option("--model", model, "PEF output model")->check(CLI::IsMember({"tight", "intuitive"}));
    analyze_cmd->add_flag("--lossless", lossless, "Assume no data unit is lost on every path");
    analyze_cmd->add_option("--burst-cap", burst_cap, "Divergence threshold on bursts");

    auto* compare_cmd = app.add_subcommand("compare", "Compare tight and intuitive PEF models");
    compare_cmd->add_option("--in", in_file, "Network JSON file")->required();
    compare_cmd->add_option("--out", out_file, "Output file (stdout if omitted)");
    compare_cmd->add_flag("--lossless", lossless, "Assume no data unit is lost on every path");

    std::string scenario_file, trace_out, network_file;
    auto* sim_cmd = app.add_subcommand("simulate", "Replay a scenario through the function pipeline");
    sim_cmd->add_option("--scenario", scenario_file, "Scenario JSON file")->required();
    sim_cmd->add_option("--trace-out", trace_out, "Trace CSV file");

    auto* verify_cmd = app.add_subcommand("verify", "Simulate a scenario and check it against the analysis");
    verify_cmd->add_option("--scenario", scenario_file, "Scenario JSON file")->required();
    verify_cmd->add_option("--network", network_file, "Network JSON file (defaults to the one named by the scenario)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_cmd->parsed()) {
            AnalysisOptions opts;
            opts.model = model == "tight" ? PefModel::Tight : PefModel::Intuitive;
            if (lossless) opts.lossless = true;
            if (!burst_cap.empty()) opts.burst_cap = parse_q(burst_cap);
            opts = options_from_env(opts);
            auto net = load_network(in_file);
            auto rep = analyze(net, opts);
            write_out(out_file, format == "csv" ? to_csv(rep) : to_json(rep).dump(2) + "\n");
            return rep.all_ok() ? kOk : kNotOk;
        }
        if (compare_cmd->parsed()) {
            AnalysisOptions opts;
            if (lossless) opts.lossless = true;
            opts = options_from_env(opts);
            auto net = load_network(in_file);
            auto cmp = compare_models(net, opts);
            json j = json::array();
            for (const auto& t : cmp.tight.ete) {
                const auto* i = cmp.intuitive.find_ete(t.flow, t.destination);
                j.push_back({{"flow", t.flow},
                             {"destination", t.destination},
                             {"tight", to_string(t.bounds.hi)},
                             {"intuitive", to_string(i->bounds.hi)}});
            }
            write_out(out_file, j.dump(2) + "\n");
            return kOk;
        }
        if (sim_cmd->parsed()) {
            auto s = load_scenario(scenario_file);
            auto tr = run_scenario(s);
            if (!trace_out.empty()) write_out(trace_out, trace_csv(tr));
            json summary{{"scenario", s.name}, {"points", tr.points}, {"events", tr.events.size()}, {"warnings", tr.warnings}};
            std::cout << summary.dump(2) << "\n";
            return kOk;
        }
        if (verify_cmd->parsed()) {
            auto s = load_scenario(scenario_file);
            std::string nf = network_file.empty() ? s.network : network_file;
            if (nf.empty()) throw ScenarioError("no network given and the scenario does not name one");
            auto net = load_network(nf);
            auto tr = run_scenario(s);
            auto res = verify_scenario(s, tr, net);
            std::cout << to_json(res).dump(2) << "\n";
            return res.ok() ? kOk : kNotOk;
        }
    } catch (const SpecError& e) {
        if (e.path().empty())
            std::cerr << "input error: " << std::string(e.what()).substr(2) << "\n";
        else
            std::cerr << "input error at " << e.what() << "\n";
        return kInputError;
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kInputError;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}
