#pragma once

#include <string>
#include <vector>

#include "redcalc/sim.hpp"
#include "redcalc/tfa.hpp"

namespace redcalc {

struct VerifyCheck {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct VerifyResult {
    bool lossless = true;
    std::vector<VerifyCheck> checks;
    std::vector<std::string> notes;
    AnalysisReport report;

    bool ok() const;
};

// Cross-checks a simulated trace against the analysis of the linked network.
// The scenario reference point is the output of each flow's source vertex and
// its pipeline is the one placed at s.vertex.
VerifyResult verify_scenario(const Scenario& s, const Trace& t, const NetworkSpec& net);
json to_json(const VerifyResult& r);

}  // namespace redcalc
