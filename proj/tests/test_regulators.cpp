#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "redcalc/regulators.hpp"

using namespace redcalc;

namespace {

PathDelayBounds pd(const Q& d, const Q& D) { return {d, Ext(D)}; }

}  // namespace

TEST_CASE("per-flow regulator after a PEF") {
    CHECK(pfr_after_pef_bounds({1, 1}, pd(0, 7)) == DelayInterval{0, Ext(14)});
    CHECK(pfr_after_pef_bounds({1, 1}, pd(3, 3)) == DelayInterval{3, Ext(3)});
    CHECK(pfr_after_pef_bounds({2, 3}, pd(1, 5)) == DelayInterval{1, Ext(9)});
    for (int d = 0; d < 5; ++d)
        for (int D = d; D < 9; ++D) CHECK(pfr_after_pef_bounds({1, 1}, pd(d, D)).hi >= Ext(D));
}

TEST_CASE("RTO after the regulator") {
    CHECK(pfr_after_pef_rto(Ext(6), pd(0, 7)) == Ext(13));
    CHECK(pfr_after_pef_rto(Ext(0), pd(2, 2)) == Ext(0));
    CHECK(pfr_after_pef_rto(Ext(Q(7, 2)), pd(1, 5)) == Ext(Q(15, 2)));
}

TEST_CASE("concave shaping falls back to a service-curve penalty") {
    auto alpha = ConcaveCurve::token_bucket(1, 1);
    auto sigma = ConcaveCurve(std::vector<TokenBucket>{{2, 1}, {1, 2}});
    // alpha shifted by 7 is gamma(1, 8); sigma serves it with delay 6 at 0+.
    CHECK(pfr_after_pef_penalty(alpha, sigma, pd(0, 7)) == Ext(6));
}

TEST_CASE("q_min") {
    CHECK(ir_q_min({1, 1}, pd(0, 1), pd(6, 7)) == 13);
    CHECK(ir_q_min({1, 1}, pd(6, 7), pd(0, 1)) == 13);
    CHECK(ir_q_min({1, 1}, pd(0, 3), pd(2, 5)) == 3);
    CHECK(ir_q_min({2, 4}, pd(0, 1), pd(2, 9)) == 4);
}

TEST_CASE("elimination, ordering and reshaping together") {
    CHECK(preof_for_free_bounds(pd(0, 7), 6, true) == DelayInterval{0, Ext(7)});
    CHECK(preof_for_free_bounds(pd(0, 7), 6, false) == DelayInterval{0, Ext(13)});
    CHECK(preof_for_free_bounds(pd(4, 4), 0, true) == DelayInterval{4, Ext(4)});
}

TEST_CASE("interleaved regulator verdicts") {
    IrContext ctx;
    ctx.flow_count = 13;
    ctx.sigma = TokenBucket{1, 1};
    ctx.upstream = pd(0, 7);
    ctx.branch_intervals = {pd(0, 1), pd(6, 7)};
    auto v = ir_after_pef_verdict(ctx);
    CHECK(v.kind == VerdictKind::Unbounded);
    CHECK(v.reason == reason::IrAfterPefNoPof);
    REQUIRE(v.q_min);
    CHECK(*v.q_min == 13);

    // Fewer flows than q_min: still no finite bound.
    ctx.flow_count = 2;
    CHECK(ir_after_pef_verdict(ctx).kind == VerdictKind::Unbounded);

    IrContext pof = ctx;
    pof.has_pof_before = true;
    pof.pof_timeout = 6;
    pof.lossless = true;
    CHECK(ir_after_pef_verdict(pof).bounds == DelayInterval{0, Ext(7)});

    IrContext single = ctx;
    single.flow_count = 1;
    auto s = ir_after_pef_verdict(single);
    CHECK(s.kind == VerdictKind::Bounded);
    CHECK(s.bounds == DelayInterval{0, Ext(14)});

    IrContext mixed = ctx;
    mixed.homogeneous_sigma = false;
    CHECK(ir_after_pef_verdict(mixed).reason == reason::UnprovenConfiguration);
}
