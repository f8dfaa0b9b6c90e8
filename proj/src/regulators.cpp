#include "redcalc/regulators.hpp"

#include <stdexcept>

namespace redcalc {

namespace {

const Q& upper(const PathDelayBounds& b) {
    if (!b.hi.finite()) throw std::domain_error("unbounded upstream delay");
    return b.hi.v;
}

}  // namespace

DelayInterval pfr_after_pef_bounds(const TokenBucket& shaping, const PathDelayBounds& upstream) {
    (void)shaping;
    const Q& D = upper(upstream);
    return {upstream.lo, Ext(Q(2 * D - upstream.lo))};
}

Ext pfr_after_pef_penalty(const ConcaveCurve& alpha_ref, const ConcaveCurve& sigma, const PathDelayBounds& upstream) {
    Q j = upper(upstream) - upstream.lo;
    return h_dev(deconvolve_delay(alpha_ref, j), Service(sigma));
}

Ext pfr_after_pef_rto(const Ext& pef_rto, const PathDelayBounds& upstream) {
    if (!pef_rto.finite()) return pef_rto;
    return Ext(Q(pef_rto.v + upper(upstream) - upstream.lo));
}

long ir_q_min(const TokenBucket& shaping, PathDelayBounds b1, PathDelayBounds b2) {
    if (!(shaping.burst > 0)) throw std::invalid_argument("q_min needs a positive burst");
    if (upper(b2) < upper(b1)) std::swap(b1, b2);
    Q gap = pos(b2.lo - b1.hi.v);
    Q x = q_floor(2 * shaping.rate * gap / shaping.burst + 2) + 1;
    return x.get_num().get_si();
}

DelayInterval preof_for_free_bounds(const PathDelayBounds& upstream, const Q& timeout, bool lossless) {
    const Q& D = upper(upstream);
    if (lossless) return {upstream.lo, Ext(D)};
    return {upstream.lo, Ext(Q(D + timeout))};
}

RegulatorVerdict ir_after_pef_verdict(const IrContext& ctx) {
    if (ctx.has_pof_before) {
        auto v = RegulatorVerdict::bounded(preof_for_free_bounds(ctx.upstream, ctx.pof_timeout, ctx.lossless));
        return v;
    }
    if (ctx.flow_count == 1 && ctx.sigma) {
        auto v = RegulatorVerdict::bounded(pfr_after_pef_bounds(*ctx.sigma, ctx.upstream));
        return v;
    }
    if (!ctx.homogeneous_sigma || !ctx.sigma) return RegulatorVerdict::unbounded(reason::UnprovenConfiguration);

    auto v = RegulatorVerdict::unbounded(reason::IrAfterPefNoPof);
    if (ctx.sigma->burst > 0) {
        for (size_t i = 0; i < ctx.branch_intervals.size(); ++i)
            for (size_t j = i + 1; j < ctx.branch_intervals.size(); ++j) {
                if (ctx.branch_intervals[i] == ctx.branch_intervals[j]) continue;
                long q = ir_q_min(*ctx.sigma, ctx.branch_intervals[i], ctx.branch_intervals[j]);
                if (!v.q_min || q < *v.q_min) v.q_min = q;
            }
    }
    return v;
}

}  // namespace redcalc
