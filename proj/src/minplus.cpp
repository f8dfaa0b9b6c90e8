#include "redcalc/minplus.hpp"

#include <algorithm>
#include <stdexcept>

namespace redcalc {

std::vector<TokenBucket> normalize(std::vector<TokenBucket> segs) {
    if (segs.empty()) throw std::invalid_argument("curve needs at least one segment");
    for (const auto& s : segs)
        if (s.rate < 0 || s.burst < 0) throw std::invalid_argument("negative token-bucket parameter");

    // Lower envelope of lines over t > 0: start from the smallest value at
    // 0+ and follow the earliest crossing by a line with a smaller rate.
    std::sort(segs.begin(), segs.end(), [](const TokenBucket& a, const TokenBucket& b) {
        if (a.burst != b.burst) return a.burst < b.burst;
        return a.rate < b.rate;
    });
    std::vector<TokenBucket> out;
    out.push_back(segs.front());
    Q t_cur = 0;
    for (;;) {
        const TokenBucket& cur = out.back();
        const TokenBucket* next = nullptr;
        Q t_next;
        for (const auto& s : segs) {
            if (s.rate >= cur.rate) continue;
            Q t = (s.burst - cur.burst) / (cur.rate - s.rate);
            if (t <= t_cur) continue;
            if (!next || t < t_next || (t == t_next && s.rate < next->rate)) {
                next = &s;
                t_next = t;
            }
        }
        if (!next) break;
        out.push_back(*next);
        t_cur = t_next;
    }
    return out;
}

ConcaveCurve::ConcaveCurve() : segs_{TokenBucket{0, 0}} {}

ConcaveCurve::ConcaveCurve(std::vector<TokenBucket> segments) : segs_(normalize(std::move(segments))) {}

ConcaveCurve ConcaveCurve::token_bucket(const Q& rate, const Q& burst) {
    return ConcaveCurve({TokenBucket{rate, burst}});
}

std::vector<Q> ConcaveCurve::breakpoints() const {
    std::vector<Q> bp;
    for (size_t i = 1; i < segs_.size(); ++i)
        bp.push_back((segs_[i].burst - segs_[i - 1].burst) / (segs_[i - 1].rate - segs_[i].rate));
    return bp;
}

Q eval(const ConcaveCurve& c, const Q& t) {
    if (t < 0) throw std::invalid_argument("curve evaluated at negative time");
    if (t == 0) return 0;
    Q best = c.segments().front().rate * t + c.segments().front().burst;
    for (const auto& s : c.segments()) {
        Q v = s.rate * t + s.burst;
        if (v < best) best = v;
    }
    return best;
}

Q eval(const RateLatency& s, const Q& t) {
    if (t < 0) throw std::invalid_argument("curve evaluated at negative time");
    return s.rate * pos(t - s.latency);
}

ConcaveCurve add(const ConcaveCurve& a, const ConcaveCurve& b) {
    // min_i x_i + min_j y_j = min_{i,j} (x_i + y_j)
    std::vector<TokenBucket> segs;
    for (const auto& x : a.segments())
        for (const auto& y : b.segments()) segs.push_back({x.rate + y.rate, x.burst + y.burst});
    return ConcaveCurve(std::move(segs));
}

ConcaveCurve convolve(const ConcaveCurve& a, const ConcaveCurve& b) {
    std::vector<TokenBucket> segs = a.segments();
    segs.insert(segs.end(), b.segments().begin(), b.segments().end());
    return ConcaveCurve(std::move(segs));
}

ConcaveCurve deconvolve_delay(const ConcaveCurve& a, const Q& delay) {
    if (delay < 0) throw std::invalid_argument("negative delay element");
    std::vector<TokenBucket> segs;
    for (const auto& s : a.segments()) segs.push_back({s.rate, s.burst + s.rate * delay});
    return ConcaveCurve(std::move(segs));
}

ConcaveCurve deconvolve_delay(const ConcaveCurve& a, const DelayElement& j) { return deconvolve_delay(a, j.delay); }

Ext lower_pseudo_inverse(const ConcaveCurve& a, const Q& y) {
    if (y < 0) throw std::invalid_argument("pseudo-inverse of a negative value");
    if (y == 0) return Ext(0);
    // a(t) >= y for t > 0 iff every segment reaches y at t.
    Q t = 0;
    for (const auto& s : a.segments()) {
        if (s.burst >= y) continue;
        if (s.rate == 0) return Ext::infinity();
        t = q_max(t, (y - s.burst) / s.rate);
    }
    return Ext(t);
}

namespace {

// Candidate abscissae where a piecewise-linear deviation may peak, besides 0+.
std::vector<Q> candidate_times(const ConcaveCurve& alpha) { return alpha.breakpoints(); }

Ext h_dev_rl(const ConcaveCurve& alpha, const RateLatency& beta) {
    if (beta.rate <= 0) throw std::invalid_argument("rate-latency service needs a positive rate");
    if (alpha.tail().rate > beta.rate) return Ext::infinity();
    Q best = alpha.burst0() / beta.rate;
    for (const auto& t : candidate_times(alpha)) best = q_max(best, eval(alpha, t) / beta.rate - t);
    return Ext(Q(beta.latency + best));
}

Ext v_dev_rl(const ConcaveCurve& alpha, const RateLatency& beta) {
    if (alpha.tail().rate > beta.rate) return Ext::infinity();
    Q best = alpha.burst0();
    auto ts = candidate_times(alpha);
    ts.push_back(beta.latency);
    for (const auto& t : ts)
        if (t > 0) best = q_max(best, eval(alpha, t) - eval(beta, t));
    return Ext(best);
}

Ext h_dev_concave(const ConcaveCurve& alpha, const ConcaveCurve& beta) {
    const auto& at = alpha.tail();
    const auto& bt = beta.tail();
    if (at.rate > bt.rate) return Ext::infinity();
    std::vector<Q> ts = alpha.breakpoints();
    std::vector<Q> levels{beta.burst0()};
    for (const auto& tb : beta.breakpoints()) levels.push_back(eval(beta, tb));
    for (const auto& y : levels) {
        Ext t = lower_pseudo_inverse(alpha, y);
        if (t.finite() && t.v > 0) ts.push_back(t.v);
    }
    Ext best = lower_pseudo_inverse(beta, alpha.burst0());
    if (!best.finite()) return best;
    for (const auto& t : ts) {
        Ext x = lower_pseudo_inverse(beta, eval(alpha, t));
        if (!x.finite()) return x;
        best = ext_max(best, Ext(Q(x.v - t)));
    }
    // Equal zero tail rates: alpha may still exceed the supremum of beta.
    if (bt.rate == 0 && at.burst > bt.burst) return Ext::infinity();
    return ext_max(best, Ext(0));
}

Ext v_dev_concave(const ConcaveCurve& alpha, const ConcaveCurve& beta) {
    if (alpha.tail().rate > beta.tail().rate) return Ext::infinity();
    Q best = alpha.burst0() - beta.burst0();
    std::vector<Q> ts = alpha.breakpoints();
    for (const auto& t : beta.breakpoints()) ts.push_back(t);
    for (const auto& t : ts) best = q_max(best, eval(alpha, t) - eval(beta, t));
    if (alpha.tail().rate == beta.tail().rate) best = q_max(best, alpha.tail().burst - beta.tail().burst);
    return Ext(pos(best));
}

}  // namespace

Ext h_dev(const ConcaveCurve& alpha, const Service& beta) {
    if (alpha == ConcaveCurve()) return Ext(0);
    if (auto rl = std::get_if<RateLatency>(&beta)) return h_dev_rl(alpha, *rl);
    return h_dev_concave(alpha, std::get<ConcaveCurve>(beta));
}

Ext v_dev(const ConcaveCurve& alpha, const Service& beta) {
    if (alpha == ConcaveCurve()) return Ext(0);
    if (auto rl = std::get_if<RateLatency>(&beta)) return v_dev_rl(alpha, *rl);
    return v_dev_concave(alpha, std::get<ConcaveCurve>(beta));
}

bool leq(const ConcaveCurve& a, const ConcaveCurve& b) {
    // a - (affine piece of b) is concave on (0, inf): check both ends.
    const auto& at = a.tail();
    for (const auto& s : b.segments()) {
        if (a.burst0() > s.burst) return false;
        if (at.rate > s.rate) return false;
        if (at.rate == s.rate && at.burst > s.burst) return false;
    }
    return true;
}

}  // namespace redcalc
