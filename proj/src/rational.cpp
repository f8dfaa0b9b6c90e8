#include "redcalc/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace redcalc {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Q pow10(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return Q(p);
    return Q(mpz_class(1), p);
}

}  // namespace

Q parse_q(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty rational");

    bool neg = false;
    if (s.front() == '-' || s.front() == '+') {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }

    Q result;
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("bad rational: " + std::string(text));
        mpz_class n{std::string(num)}, d{std::string(den)};
        if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
        result = Q(n, d);
        result.canonicalize();
    } else {
        long exp = 0;
        auto epos = s.find_first_of("eE");
        std::string_view mant = s;
        if (epos != std::string_view::npos) {
            auto es = s.substr(epos + 1);
            bool eneg = false;
            if (!es.empty() && (es.front() == '-' || es.front() == '+')) {
                eneg = es.front() == '-';
                es.remove_prefix(1);
            }
            if (!all_digits(es) || es.size() > 6)
                throw std::invalid_argument("bad exponent: " + std::string(text));
            exp = std::stol(std::string(es));
            if (eneg) exp = -exp;
            mant = s.substr(0, epos);
        }
        auto dot = mant.find('.');
        std::string digits;
        if (dot == std::string_view::npos) {
            digits = std::string(mant);
        } else {
            auto ip = mant.substr(0, dot);
            auto fp = mant.substr(dot + 1);
            digits = std::string(ip) + std::string(fp);
            exp -= static_cast<long>(fp.size());
        }
        if (!all_digits(digits)) throw std::invalid_argument("bad rational: " + std::string(text));
        result = Q(mpz_class(digits)) * pow10(exp);
        result.canonicalize();
    }
    return neg ? Q(-result) : result;
}

std::string to_string(const Q& v) {
    Q c = v;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Q q_floor(const Q& v) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return Q(r);
}

Q q_ceil(const Q& v) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return Q(r);
}

bool operator==(const Ext& a, const Ext& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.v == b.v;
}

bool operator<(const Ext& a, const Ext& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
}

Ext operator+(const Ext& a, const Ext& b) {
    if (a.inf || b.inf) return Ext::infinity();
    return Ext(Q(a.v + b.v));
}

Ext ext_max(const Ext& a, const Ext& b) { return a < b ? b : a; }
Ext ext_min(const Ext& a, const Ext& b) { return a < b ? a : b; }

std::string to_string(const Ext& v) { return v.inf ? "inf" : to_string(v.v); }

Ext parse_ext(std::string_view text) {
    if (text == "inf" || text == "+inf") return Ext::infinity();
    return Ext(parse_q(text));
}

}  // namespace redcalc
