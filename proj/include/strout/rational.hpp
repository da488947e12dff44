#ifndef STROUT_RATIONAL_HPP
#define STROUT_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "strout/errors.hpp"

namespace strout {

using Rational = boost::rational<std::int64_t>;

/// Reads "3", "-1/4" or "0.85" exactly.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { return ConfigError("not a number: \"" + std::string(text) + "\""); };
    if (text.empty()) throw bad();
    std::string_view t = text;
    bool neg = false;
    if (t.front() == '-' || t.front() == '+') {
        neg = t.front() == '-';
        t.remove_prefix(1);
    }
    auto digits = [&](std::string_view s) {
        if (s.empty() || s.size() > 17) throw bad();
        std::int64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw bad();
            v = v * 10 + (c - '0');
        }
        return v;
    };
    Rational r;
    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        const std::int64_t den = digits(t.substr(slash + 1));
        if (den == 0) throw bad();
        r = Rational(digits(t.substr(0, slash)), den);
    } else if (auto dot = t.find('.'); dot != std::string_view::npos) {
        const std::string_view whole = t.substr(0, dot), frac = t.substr(dot + 1);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        r = Rational(whole.empty() ? 0 : digits(whole)) + (frac.empty() ? Rational(0) : Rational(digits(frac), scale));
    } else {
        r = Rational(digits(t));
    }
    return neg ? -r : r;
}

inline std::string to_string(const Rational& r) {
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
    return s;
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace strout

#endif  // STROUT_RATIONAL_HPP
