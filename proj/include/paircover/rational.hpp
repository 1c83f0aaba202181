#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace paircover {

// Exact coefficient type used throughout the reduction. Coefficients here are
// tiny (eighths and quarters), so int64 components never get close to overflow.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Parses "p/q" or a bare integer "p".
inline Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(std::stoll(text), 1);
        }
        const std::int64_t num = std::stoll(text.substr(0, slash));
        const std::int64_t den = std::stoll(text.substr(slash + 1));
        return Rational(num, den);
    } catch (const boost::bad_rational&) {
        throw std::invalid_argument("zero denominator in rational: " + text);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational: " + text);
    }
}

inline std::int64_t lcm_denominator(std::int64_t acc, const Rational& r) {
    return std::lcm(acc, r.denominator());
}

} // namespace paircover
