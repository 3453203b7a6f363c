#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace ncvar {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string rat_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += "/";
        s += denominator(r).str();
    }
    return s;
}

inline Rat rat_of(long num, long den = 1) {
    if (den == 0) throw error("zero denominator");
    return Rat(Int(num), Int(den));
}

inline Rat factorial(int k) {
    Rat r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

} // namespace ncvar
