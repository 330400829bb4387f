#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <string>

#include "mgt/errors.hpp"

namespace mgt {

using Rat = boost::rational<long long>;

inline Rat rat(long long num, long long den = 1) {
  if (den == 0) throw ConfigInvalid("rational with zero denominator");
  return Rat(num, den);
}

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// "3", "-3", "3/4"
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(s), 1);
    return rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw ConfigInvalid("bad rational literal: " + s);
  } catch (const std::out_of_range&) {
    throw ConfigInvalid("rational literal out of range: " + s);
  }
}

inline std::string rat_str(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace mgt
