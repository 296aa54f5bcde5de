#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace rectfree {

/// Exact rational scalar used by the oracle paths.
using Rational = boost::multiprecision::cpp_rational;

}  // namespace rectfree
