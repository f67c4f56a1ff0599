#include "epkit/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace epkit {

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::Exact:
      return "exact";
    case Precision::Double:
      return "double";
    case Precision::Extended:
      return "extended";
  }
  return "unknown";
}

Precision precision_from_string(std::string_view s) {
  if (s == "exact") return Precision::Exact;
  if (s == "double") return Precision::Double;
  if (s == "extended") return Precision::Extended;
  throw std::invalid_argument("unknown precision tier '" + std::string(s) + "'");
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_from_double: non-finite value");
  return Rational(x);
}

}  // namespace epkit
