#include "mgmax/exponent.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "mgmax/error.hpp"

namespace mgmax {

Exponent Exponent::finite(double value) {
  if (!std::isfinite(value)) throw InvalidInput("exponent must be finite; use Exponent::infinity()");
  if (value < 1.0) throw InvalidInput("exponent must be >= 1");
  return Exponent{value, false};
}

Exponent Exponent::parse(std::string_view text) {
  if (text == "inf" || text == "infinity") return infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidInput("cannot parse exponent '" + std::string(text) + "'");
  }
  return finite(v);
}

double Exponent::value() const {
  if (infinite_) throw InvalidInput("exponent is infinite");
  return value_;
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << value_;
  return os.str();
}

double holder_conjugate(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("Holder conjugate needs finite p > 1");
  return p / (p - 1.0);
}

Exponents Exponents::make(double p, Exponent q) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("p must be finite and > 1");
  if (!q.is_infinite() && !(q.value() > 1.0)) throw InvalidInput("q must be > 1");
  if (q < Exponent::finite(p)) throw InvalidInput("need p <= q");
  return Exponents{p, q, holder_conjugate(p)};
}

}  // namespace mgmax
