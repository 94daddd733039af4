#pragma once

#include <string>
#include <string_view>

namespace mgmax {

/// An exponent in [1, inf]. Infinity is a distinct state rather than a large
/// double so that q = inf evaluates as an exact max.
class Exponent {
 public:
  static Exponent finite(double value);
  static Exponent infinity() noexcept { return Exponent{0.0, true}; }

  /// Parses "inf" or a decimal number.
  static Exponent parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws if the exponent is infinite.
  double value() const;

  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;
  /// Total order with infinity on top.
  friend bool operator<(const Exponent& a, const Exponent& b) noexcept {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) noexcept { return !(b < a); }

 private:
  Exponent(double v, bool inf) noexcept : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// p' = p / (p - 1). Throws InvalidInput for p <= 1.
double holder_conjugate(double p);

/// The exponent triple used throughout: finite p > 1, q in (1, inf], p'.
struct Exponents {
  double p;
  Exponent q;
  double p_conj;

  /// Validates 1 < p <= q and fills p_conj.
  static Exponents make(double p, Exponent q);
};

}  // namespace mgmax
