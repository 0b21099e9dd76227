#pragma once

#include "cvqsdc/random.hpp"

#include <string>
#include <string_view>

namespace cvqsdc {

/// Uniform distribution on [lo, hi]; lo == hi is a point mass.
/// Text form: "uniform:lo,hi" or "const:c".
class Distribution {
 public:
  static Distribution uniform(double lo, double hi);
  static Distribution constant(double value) { return uniform(value, value); }
  static Distribution parse(std::string_view text);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_constant() const { return lo_ == hi_; }

  double sample(Rng& rng) const;
  Distribution scaled(double factor) const;

  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }
  /// E[sqrt(X)]; requires lo >= 0.
  double mean_sqrt() const;

  std::string to_string() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Distribution(double lo, double hi) : lo_(lo), hi_(hi) {}
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace cvqsdc
