#include "cvqsdc/distribution.hpp"

#include "cvqsdc/format.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqsdc {

Distribution Distribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw std::invalid_argument("Distribution: need finite bounds with lo <= hi");
  }
  return Distribution(lo, hi);
}

Distribution Distribution::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("distribution '" + std::string(text) + "': expected kind:params");
  }
  const auto kind = text.substr(0, colon);
  const auto params = text.substr(colon + 1);
  if (kind == "const") return constant(parse_double(params));
  if (kind == "uniform") {
    const auto comma = params.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("distribution '" + std::string(text) + "': uniform needs lo,hi");
    }
    return uniform(parse_double(params.substr(0, comma)), parse_double(params.substr(comma + 1)));
  }
  throw std::invalid_argument("distribution '" + std::string(text) + "': unknown kind");
}

double Distribution::sample(Rng& rng) const {
  if (is_constant()) return lo_;
  std::uniform_real_distribution<double> u(lo_, hi_);
  return u(rng);
}

Distribution Distribution::scaled(double factor) const {
  return factor >= 0 ? uniform(factor * lo_, factor * hi_) : uniform(factor * hi_, factor * lo_);
}

double Distribution::mean() const { return 0.5 * (lo_ + hi_); }

double Distribution::second_moment() const {
  if (is_constant()) return lo_ * lo_;
  return (hi_ * hi_ * hi_ - lo_ * lo_ * lo_) / (3.0 * (hi_ - lo_));
}

double Distribution::mean_sqrt() const {
  if (lo_ < 0) throw std::domain_error("Distribution::mean_sqrt: support includes negative values");
  if (is_constant()) return std::sqrt(lo_);
  return (2.0 / 3.0) * (std::pow(hi_, 1.5) - std::pow(lo_, 1.5)) / (hi_ - lo_);
}

std::string Distribution::to_string() const {
  if (is_constant()) return "const:" + format_exact(lo_);
  return "uniform:" + format_exact(lo_) + "," + format_exact(hi_);
}

}  // namespace cvqsdc
