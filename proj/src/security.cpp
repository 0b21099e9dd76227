#include "cvqsdc/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvqsdc {
namespace {

constexpr double kProbabilityTolerance = 1e-9;

double to_bits(double snr, LogForm form) { return form == LogForm::one_plus ? std::log2(1.0 + snr) : std::log2(snr); }

void check_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument(std::string("analytic params: ") + name + " must lie in [0, 1]");
}

void check_probabilities(const double* data, Eigen::Index size) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!(data[i] >= 0.0) || !std::isfinite(data[i])) {
      throw std::invalid_argument("probabilities must be finite and non-negative");
    }
    total += data[i];
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) throw std::invalid_argument("probabilities must sum to 1");
}

double entropy_of(const double* data, Eigen::Index size) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    if (data[i] > 0.0) h -= data[i] * std::log2(data[i]);
  }
  return h;
}

double joint_entropy(const Eigen::MatrixXd& joint) {
  check_probabilities(joint.data(), joint.size());
  return entropy_of(joint.data(), joint.size());
}

// Whether any of Bob's light, modulated by Alice, reaches Eve's backward tap.
bool eve_sees_message(const ProtocolConfig& config) {
  const auto& ch = config.channel;
  return config.coupler_eta < 1.0 && ch.eta_L > 0.0 && round_trip_eve_amplitude(ch.eta_E).second > 0.0;
}

}  // namespace

std::string_view to_string(Party party) { return party == Party::bob ? "bob" : "eve"; }

void AnalyticParams::validate() const {
  check_unit_interval(eta_E, "eta_E");
  check_unit_interval(eta_L, "eta_L");
  check_unit_interval(coupler_eta, "coupler_eta");
  if (!(z > 0.0 && z <= 1.0)) throw std::invalid_argument("analytic params: z must lie in (0, 1]");
  if (!(var_x_sqrt_m >= 0.0) || !(var_m >= 0.0)) throw std::invalid_argument("analytic params: variances must be >= 0");
}

AnalyticParams AnalyticParams::from_config(const ProtocolConfig& config) {
  AnalyticParams p;
  p.eta_E = config.channel.eta_E;
  p.eta_L = config.channel.eta_L;
  p.z = config.z();
  p.var_x_sqrt_m = variance_of_product(config.alpha_distribution.scaled(std::sqrt(2.0)), config.message_distribution);
  p.var_m = config.message_distribution.variance();
  p.coupler_eta = config.coupler_eta;
  return p;
}

double mutual_info_asym(const AnalyticParams& p, Party party, LogForm form) {
  p.validate();
  const double leak = 1.0 - p.coupler_eta;
  const double squeeze = p.coupler_eta * (1.0 - p.z * p.z);
  const double eta_L2 = p.eta_L * p.eta_L;
  if (party == Party::bob) {
    const double signal = leak * p.eta_E * p.eta_E * eta_L2 * p.var_x_sqrt_m;
    const double noise = 0.5 * (1.0 - squeeze * p.eta_E * p.eta_L);
    return to_bits(signal / noise, form);
  }
  const double signal = leak * p.eta_E * (1.0 - p.eta_E) * eta_L2 * p.var_x_sqrt_m;
  const double noise = 0.5 * (1.0 - squeeze * (1.0 - p.eta_E) * p.eta_L);
  return to_bits(signal / noise, form);
}

double mutual_info_sym(const AnalyticParams& p, Party party, LogForm form) {
  p.validate();
  const double leak = 1.0 - p.coupler_eta;
  const double squeeze = p.coupler_eta * (1.0 - p.z * p.z) * p.var_m;
  const double eta_L2 = p.eta_L * p.eta_L;
  // Eve's share of the round trip is eta_E (1 - eta_E) for both the signal
  // and the squeezing term, so her information vanishes at both endpoints.
  const double share = party == Party::bob ? p.eta_E * p.eta_E : p.eta_E * (1.0 - p.eta_E);
  const double signal = leak * share * eta_L2 * p.var_x_sqrt_m;
  const double noise = 0.5 * (1.0 - squeeze * share * eta_L2);
  if (!(noise > 0.0)) throw std::domain_error("mutual_info_sym: noise term is not positive");
  return to_bits(signal / noise, form);
}

double mutual_info(Variant variant, const AnalyticParams& params, Party party, LogForm form) {
  return variant == Variant::asymmetric ? mutual_info_asym(params, party, form) : mutual_info_sym(params, party, form);
}

double secrecy_capacity(double i_ab, double i_ae) { return i_ab - i_ae; }

double shannon_hartley(double signal, double noise) {
  if (!(noise > 0.0)) throw std::invalid_argument("shannon_hartley: noise must be positive");
  if (!(signal >= 0.0)) throw std::invalid_argument("shannon_hartley: signal must be non-negative");
  return std::log2(1.0 + signal / noise);
}

double discrete_entropy(const Eigen::VectorXd& p) {
  check_probabilities(p.data(), p.size());
  return entropy_of(p.data(), p.size());
}

double conditional_entropy(const Eigen::MatrixXd& joint) {
  const double h_xy = joint_entropy(joint);
  const Eigen::VectorXd px = joint.rowwise().sum();
  return h_xy - entropy_of(px.data(), px.size());
}

double discrete_mutual_info(const Eigen::MatrixXd& joint) {
  const double h_xy = joint_entropy(joint);
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::VectorXd py = joint.colwise().sum().transpose();
  const double mi = entropy_of(px.data(), px.size()) + entropy_of(py.data(), py.size()) - h_xy;
  return std::max(0.0, mi);
}

double variance_of_product(const Distribution& x, const Distribution& m) {
  const double root_mean = x.mean() * m.mean_sqrt();
  return std::max(0.0, x.second_moment() * m.mean() - root_mean * root_mean);
}

void MutualInfoAccumulator::add(const Transcript& transcript) {
  if (!transcript.verdict.accepted) {
    ++aborted_;
    return;
  }
  ++accepted_;
  const auto& config = transcript.config;
  // The mean gain along theta does not depend on theta for either variant.
  const double bob_gain = bob_response_model(config, 0.0).gain;
  if (party_ == Party::bob ? bob_gain == 0.0 : !eve_sees_message(config)) blind_ = true;

  for (const auto& r : transcript.pulses) {
    if (r.label != Label::message || !r.m_true) continue;
    const auto& reading = party_ == Party::bob ? r.bob_meas : r.eve_bwd_meas;
    if (!reading) continue;
    const double u = r.quadrature_amplitude() * std::sqrt(*r.m_true);
    const double y = *reading;
    ++n_;
    su_ += u;
    suu_ += u * u;
    sy_ += y;
    syy_ += y * y;
    suy_ += u * y;
    if (party_ == Party::bob && bob_gain != 0.0) {
      const double err = y / bob_gain - u;
      sq_err_ += err * err;
    }
  }
}

void MutualInfoAccumulator::merge(const MutualInfoAccumulator& other) {
  if (other.party_ != party_) throw std::invalid_argument("MutualInfoAccumulator::merge: different parties");
  blind_ = blind_ || other.blind_;
  n_ += other.n_;
  accepted_ += other.accepted_;
  aborted_ += other.aborted_;
  su_ += other.su_;
  suu_ += other.suu_;
  sy_ += other.sy_;
  syy_ += other.syy_;
  suy_ += other.suy_;
  sq_err_ += other.sq_err_;
}

double MutualInfoAccumulator::signal_to_noise() const {
  if (n_ == 0) throw std::invalid_argument("monte-carlo mutual information: no message pulses");
  if (blind_) return 0.0;
  const double n = static_cast<double>(n_);
  const double var_u = std::max(0.0, suu_ / n - (su_ / n) * (su_ / n));
  if (party_ == Party::bob) {
    const double mse = sq_err_ / n;
    if (mse == 0.0) return var_u > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return var_u / mse;
  }
  const double var_y = std::max(0.0, syy_ / n - (sy_ / n) * (sy_ / n));
  if (var_u == 0.0 || var_y == 0.0) return 0.0;
  const double cov = suy_ / n - (su_ / n) * (sy_ / n);
  const double rho2 = std::min(1.0, cov * cov / (var_u * var_y));
  if (rho2 >= 1.0) return std::numeric_limits<double>::infinity();
  return rho2 / (1.0 - rho2);
}

double MutualInfoAccumulator::bits(LogForm form, double cap) const {
  return std::min(cap, to_bits(signal_to_noise(), form));
}

double monte_carlo_mutual_info(std::span<const Transcript> transcripts, Party party, LogForm form, double cap) {
  MutualInfoAccumulator acc(party);
  for (const auto& t : transcripts) acc.add(t);
  return acc.bits(form, cap);
}

}  // namespace cvqsdc
