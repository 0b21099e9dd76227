#include "cvqsdc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cvqsdc {
namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(6);
  os << value;
  return os.str();
}

// Gaussian tail check shared by Alice and Bob: |estimate - expected| <= k * se.
bool within(double estimate, double expected, double standard_error, double k) {
  return std::abs(estimate - expected) <= k * standard_error;
}

// Least-squares fit y ~ tau * a through the origin, with its standard error.
struct GainFit {
  double tau = 0.0;
  double standard_error = 0.0;
  bool informative = false;
};

GainFit fit_gain(std::span<const double> expected, std::span<const double> measured, double fallback_variance) {
  double saa = 0.0;
  double say = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    saa += expected[i] * expected[i];
    say += expected[i] * measured[i];
  }
  GainFit fit;
  if (saa <= 0.0) return fit;
  fit.tau = say / saa;
  double variance = fallback_variance;
  if (expected.size() >= 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const double r = measured[i] - fit.tau * expected[i];
      rss += r * r;
    }
    variance = rss / static_cast<double>(expected.size() - 1);
  }
  fit.standard_error = std::sqrt(variance / saa);
  fit.informative = true;
  return fit;
}

double draw_theta(const ProtocolConfig& config, Rng& rng) {
  if (config.phase_mode == PhaseMode::locked) return 0.0;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  return phase(rng);
}

// Alice's squeezer, applied after encoding in the asymmetric variant.
GaussianStated alice_squeezer(const GaussianStated& state, const ProtocolConfig& config) {
  return mix_with_squeezed_vacuum(state, config.z(), config.coupler_eta, 0.0);
}

}  // namespace

std::string_view to_string(Variant variant) {
  return variant == Variant::symmetric ? "symmetric" : "asymmetric";
}

std::string_view to_string(PhaseMode mode) { return mode == PhaseMode::locked ? "locked" : "random"; }

std::string_view to_string(Label label) {
  switch (label) {
    case Label::control: return "control";
    case Label::decoy: return "decoy";
    case Label::message: return "message";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text == "symmetric") return Variant::symmetric;
  if (text == "asymmetric") return Variant::asymmetric;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

PhaseMode parse_phase_mode(std::string_view text) {
  if (text == "locked") return PhaseMode::locked;
  if (text == "random") return PhaseMode::random;
  throw std::invalid_argument("unknown phase mode '" + std::string(text) + "'");
}

Label parse_label(std::string_view text) {
  if (text == "control") return Label::control;
  if (text == "decoy") return Label::decoy;
  if (text == "message") return Label::message;
  throw std::invalid_argument("unknown pulse label '" + std::string(text) + "'");
}

void ProtocolConfig::validate() const {
  if (n < 10) throw std::invalid_argument("config: n must be at least 10");
  if (!(control_fraction > 0.0 && control_fraction < 1.0) || !(decoy_fraction > 0.0 && decoy_fraction < 1.0) ||
      !(control_fraction + decoy_fraction < 1.0)) {
    throw std::invalid_argument("config: control and decoy fractions must lie in (0, 1) with sum < 1");
  }
  if (control_count() + decoy_count() >= n) {
    throw std::invalid_argument("config: no pulses left for the message");
  }
  if (!(squeezing_db <= 0.0)) throw std::invalid_argument("config: squeezing_db must be <= 0");
  if (!(coupler_eta >= 0.0 && coupler_eta <= 1.0)) {
    throw std::invalid_argument("config: coupler_eta must lie in [0, 1]");
  }
  if (alpha_distribution.lo() < 0.0) throw std::invalid_argument("config: |alpha| distribution must be >= 0");
  if (!(message_distribution.lo() > 0.0) || message_distribution.hi() > 1.0) {
    throw std::invalid_argument("config: message distribution must lie in (0, 1]");
  }
  if (!(check_tolerance_sigma > 0.0)) throw std::invalid_argument("config: check_tolerance_sigma must be > 0");
  channel.validate();
}

std::size_t ProtocolConfig::control_count() const {
  return static_cast<std::size_t>(std::ceil(control_fraction * static_cast<double>(n)));
}

std::size_t ProtocolConfig::decoy_count() const {
  return static_cast<std::size_t>(std::ceil(decoy_fraction * static_cast<double>(n)));
}

GaussianStated prepared_state(const ProtocolConfig& config, std::complex<double> alpha) {
  auto state = coherent_state(alpha.real(), alpha.imag());
  if (config.variant == Variant::symmetric) {
    // Squeezed along the pulse's own phase, i.e. amplitude squeezing.
    state = mix_with_squeezed_vacuum(state, config.z(), config.coupler_eta, std::arg(alpha));
  }
  return state;
}

ResponseModel bob_response_model(const ProtocolConfig& config, double theta) {
  const double t = config.channel.declared_transmissivity();
  const auto alpha = std::polar(1.0 / std::sqrt(2.0), theta);
  const auto arrived = attenuate(prepared_state(config, alpha), 0, t);

  auto bob_sees = [&](double m) {
    auto s = attenuate(arrived, 0, m);
    if (config.variant == Variant::asymmetric) s = alice_squeezer(s, config);
    return homodyne_stats(attenuate(s, 0, t), 0, theta);
  };
  const auto full = bob_sees(1.0);
  const auto empty = bob_sees(0.0);
  return {full.mean, empty.variance, full.variance};
}

Preparation bob_prepare(const ProtocolConfig& config, Rng& rng) {
  Preparation prep;
  prep.states.reserve(config.n);
  prep.records.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double amplitude = config.alpha_distribution.sample(rng);
    const double theta = draw_theta(config, rng);
    PulseRecord record;
    record.index = i;
    record.alpha = std::polar(amplitude, theta);
    record.theta = theta;
    prep.states.push_back(prepared_state(config, record.alpha));
    prep.records.push_back(record);
  }
  return prep;
}

CheckOutcome alice_select_and_check(std::span<const GaussianStated> delivered, std::vector<PulseRecord>& records,
                                    const ProtocolConfig& config, Rng& rng) {
  if (delivered.size() != records.size() || records.size() != config.n) {
    throw std::invalid_argument("alice_select_and_check: pulse count does not match config.n");
  }
  std::vector<std::size_t> order(config.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_control = config.control_count();
  const auto n_decoy = config.decoy_count();
  for (std::size_t k = 0; k < order.size(); ++k) {
    records[order[k]].label = k < n_control ? Label::control : (k < n_control + n_decoy ? Label::decoy : Label::message);
  }

  std::vector<double> expected;
  std::vector<double> measured;
  CheckOutcome outcome;
  double model_variance = kVacuumVariance<double>;
  for (auto& record : records) {
    if (record.label != Label::control) {
      outcome.remaining.push_back(record.index);
      continue;
    }
    const auto& state = delivered[record.index];
    const double y = homodyne_sample(state, 0, record.theta, rng);
    record.alice_meas = y;
    const auto reference = homodyne_stats(prepared_state(config, record.alpha), 0, record.theta);
    expected.push_back(reference.mean);
    measured.push_back(y);
    model_variance = reference.variance;
  }

  const double declared_amplitude = std::sqrt(config.channel.declared_transmissivity());
  const auto fit = fit_gain(expected, measured, model_variance);
  if (fit.informative && !within(fit.tau, declared_amplitude, fit.standard_error, config.check_tolerance_sigma)) {
    outcome.verdict = Verdict::abort("control check: transmissivity estimate " + describe(fit.tau * fit.tau) +
                                     " vs declared " + describe(config.channel.declared_transmissivity()));
  }
  return outcome;
}

std::vector<GaussianStated> alice_encode(std::span<const GaussianStated> delivered,
                                         std::vector<PulseRecord>& records, std::span<const double> message,
                                         const ProtocolConfig& config) {
  if (delivered.size() != records.size()) throw std::invalid_argument("alice_encode: size mismatch");
  const auto n_message = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.label == Label::message; }));
  if (message.size() != n_message) {
    throw std::invalid_argument("alice_encode: got " + std::to_string(message.size()) + " message values for " +
                                std::to_string(n_message) + " message pulses");
  }
  for (double m : message) {
    if (!(m > 0.0 && m <= 1.0)) throw std::invalid_argument("alice_encode: message values must lie in (0, 1]");
  }

  std::vector<GaussianStated> outgoing;
  outgoing.reserve(delivered.size());
  std::size_t next = 0;
  for (auto& record : records) {
    auto state = delivered[record.index];
    if (record.label == Label::message) {
      record.m_true = message[next++];
      state = attenuate(state, 0, *record.m_true);
    }
    if (record.label != Label::control && config.variant == Variant::asymmetric) {
      state = alice_squeezer(state, config);
    }
    outgoing.push_back(std::move(state));
  }
  return outgoing;
}

DecodeOutcome bob_decode(std::span<const GaussianStated> returned, std::vector<PulseRecord>& records,
                         const ProtocolConfig& config, Rng& rng) {
  if (returned.size() != records.size()) throw std::invalid_argument("bob_decode: size mismatch");

  const bool locked = config.phase_mode == PhaseMode::locked;
  const ResponseModel locked_model = bob_response_model(config, 0.0);
  auto model_for = [&](const PulseRecord& r) { return locked ? locked_model : bob_response_model(config, r.theta); };

  std::vector<double> decoy_expected;
  std::vector<double> decoy_measured;
  double normalised_square_sum = 0.0;  // sum of residual^2 / model variance over decoys
  for (auto& record : records) {
    if (record.label == Label::control) continue;
    const double y = homodyne_sample(returned[record.index], 0, record.theta, rng);
    record.bob_meas = y;
    if (record.label == Label::decoy) {
      const auto model = model_for(record);
      const double mu = model.gain * record.quadrature_amplitude();
      decoy_expected.push_back(mu);
      decoy_measured.push_back(y);
      normalised_square_sum += (y - mu) * (y - mu) / model.variance_decoy;
    }
  }

  DecodeOutcome outcome;
  const double k = config.check_tolerance_sigma;
  const auto fit = fit_gain(decoy_expected, decoy_measured, locked_model.variance_decoy);
  if (fit.informative && !within(fit.tau, 1.0, fit.standard_error, k)) {
    outcome.verdict = Verdict::abort("decoy check: amplitude ratio " + describe(fit.tau) + " vs expected 1");
    return outcome;
  }
  if (!decoy_expected.empty()) {
    const auto count = static_cast<double>(decoy_expected.size());
    const double ratio = normalised_square_sum / count;
    if (!within(ratio, 1.0, std::sqrt(2.0 / count), k)) {
      outcome.verdict = Verdict::abort("decoy check: variance ratio " + describe(ratio) +
                                       " vs squeezing-compatible 1");
      return outcome;
    }
  }

  for (auto& record : records) {
    if (record.label != Label::message) continue;
    const auto model = model_for(record);
    const double mu = model.gain * record.quadrature_amplitude();
    const double denominator = mu * mu + model.variance_decoy - model.variance_empty;
    const double y = *record.bob_meas;
    // A vanishing denominator means no light carries the message back to Bob.
    const double estimate = denominator > 1e-300 ? (y * y - model.variance_empty) / denominator : 0.0;
    record.m_estimate = estimate;
    outcome.decoded.emplace_back(record.index, estimate);
  }
  return outcome;
}

Transcript run_protocol(const ProtocolConfig& config) { return run_protocol(config, {}); }

Transcript run_protocol(const ProtocolConfig& config, std::span<const double> message) {
  config.validate();
  Rng rng(config.seed);
  auto prep = bob_prepare(config, rng);

  Transcript transcript;
  transcript.config = config;
  auto& records = prep.records;

  std::vector<GaussianStated> delivered;
  delivered.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    auto hop = transmit(prep.states[i], config.channel, Direction::forward, i);
    records[i].eve_fwd_meas = homodyne_sample(hop.tap.tapped_state, 0, 0.0, rng);
    delivered.push_back(std::move(hop.delivered));
  }
  prep.states.clear();

  auto check = alice_select_and_check(delivered, records, config, rng);
  if (!check.verdict.accepted) {
    transcript.pulses = std::move(records);
    transcript.verdict = std::move(check.verdict);
    return transcript;
  }

  std::vector<double> drawn;
  if (message.empty()) {
    drawn.reserve(config.message_count());
    for (const auto& r : records) {
      if (r.label == Label::message) drawn.push_back(config.message_distribution.sample(rng));
    }
    message = drawn;
  }
  auto returned = alice_encode(delivered, records, message, config);
  delivered.clear();

  for (std::size_t i : check.remaining) {
    auto hop = transmit(returned[i], config.channel, Direction::backward, i);
    records[i].eve_bwd_meas = homodyne_sample(hop.tap.tapped_state, 0, 0.0, rng);
    returned[i] = std::move(hop.delivered);
  }

  auto decode = bob_decode(returned, records, config, rng);
  transcript.pulses = std::move(records);
  transcript.verdict = std::move(decode.verdict);
  if (transcript.verdict.accepted) {
    transcript.decoded = std::move(decode.decoded);
  } else {
    for (auto& r : transcript.pulses) r.m_estimate.reset();
  }
  return transcript;
}

std::vector<std::pair<std::size_t, double>> eve_estimate(const Transcript& transcript) {
  const auto& config = transcript.config;
  const auto& channel = config.channel;
  const auto [forward_fraction, backward_fraction] = round_trip_eve_amplitude(channel.eta_E);

  // Amplitude factors between Bob's coherent amplitude and Eve's two readings.
  const double bob_coupler = config.variant == Variant::symmetric ? std::sqrt(1.0 - config.coupler_eta) : 1.0;
  const double alice_coupler = config.variant == Variant::asymmetric ? std::sqrt(1.0 - config.coupler_eta) : 1.0;
  const double pre_tap = std::sqrt(std::pow(channel.eta_L, channel.loss_before_tap));
  const double forward_gain = bob_coupler * forward_fraction * pre_tap;
  const double backward_gain = bob_coupler * alice_coupler * backward_fraction * std::sqrt(channel.eta_L) * pre_tap;

  std::vector<std::pair<std::size_t, double>> estimates;
  for (const auto& r : transcript.pulses) {
    if (r.label != Label::message || !r.eve_fwd_meas || !r.eve_bwd_meas) continue;
    double estimate = 0.0;
    if (forward_gain > 0.0 && backward_gain > 0.0 && *r.eve_fwd_meas != 0.0) {
      const double ratio = (*r.eve_bwd_meas / backward_gain) / (*r.eve_fwd_meas / forward_gain);
      estimate = ratio * ratio;
    }
    estimates.emplace_back(r.index, estimate);
  }
  return estimates;
}

double bin_message(double estimate, int bits, double lo, double hi) {
  if (bits < 1 || bits > 30 || !(lo < hi)) throw std::invalid_argument("bin_message: bad binning parameters");
  const auto levels = (1 << bits) - 1;
  const double step = (hi - lo) / levels;
  const double k = std::clamp(std::round((estimate - lo) / step), 0.0, static_cast<double>(levels));
  return lo + k * step;
}

}  // namespace cvqsdc
