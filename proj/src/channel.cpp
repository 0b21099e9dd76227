#include "cvqsdc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvqsdc {
namespace {

void check_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string("channel: ") + name + " must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(Topology topology) {
  return topology == Topology::one_channel ? "one_channel" : "two_channels";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::forward ? "forward" : "backward";
}

Topology parse_topology(std::string_view text) {
  if (text == "one_channel") return Topology::one_channel;
  if (text == "two_channels") return Topology::two_channels;
  throw std::invalid_argument("unknown channel topology '" + std::string(text) + "'");
}

void ChannelParams::validate() const {
  check_unit_interval(eta_L, "eta_L");
  check_unit_interval(eta_E, "eta_E");
  check_unit_interval(loss_before_tap, "loss_before_tap");
  if (declared_eta) check_unit_interval(*declared_eta, "declared_eta");
  if (!(excess_noise >= 0.0) || !std::isfinite(excess_noise)) {
    throw std::invalid_argument("channel: excess_noise must be a finite value >= 0");
  }
}

Transmission transmit(const GaussianStated& state, const ChannelParams& params, Direction direction,
                      std::size_t pulse_index) {
  if (state.num_modes() != 1) throw std::invalid_argument("transmit: single-mode signal expected");
  params.validate();

  const double before = std::pow(params.eta_L, params.loss_before_tap);
  const double after = std::pow(params.eta_L, 1.0 - params.loss_before_tap);

  // Ancilla in mode 0, signal in mode 1: mode 0 then carries +sqrt(1 - eta_E)
  // of the signal, mode 1 the transmitted part.
  const auto joint = tensor_product(GaussianStated::vacuum(1), attenuate(state, 0, before));
  const auto split = beam_splitter(joint, 0, 1, params.eta_E);

  auto delivered = attenuate(partial_trace(split, {1}), 0, after);
  if (params.excess_noise > 0.0) delivered = add_noise(delivered, 0, params.excess_noise);

  return {std::move(delivered), TapRecord{direction, partial_trace(split, {0}), pulse_index}};
}

std::pair<double, double> round_trip_eve_amplitude(double eta_E) {
  check_unit_interval(eta_E, "eta_E");
  const double tapped = std::sqrt(1.0 - eta_E);
  return {tapped, std::sqrt(eta_E) * tapped};
}

}  // namespace cvqsdc
