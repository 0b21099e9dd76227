// Quantum channel between the legitimate parties: fiber loss plus a passive
// beam-splitter tap held by the eavesdropper, used once in each direction.
#pragma once

#include "cvqsdc/gaussian.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>

namespace cvqsdc {

enum class Topology {
  one_channel,   ///< single fiber with circulators, one tap sees both directions
  two_channels,  ///< separate fibers, one tap each, same transmissivity
};

enum class Direction {
  forward,   ///< Bob -> Alice
  backward,  ///< Alice -> Bob
};

std::string_view to_string(Topology topology);
std::string_view to_string(Direction direction);
Topology parse_topology(std::string_view text);

struct ChannelParams {
  double eta_L = 0.9;  ///< fiber transmissivity, per direction
  double eta_E = 1.0;  ///< transmissivity of Eve's beam splitter
  Topology topology = Topology::two_channels;
  /// Share of the per-direction loss that sits between the sender and the tap
  /// (1: tap at the receiving end, 0.5: tap in the middle of the fiber).
  double loss_before_tap = 1.0;
  /// Variance added to each quadrature of the delivered mode. Zero models a
  /// pure-loss channel.
  double excess_noise = 0.0;
  /// Per-direction transmissivity the legitimate parties believe in. When
  /// unset they assume the fiber alone (eta_L), so a tap shows up as excess loss.
  std::optional<double> declared_eta;

  void validate() const;
  double declared_transmissivity() const { return declared_eta.value_or(eta_L); }
};

struct TapRecord {
  Direction direction;
  GaussianStated tapped_state;
  std::size_t pulse_index;
};

struct Transmission {
  GaussianStated delivered;
  TapRecord tap;
};

/// Sends a single-mode pulse through loss and Eve's tap. The loss is split as
/// eta_L^loss_before_tap before the tap and the remainder after it.
Transmission transmit(const GaussianStated& state, const ChannelParams& params, Direction direction,
                      std::size_t pulse_index = 0);

/// Amplitude fractions of Bob's original pulse reaching Eve on the forward
/// tap, sqrt(1 - eta_E), and on the backward tap, sqrt(eta_E) sqrt(1 - eta_E).
/// Fiber loss is not included.
std::pair<double, double> round_trip_eve_amplitude(double eta_E);

}  // namespace cvqsdc
