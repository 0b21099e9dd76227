// Two-way direct-communication protocol over the tapped channel.
//
// Bob prepares n pulses and sends them to Alice. Alice samples a control set,
// measures it against Bob's disclosed amplitudes to bound the channel loss,
// then encodes her message on the message pulses by attenuation (amplitude
// factor sqrt(m)). Untouched decoys travel back with them. Bob checks the
// decoys' mean and variance and reads the message off the remaining pulses.
//
// The two variants differ in who squeezes:
//   symmetric  - Bob squeezes every pulse at preparation, along its phase
//   asymmetric - Alice squeezes message and decoy pulses after encoding,
//                along a fixed agreed direction (x)
// Squeezing is realised by coupling with squeezed vacuum on a 99/1 beam
// splitter, see mix_with_squeezed_vacuum().
#pragma once

#include "cvqsdc/channel.hpp"
#include "cvqsdc/distribution.hpp"
#include "cvqsdc/gaussian.hpp"
#include "cvqsdc/random.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvqsdc {

enum class Variant { symmetric, asymmetric };
enum class PhaseMode { locked, random };
enum class Label { control, decoy, message };

std::string_view to_string(Variant variant);
std::string_view to_string(PhaseMode mode);
std::string_view to_string(Label label);
Variant parse_variant(std::string_view text);
PhaseMode parse_phase_mode(std::string_view text);
Label parse_label(std::string_view text);

struct ProtocolConfig {
  Variant variant = Variant::asymmetric;
  std::size_t n = 10000;
  double control_fraction = 0.1;
  double decoy_fraction = 0.1;
  double squeezing_db = 0.0;
  DbConvention db_convention = DbConvention::power;
  double coupler_eta = 0.99;
  PhaseMode phase_mode = PhaseMode::locked;
  Distribution alpha_distribution = Distribution::uniform(1.0, 10.0);  ///< |alpha_i|
  Distribution message_distribution = Distribution::uniform(0.1, 1.0);  ///< m_A
  ChannelParams channel;
  double check_tolerance_sigma = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
  double z() const { return db_to_z(squeezing_db, db_convention); }
  std::size_t control_count() const;
  std::size_t decoy_count() const;
  std::size_t message_count() const { return n - control_count() - decoy_count(); }
};

struct PulseRecord {
  std::size_t index = 0;
  Label label = Label::message;
  std::complex<double> alpha;
  double theta = 0.0;
  std::optional<double> m_true;
  std::optional<double> alice_meas;
  std::optional<double> bob_meas;
  std::optional<double> eve_fwd_meas;
  std::optional<double> eve_bwd_meas;
  std::optional<double> m_estimate;

  /// Quadrature amplitude of Bob's coherent state, sqrt(2)|alpha|.
  double quadrature_amplitude() const { return std::sqrt(2.0) * std::abs(alpha); }

  friend bool operator==(const PulseRecord&, const PulseRecord&) = default;
};

struct Verdict {
  bool accepted = true;
  std::string reason;

  static Verdict accept() { return {}; }
  static Verdict abort(std::string why) { return {false, std::move(why)}; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<PulseRecord> pulses;
  Verdict verdict;
  std::vector<std::pair<std::size_t, double>> decoded;
};

/// What Bob expects to see at his detector, per unit of initial quadrature
/// amplitude, if the channel is exactly the declared one.
struct ResponseModel {
  double gain = 0.0;              ///< mean along theta for m = 1, per unit sqrt(2)|alpha|
  double variance_empty = 0.0;    ///< variance for m = 0
  double variance_decoy = 0.0;    ///< variance for m = 1
};

ResponseModel bob_response_model(const ProtocolConfig& config, double theta);

/// State Bob emits for amplitude alpha (single mode).
GaussianStated prepared_state(const ProtocolConfig& config, std::complex<double> alpha);

struct Preparation {
  std::vector<GaussianStated> states;
  std::vector<PulseRecord> records;
};

Preparation bob_prepare(const ProtocolConfig& config, Rng& rng);

struct CheckOutcome {
  Verdict verdict;
  std::vector<std::size_t> remaining;  ///< decoy and message indices, ascending
};

/// Partitions the pulses into control / decoy / message sets, measures the
/// controls and compares them with the declared channel. Writes labels and
/// Alice's outcomes into `records`.
CheckOutcome alice_select_and_check(std::span<const GaussianStated> delivered, std::vector<PulseRecord>& records,
                                    const ProtocolConfig& config, Rng& rng);

/// Encodes `message` (one m_A per message pulse, in index order) and returns
/// the states Alice sends back, indexed like `delivered`. Control entries are
/// passed through untouched and never transmitted.
std::vector<GaussianStated> alice_encode(std::span<const GaussianStated> delivered,
                                         std::vector<PulseRecord>& records, std::span<const double> message,
                                         const ProtocolConfig& config);

struct DecodeOutcome {
  Verdict verdict;
  std::vector<std::pair<std::size_t, double>> decoded;
};

/// Bob's homodyne measurement of decoys and message pulses, decoy checks and,
/// on success, the per-pulse message estimate
///   m_hat = (y^2 - v0) / (mu1^2 + v1 - v0),
/// which is unbiased for m under the declared channel (E[y^2] is affine in m).
DecodeOutcome bob_decode(std::span<const GaussianStated> returned, std::vector<PulseRecord>& records,
                         const ProtocolConfig& config, Rng& rng);

Transcript run_protocol(const ProtocolConfig& config);
Transcript run_protocol(const ProtocolConfig& config, std::span<const double> message);

/// Eve's passive estimate of each message value from her two taps, measured
/// along x: squared ratio of backward to forward reading, normalised by the
/// amplitude fractions she knows she holds. A zero fraction leaves her with
/// the constant estimate 0.
std::vector<std::pair<std::size_t, double>> eve_estimate(const Transcript& transcript);

/// Maps estimates onto the nearest of 2^bits evenly spaced levels in [lo, hi].
double bin_message(double estimate, int bits, double lo, double hi);

}  // namespace cvqsdc
