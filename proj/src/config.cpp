#include "cvqsdc/config.hpp"

#include "cvqsdc/format.hpp"

#include <array>
#include <stdexcept>

namespace cvqsdc {
namespace {

constexpr std::array kProtocolKeys = {
    "variant",          "n",
    "control_fraction", "decoy_fraction",
    "squeezing_db",     "db_convention",
    "coupler_eta",      "phase_mode",
    "alpha_distribution", "message_distribution",
    "channel.eta_L",    "channel.eta_E",
    "channel.topology", "channel.loss_before_tap",
    "channel.excess_noise", "channel.declared_eta",
    "check_tolerance_sigma", "seed",
};

std::size_t parse_count(std::string_view value) {
  const auto v = parse_integer(value);
  if (v < 0) throw std::invalid_argument("expected a non-negative integer, got '" + std::string(value) + "'");
  return static_cast<std::size_t>(v);
}

DbConvention parse_db_convention(std::string_view text) {
  if (text == "power") return DbConvention::power;
  if (text == "amplitude") return DbConvention::amplitude;
  throw std::invalid_argument("unknown dB convention '" + std::string(text) + "'");
}

}  // namespace

KeyValue split_setting(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("expected key=value, got '" + std::string(line) + "'");
  }
  const auto key = trim(line.substr(0, eq));
  if (key.empty()) throw std::invalid_argument("empty key in '" + std::string(line) + "'");
  return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

std::vector<KeyValue> read_settings(std::istream& in) {
  std::vector<KeyValue> settings;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    try {
      settings.push_back(split_setting(body));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return settings;
}

bool is_protocol_key(std::string_view key) {
  for (const auto* k : kProtocolKeys) {
    if (key == k) return true;
  }
  return false;
}

void apply_setting(ProtocolConfig& config, std::string_view key, std::string_view value) {
  try {
    if (key == "variant") config.variant = parse_variant(value);
    else if (key == "n") config.n = parse_count(value);
    else if (key == "control_fraction") config.control_fraction = parse_double(value);
    else if (key == "decoy_fraction") config.decoy_fraction = parse_double(value);
    else if (key == "squeezing_db") config.squeezing_db = parse_double(value);
    else if (key == "db_convention") config.db_convention = parse_db_convention(value);
    else if (key == "coupler_eta") config.coupler_eta = parse_double(value);
    else if (key == "phase_mode") config.phase_mode = parse_phase_mode(value);
    else if (key == "alpha_distribution") config.alpha_distribution = Distribution::parse(value);
    else if (key == "message_distribution") config.message_distribution = Distribution::parse(value);
    else if (key == "channel.eta_L") config.channel.eta_L = parse_double(value);
    else if (key == "channel.eta_E") config.channel.eta_E = parse_double(value);
    else if (key == "channel.topology") config.channel.topology = parse_topology(value);
    else if (key == "channel.loss_before_tap") config.channel.loss_before_tap = parse_double(value);
    else if (key == "channel.excess_noise") config.channel.excess_noise = parse_double(value);
    else if (key == "channel.declared_eta") {
      if (value == "auto" || value.empty()) config.channel.declared_eta.reset();
      else config.channel.declared_eta = parse_double(value);
    }
    else if (key == "check_tolerance_sigma") config.check_tolerance_sigma = parse_double(value);
    else if (key == "seed") config.seed = parse_unsigned(value);
    else throw std::invalid_argument("unknown setting");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("setting '" + std::string(key) + "': " + e.what());
  }
}

std::vector<KeyValue> to_settings(const ProtocolConfig& config) {
  const auto& ch = config.channel;
  return {
      {"variant", std::string(to_string(config.variant))},
      {"n", std::to_string(config.n)},
      {"control_fraction", format_exact(config.control_fraction)},
      {"decoy_fraction", format_exact(config.decoy_fraction)},
      {"squeezing_db", format_exact(config.squeezing_db)},
      {"db_convention", config.db_convention == DbConvention::power ? "power" : "amplitude"},
      {"coupler_eta", format_exact(config.coupler_eta)},
      {"phase_mode", std::string(to_string(config.phase_mode))},
      {"alpha_distribution", config.alpha_distribution.to_string()},
      {"message_distribution", config.message_distribution.to_string()},
      {"channel.eta_L", format_exact(ch.eta_L)},
      {"channel.eta_E", format_exact(ch.eta_E)},
      {"channel.topology", std::string(to_string(ch.topology))},
      {"channel.loss_before_tap", format_exact(ch.loss_before_tap)},
      {"channel.excess_noise", format_exact(ch.excess_noise)},
      {"channel.declared_eta", ch.declared_eta ? format_exact(*ch.declared_eta) : "auto"},
      {"check_tolerance_sigma", format_exact(config.check_tolerance_sigma)},
      {"seed", std::to_string(config.seed)},
  };
}

}  // namespace cvqsdc
