// Flat key=value configuration. Keys use dotted section prefixes, e.g.
//
//   variant=asymmetric
//   squeezing_db=-3
//   alpha_distribution=uniform:1,10
//   channel.eta_L=0.9
//
// Blank lines and lines starting with '#' are ignored.
#pragma once

#include "cvqsdc/protocol.hpp"

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvqsdc {

using KeyValue = std::pair<std::string, std::string>;

/// Splits "key=value"; throws std::invalid_argument if there is no '='.
KeyValue split_setting(std::string_view line);

/// Reads all settings from a key=value stream, keeping their order.
std::vector<KeyValue> read_settings(std::istream& in);

/// Applies one protocol setting. Throws std::invalid_argument for unknown
/// keys or unparsable values.
void apply_setting(ProtocolConfig& config, std::string_view key, std::string_view value);

bool is_protocol_key(std::string_view key);

/// Every protocol setting, in a fixed order, formatted so that applying them
/// to a default config reproduces `config` exactly.
std::vector<KeyValue> to_settings(const ProtocolConfig& config);

}  // namespace cvqsdc
