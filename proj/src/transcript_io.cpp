#include "cvqsdc/transcript_io.hpp"

#include "cvqsdc/config.hpp"
#include "cvqsdc/format.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cvqsdc {
namespace {

constexpr std::string_view kBanner = "# cvqsdc transcript";
constexpr std::string_view kHeader =
    "index,label,alpha_re,alpha_im,theta,m_true,alice_meas,bob_meas,eve_fwd_meas,eve_bwd_meas,m_est";
constexpr std::string_view kVerdictKey = "verdict=";
constexpr std::string_view kAborted = "aborted:";

std::string field(const std::optional<double>& value) { return value ? format_exact(*value) : "NA"; }

std::optional<double> parse_field(std::string_view text) {
  if (text == "NA") return std::nullopt;
  return parse_double(text);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

void write_transcript(std::ostream& out, const Transcript& transcript) {
  out << kBanner << '\n';
  for (const auto& [key, value] : to_settings(transcript.config)) out << key << '=' << value << '\n';
  out << kHeader << '\n';
  for (const auto& p : transcript.pulses) {
    out << p.index << ',' << to_string(p.label) << ',' << format_exact(p.alpha.real()) << ','
        << format_exact(p.alpha.imag()) << ',' << format_exact(p.theta) << ',' << field(p.m_true) << ','
        << field(p.alice_meas) << ',' << field(p.bob_meas) << ',' << field(p.eve_fwd_meas) << ','
        << field(p.eve_bwd_meas) << ',' << field(p.m_estimate) << '\n';
  }
  out << kVerdictKey;
  if (transcript.verdict.accepted) {
    out << "accepted";
  } else {
    out << kAborted << transcript.verdict.reason;
  }
  out << '\n';
}

Transcript read_transcript(std::istream& in) {
  Transcript transcript;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("transcript line " + std::to_string(line_no) + ": " + what);
  };

  enum class Section { settings, pulses, done } section = Section::settings;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = line;
    if (section == Section::done) {
      if (!trim(body).empty()) fail("content after verdict");
      continue;
    }
    if (body.empty() || body.front() == '#') continue;
    if (section == Section::settings) {
      if (body == kHeader) {
        section = Section::pulses;
        continue;
      }
      try {
        const auto [key, value] = split_setting(body);
        apply_setting(transcript.config, key, value);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      continue;
    }
    if (body.starts_with(kVerdictKey)) {
      const auto verdict = body.substr(kVerdictKey.size());
      if (verdict == "accepted") {
        transcript.verdict = Verdict::accept();
      } else if (verdict.starts_with(kAborted)) {
        transcript.verdict = Verdict::abort(std::string(verdict.substr(kAborted.size())));
      } else {
        fail("unknown verdict '" + std::string(verdict) + "'");
      }
      section = Section::done;
      continue;
    }
    const auto cells = split_csv(body);
    if (cells.size() != 11) fail("expected 11 fields, got " + std::to_string(cells.size()));
    PulseRecord p;
    try {
      p.index = static_cast<std::size_t>(parse_integer(cells[0]));
      p.label = parse_label(cells[1]);
      p.alpha = {parse_double(cells[2]), parse_double(cells[3])};
      p.theta = parse_double(cells[4]);
      p.m_true = parse_field(cells[5]);
      p.alice_meas = parse_field(cells[6]);
      p.bob_meas = parse_field(cells[7]);
      p.eve_fwd_meas = parse_field(cells[8]);
      p.eve_bwd_meas = parse_field(cells[9]);
      p.m_estimate = parse_field(cells[10]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (p.m_true && p.label != Label::message) fail("m_true on a non-message pulse");
    if (p.m_estimate) transcript.decoded.emplace_back(p.index, *p.m_estimate);
    transcript.pulses.push_back(p);
  }
  if (section != Section::done) fail("missing verdict line");
  return transcript;
}

}  // namespace cvqsdc
