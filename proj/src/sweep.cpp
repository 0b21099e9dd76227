#include "cvqsdc/sweep.hpp"

#include "cvqsdc/format.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace cvqsdc {
namespace {

constexpr std::string_view kCurveHeader = "eta_E,I_AB_bits,I_AE_bits,C_s_bits,provenance,variant";

std::string cell(const std::optional<double>& value) { return value ? format_sig6(*value) : "NA"; }

std::optional<double> parse_cell(std::string_view text) {
  if (text == "NA") return std::nullopt;
  return parse_double(text);
}

CurveRow analytic_row(CurveVariant variant, const ProtocolConfig& config, double eta_E, LogForm form) {
  if (variant == CurveVariant::symmetric_random_phase) {
    throw std::invalid_argument("sweep: the random-phase variant has no closed form, use monte_carlo");
  }
  auto params = AnalyticParams::from_config(config);
  params.eta_E = eta_E;
  const auto v = variant == CurveVariant::asymmetric ? Variant::asymmetric : Variant::symmetric;
  CurveRow row;
  row.eta_E = eta_E;
  row.i_ab = mutual_info(v, params, Party::bob, form);
  row.i_ae = mutual_info(v, params, Party::eve, form);
  row.c_s = secrecy_capacity(*row.i_ab, *row.i_ae);
  return row;
}

CurveRow monte_carlo_row(CurveVariant variant, const ProtocolConfig& base, double eta_E, std::size_t grid_index,
                         const SweepOptions& options) {
  MutualInfoAccumulator bob(Party::bob);
  MutualInfoAccumulator eve(Party::eve);
  for (std::size_t run = 0; run < options.runs; ++run) {
    const auto transcript = run_protocol(grid_point_config(variant, base, eta_E, grid_index, run));
    bob.add(transcript);
    eve.add(transcript);
  }
  CurveRow row;
  row.eta_E = eta_E;
  if (bob.samples() == 0) return row;
  row.i_ab = bob.bits(options.log_form, options.cap);
  row.i_ae = eve.bits(options.log_form, options.cap);
  row.c_s = secrecy_capacity(*row.i_ab, *row.i_ae);
  return row;
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

std::string_view to_string(CurveVariant variant) {
  switch (variant) {
    case CurveVariant::asymmetric: return "asymmetric";
    case CurveVariant::symmetric: return "symmetric";
    case CurveVariant::symmetric_random_phase: return "symmetric_random_phase";
  }
  return "?";
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::analytic ? "analytic" : "monte_carlo";
}

CurveVariant parse_curve_variant(std::string_view text) {
  if (text == "asymmetric") return CurveVariant::asymmetric;
  if (text == "symmetric") return CurveVariant::symmetric;
  if (text == "symmetric_random_phase") return CurveVariant::symmetric_random_phase;
  throw std::invalid_argument("unknown curve variant '" + std::string(text) + "'");
}

Provenance parse_provenance(std::string_view text) {
  if (text == "analytic") return Provenance::analytic;
  if (text == "monte_carlo") return Provenance::monte_carlo;
  throw std::invalid_argument("unknown provenance '" + std::string(text) + "'");
}

void SecrecyCurve::validate(double tolerance) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!(r.eta_E >= 0.0 && r.eta_E <= 1.0)) throw std::invalid_argument("curve: eta_E outside [0, 1]");
    if (i > 0 && !(r.eta_E > rows[i - 1].eta_E)) throw std::invalid_argument("curve: eta_E grid not increasing");
    if (r.i_ab.has_value() != r.i_ae.has_value() || r.i_ab.has_value() != r.c_s.has_value()) {
      throw std::invalid_argument("curve: a row must have all or none of its information values");
    }
    if (r.i_ab && std::isfinite(*r.c_s) && std::abs(*r.c_s - (*r.i_ab - *r.i_ae)) > tolerance) {
      throw std::invalid_argument("curve: C_s differs from I_AB - I_AE at eta_E=" + format_sig6(r.eta_E));
    }
  }
}

std::optional<std::string> SecrecyCurve::setting(std::string_view key) const {
  for (const auto& line : comments) {
    const auto body = trim(std::string_view(line).substr(1));
    if (body.size() > key.size() && body.starts_with(key) && body[key.size()] == '=') {
      return std::string(trim(body.substr(key.size() + 1)));
    }
  }
  return std::nullopt;
}

void SecrecyCurve::add_setting(std::string_view key, std::string_view value) {
  comments.push_back("# " + std::string(key) + "=" + std::string(value));
}

std::vector<double> eta_grid(std::size_t points) {
  if (points < 2) throw std::invalid_argument("eta grid needs at least 2 points");
  std::vector<double> grid(points);
  const auto last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / last;
  return grid;
}

ProtocolConfig grid_point_config(CurveVariant variant, const ProtocolConfig& base, double eta_E,
                                 std::size_t grid_index, std::size_t run) {
  auto config = base;
  config.variant = variant == CurveVariant::asymmetric ? Variant::asymmetric : Variant::symmetric;
  if (variant == CurveVariant::symmetric_random_phase) config.phase_mode = PhaseMode::random;
  config.channel.eta_E = eta_E;
  config.channel.declared_eta = eta_E * config.channel.eta_L;
  config.seed = derive_seed(base.seed, grid_index, run);
  return config;
}

SecrecyCurve sweep(CurveVariant variant, std::span<const double> grid, const ProtocolConfig& base,
                   const SweepOptions& options) {
  SecrecyCurve curve;
  curve.variant = variant;
  curve.provenance = options.mode;
  curve.rows.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw std::invalid_argument("sweep: grid values must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("sweep: grid must be strictly increasing");
  }

  if (options.mode == Provenance::analytic) {
    for (std::size_t i = 0; i < grid.size(); ++i) curve.rows[i] = analytic_row(variant, base, grid[i], options.log_form);
    return curve;
  }
  if (options.runs == 0) throw std::invalid_argument("sweep: runs must be positive");
  base.validate();

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = std::min<std::size_t>(options.threads ? options.threads : hw, grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        curve.rows[i] = monte_carlo_row(variant, base, grid[i], i, options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return curve;
}

void write_curves(std::ostream& out, std::span<const SecrecyCurve> curves) {
  bool first = true;
  for (const auto& curve : curves) {
    if (!first) out << '\n';
    first = false;
    for (const auto& c : curve.comments) out << c << '\n';
    out << kCurveHeader << '\n';
    for (const auto& r : curve.rows) {
      out << format_sig6(r.eta_E) << ',' << cell(r.i_ab) << ',' << cell(r.i_ae) << ',' << cell(r.c_s) << ','
          << to_string(curve.provenance) << ',' << to_string(curve.variant) << '\n';
    }
  }
}

std::vector<SecrecyCurve> read_curves(std::istream& in) {
  std::vector<SecrecyCurve> curves;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("curve line " + std::to_string(line_no) + ": " + what);
  };

  SecrecyCurve current;
  enum class State { between, comments, rows } state = State::between;
  auto finish = [&] {
    if (state == State::comments) fail("comments without a header");
    if (state == State::rows) {
      try {
        current.validate(1e-5);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      curves.push_back(std::move(current));
    }
    current = SecrecyCurve{};
    state = State::between;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      finish();
      continue;
    }
    if (line.front() == '#') {
      if (state == State::rows) fail("comment inside a data block");
      current.comments.push_back(line);
      state = State::comments;
      continue;
    }
    if (state != State::rows) {
      if (line != kCurveHeader) fail("expected header '" + std::string(kCurveHeader) + "'");
      state = State::rows;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 6) fail("expected 6 fields, got " + std::to_string(cells.size()));
    CurveRow row;
    Provenance provenance{};
    CurveVariant variant{};
    try {
      row.eta_E = parse_double(cells[0]);
      row.i_ab = parse_cell(cells[1]);
      row.i_ae = parse_cell(cells[2]);
      row.c_s = parse_cell(cells[3]);
      provenance = parse_provenance(cells[4]);
      variant = parse_curve_variant(cells[5]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (current.rows.empty()) {
      current.provenance = provenance;
      current.variant = variant;
    } else if (provenance != current.provenance || variant != current.variant) {
      fail("provenance and variant must be constant within a block");
    }
    current.rows.push_back(row);
  }
  finish();
  if (curves.empty()) throw std::invalid_argument("curve file holds no data");
  return curves;
}

}  // namespace cvqsdc
