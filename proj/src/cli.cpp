#include "cvqsdc/cli.hpp"

#include "cvqsdc/format.hpp"
#include "cvqsdc/transcript_io.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cvqsdc::cli {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kSweepPrefix = "sweep.";

void apply_sweep_setting(SweepSettings& sweep, std::string_view key, std::string_view value) {
  try {
    if (key == "variant") sweep.variant = parse_curve_variant(value);
    else if (key == "mode") sweep.mode = parse_provenance(value);
    else if (key == "runs") sweep.runs = static_cast<std::size_t>(parse_integer(value));
    else if (key == "threads") sweep.threads = static_cast<unsigned>(parse_integer(value));
    else throw std::invalid_argument("unknown setting");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("setting 'sweep." + std::string(key) + "': " + e.what());
  }
}

void apply_any(Settings& settings, std::string_view key, std::string_view value) {
  if (key.starts_with(kSweepPrefix)) {
    apply_sweep_setting(settings.sweep, key.substr(kSweepPrefix.size()), value);
  } else {
    apply_setting(settings.protocol, key, value);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SweepOptions sweep_options(const RunSpec& spec, const Settings& settings, Provenance mode) {
  SweepOptions options;
  options.mode = mode;
  options.log_form = spec.raw_log ? LogForm::raw : LogForm::one_plus;
  options.runs = settings.sweep.runs;
  options.threads = settings.sweep.threads;
  return options;
}

// Comment lines that make a curve self-describing. The keys are protocol
// setting names, so `compare` can rebuild the conditions from them.
void describe(SecrecyCurve& curve, std::string_view series, const ProtocolConfig& config,
              const SweepOptions& options) {
  curve.add_setting("series", series);
  const std::array<std::string_view, 7> keys = {"squeezing_db",   "db_convention",      "coupler_eta",
                                                "channel.eta_L",  "channel.loss_before_tap",
                                                "alpha_distribution", "message_distribution"};
  const auto all = to_settings(config);
  for (auto key : keys) {
    for (const auto& [k, v] : all) {
      if (k == key) curve.add_setting(k, v);
    }
  }
  curve.add_setting("log_form", options.log_form == LogForm::one_plus ? "log2(1+S/N)" : "log2(S/N)");
  if (options.mode == Provenance::monte_carlo) {
    curve.add_setting("n", std::to_string(config.n));
    curve.add_setting("seed", std::to_string(config.seed));
    curve.add_setting("sweep.runs", std::to_string(options.runs));
  }
}

SecrecyCurve make_curve(CurveVariant variant, std::string_view series, const ProtocolConfig& config,
                        const SweepOptions& options, std::span<const double> grid) {
  auto curve = sweep(variant, grid, config, options);
  describe(curve, series, config, options);
  return curve;
}

std::string render(std::span<const SecrecyCurve> curves) {
  std::ostringstream os;
  write_curves(os, curves);
  return os.str();
}

std::string series_name(double squeezing_db) {
  return squeezing_db == 0.0 ? "coherent" : "squeezed_" + format_exact(squeezing_db) + "dB";
}

int report_error(std::ostream& err, const std::string& command, const std::exception& e) {
  err << "cvqsdc " << command << ": " << e.what() << '\n';
  return kUsage;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, path);
}

Settings load_settings(const RunSpec& spec, const ProtocolConfig& defaults) {
  Settings settings;
  settings.protocol = defaults;
  if (spec.config_path) {
    std::istringstream in(read_file(*spec.config_path));
    for (const auto& [key, value] : read_settings(in)) apply_any(settings, key, value);
  }
  for (const auto& [key, value] : spec.overrides) apply_any(settings, key, value);
  if (spec.seed) settings.protocol.seed = *spec.seed;
  settings.protocol.validate();
  if (settings.sweep.runs == 0) throw std::invalid_argument("sweep.runs must be positive");
  return settings;
}

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  Transcript transcript;
  try {
    const auto settings = load_settings(spec);
    transcript = run_protocol(settings.protocol);
    if (spec.output_path) {
      std::ostringstream os;
      write_transcript(os, transcript);
      write_file_atomic(*spec.output_path, os.str());
    }
  } catch (const std::exception& e) {
    return report_error(err, "run", e);
  }

  std::size_t messages = 0;
  double sq_err = 0.0;
  for (const auto& p : transcript.pulses) {
    if (p.label == Label::message && p.m_true && p.m_estimate) {
      ++messages;
      sq_err += (*p.m_estimate - *p.m_true) * (*p.m_estimate - *p.m_true);
    }
  }
  if (transcript.verdict.accepted) {
    out << "verdict: accepted\n";
    out << "message pulses: " << messages << '\n';
    out << "decode MSE: " << (messages ? format_sig6(sq_err / static_cast<double>(messages)) : "NA") << '\n';
  } else {
    out << "verdict: aborted (" << transcript.verdict.reason << ")\n";
  }
  if (spec.output_path) out << "transcript: " << spec.output_path->string() << '\n';
  return transcript.verdict.accepted ? kOk : kAborted;
}

int cmd_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const auto settings = load_settings(spec);
    const auto options = sweep_options(spec, settings, settings.sweep.mode);
    const auto grid = eta_grid(spec.grid);
    const std::vector curves = {
        make_curve(settings.sweep.variant, series_name(settings.protocol.squeezing_db), settings.protocol, options, grid)};
    const auto text = render(curves);
    if (spec.output_path) {
      write_file_atomic(*spec.output_path, text);
      out << "wrote " << spec.output_path->string() << '\n';
    } else {
      out << text;
    }
  } catch (const std::exception& e) {
    return report_error(err, "sweep", e);
  }
  return kOk;
}

int cmd_figure3(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const auto settings = load_settings(spec);
    const auto grid = eta_grid(spec.grid);
    const auto analytic = sweep_options(spec, settings, Provenance::analytic);
    const auto monte_carlo = sweep_options(spec, settings, Provenance::monte_carlo);
    const std::array<double, 2> squeezing = {0.0, -3.0};

    struct Panel {
      const char* file;
      CurveVariant variant;
      bool with_analytic;
    };
    const std::array<Panel, 3> panels = {{{"figure3_a.csv", CurveVariant::asymmetric, true},
                                          {"figure3_b.csv", CurveVariant::symmetric, true},
                                          {"figure3_c.csv", CurveVariant::symmetric_random_phase, false}}};

    std::vector<std::pair<fs::path, std::string>> files;
    const fs::path dir = spec.output_path.value_or(".");
    for (const auto& panel : panels) {
      std::vector<SecrecyCurve> curves;
      for (double db : squeezing) {
        auto config = settings.protocol;
        config.squeezing_db = db;
        if (panel.with_analytic) curves.push_back(make_curve(panel.variant, series_name(db), config, analytic, grid));
        curves.push_back(make_curve(panel.variant, series_name(db), config, monte_carlo, grid));
      }
      files.emplace_back(dir / panel.file, render(curves));
    }
    fs::create_directories(dir);
    for (const auto& [path, text] : files) {
      write_file_atomic(path, text);
      out << "wrote " << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    return report_error(err, "figure3", e);
  }
  return kOk;
}

int cmd_figure4(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const auto settings = load_settings(spec);
    const auto grid = eta_grid(spec.grid);
    const auto options = sweep_options(spec, settings, Provenance::analytic);
    std::vector<SecrecyCurve> curves;
    for (double db : {0.0, -1.0, -5.0, -10.0}) {
      auto config = settings.protocol;
      config.squeezing_db = db;
      curves.push_back(make_curve(CurveVariant::asymmetric, series_name(db), config, options, grid));
    }
    const fs::path path = spec.output_path.value_or("figure4.csv");
    write_file_atomic(path, render(curves));
    out << "wrote " << path.string() << '\n';
  } catch (const std::exception& e) {
    return report_error(err, "figure4", e);
  }
  return kOk;
}

int cmd_compare(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (!spec.measurement_path) {
    err << "cvqsdc compare: a measurement CSV is required\n";
    return kUsage;
  }
  if (!(spec.tolerance_percent >= 0.0)) {
    err << "cvqsdc compare: tolerance must be non-negative\n";
    return kUsage;
  }
  const double tolerance = spec.tolerance_percent / 100.0;
  const auto form = spec.raw_log ? LogForm::raw : LogForm::one_plus;

  // Relative deviation, or a pass/fail on the absolute value when the
  // reference is exactly zero.
  auto deviation = [](double measured, double reference) {
    if (reference == 0.0) return std::abs(measured) <= 1e-6 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(measured - reference) / std::abs(reference);
  };

  bool all_within = true;
  try {
    std::istringstream in(read_file(*spec.measurement_path));
    const auto curves = read_curves(in);
    for (const auto& curve : curves) {
      if (curve.variant == CurveVariant::symmetric_random_phase) {
        throw std::invalid_argument("no closed-form reference for the random-phase variant");
      }
      ProtocolConfig defaults;
      defaults.squeezing_db = -1.0;
      for (const auto& line : curve.comments) {
        const auto body = trim(std::string_view(line).substr(1));
        if (body.find('=') == std::string_view::npos) continue;
        const auto [key, value] = split_setting(body);
        if (is_protocol_key(key) && key != "seed") apply_setting(defaults, key, value);
      }
      const auto settings = load_settings(spec, defaults);
      auto params = AnalyticParams::from_config(settings.protocol);
      const auto variant = curve.variant == CurveVariant::asymmetric ? Variant::asymmetric : Variant::symmetric;

      out << "# " << to_string(curve.variant) << ", " << to_string(curve.provenance)
          << ", squeezing_db=" << format_exact(settings.protocol.squeezing_db) << ", tolerance "
          << format_exact(spec.tolerance_percent) << "%\n";
      out << std::left << std::setw(10) << "eta_E" << std::setw(12) << "I_AB" << std::setw(12) << "ref" << std::setw(10)
          << "dev%" << std::setw(12) << "I_AE" << std::setw(12) << "ref" << std::setw(10) << "dev%" << std::setw(12)
          << "C_s" << std::setw(12) << "ref" << "status\n";
      for (const auto& row : curve.rows) {
        params.eta_E = row.eta_E;
        const double ab = mutual_info(variant, params, Party::bob, form);
        const double ae = mutual_info(variant, params, Party::eve, form);
        std::string status = "ok";
        double dev_ab = std::numeric_limits<double>::quiet_NaN();
        double dev_ae = dev_ab;
        if (row.aborted()) {
          status = "missing";
        } else {
          dev_ab = deviation(*row.i_ab, ab);
          dev_ae = deviation(*row.i_ae, ae);
          if (!(dev_ab <= tolerance && dev_ae <= tolerance)) status = "FAIL";
        }
        if (status != "ok") all_within = false;
        auto pct = [](double d) { return std::isnan(d) ? std::string("NA") : format_sig6(100.0 * d); };
        out << std::left << std::setw(10) << format_sig6(row.eta_E) << std::setw(12)
            << (row.i_ab ? format_sig6(*row.i_ab) : "NA") << std::setw(12) << format_sig6(ab) << std::setw(10)
            << pct(dev_ab) << std::setw(12) << (row.i_ae ? format_sig6(*row.i_ae) : "NA") << std::setw(12)
            << format_sig6(ae) << std::setw(10) << pct(dev_ae) << std::setw(12)
            << (row.c_s ? format_sig6(*row.c_s) : "NA") << std::setw(12) << format_sig6(secrecy_capacity(ab, ae))
            << status << '\n';
      }
    }
  } catch (const std::exception& e) {
    return report_error(err, "compare", e);
  }
  out << (all_within ? "result: all points within tolerance\n" : "result: some points outside tolerance\n");
  return all_within ? kOk : kCompareFailed;
}

int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.command == "run") return cmd_run(spec, out, err);
  if (spec.command == "sweep") return cmd_sweep(spec, out, err);
  if (spec.command == "figure3") return cmd_figure3(spec, out, err);
  if (spec.command == "figure4") return cmd_figure4(spec, out, err);
  if (spec.command == "compare") return cmd_compare(spec, out, err);
  err << "cvqsdc: unknown command '" << spec.command << "'\n";
  return kUsage;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-variable secure direct communication simulator"};
  app.set_version_flag("--version", "cvqsdc 0.1.0");

  RunSpec spec;
  std::string config_path, output_path, measurement_path;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;

  app.add_option("command", spec.command, "run | sweep | figure3 | figure4 | compare")
      ->required()
      ->check(CLI::IsMember({"run", "sweep", "figure3", "figure4", "compare"}));
  app.add_option("measurement", measurement_path, "Measurement CSV (compare)");
  auto* config_opt = app.add_option("--config", config_path, "key=value configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed, overrides the config");
  auto* out_opt = app.add_option("--out", output_path, "Output file (figure3: output directory)");
  app.add_option("--grid", spec.grid, "Number of eta_E grid points")->check(CLI::Range(2, 1000000));
  app.add_flag("--raw-log", spec.raw_log, "Use log2(S/N) instead of log2(1 + S/N)");
  app.add_option("--tolerance", spec.tolerance_percent, "compare: relative tolerance in percent");
  app.add_option("--set", sets, "Override a setting, key=value (repeatable)");

  try {
    app.parse(argc, argv);
    for (const auto& s : sets) spec.overrides.push_back(split_setting(s));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const std::invalid_argument& e) {
    err << "cvqsdc: " << e.what() << '\n';
    return kUsage;
  }
  if (*config_opt) spec.config_path = config_path;
  if (*seed_opt) spec.seed = seed;
  if (*out_opt) spec.output_path = output_path;
  if (!measurement_path.empty()) spec.measurement_path = measurement_path;
  return dispatch(spec, out, err);
}

}  // namespace cvqsdc::cli
