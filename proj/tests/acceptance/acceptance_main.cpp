// Acceptance suite: one PASS/FAIL line per criterion, with supporting detail
// on indented "info:" lines. Exits non-zero if any criterion fails.
#include "cvqsdc/cli.hpp"
#include "cvqsdc/format.hpp"
#include "cvqsdc/gaussian.hpp"
#include "cvqsdc/security.hpp"
#include "cvqsdc/sweep.hpp"
#include "cvqsdc/transcript_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace cvqsdc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> info;
};

std::string g6(double v) { return format_sig6(v); }

// Default analytic parameters (eta_L = 0.9, default distributions).
AnalyticParams params_at(double eta_E, double squeezing_db) {
  ProtocolConfig c;
  c.squeezing_db = squeezing_db;
  auto p = AnalyticParams::from_config(c);
  p.eta_E = eta_E;
  return p;
}

double cs(Variant v, const AnalyticParams& p) {
  return secrecy_capacity(mutual_info(v, p, Party::bob), mutual_info(v, p, Party::eve));
}

double clamp0(double v) { return std::max(0.0, v); }

Outcome endpoint_identity() {
  Outcome o;
  int checked = 0, nonzero = 0;
  for (double db : {0.0, -1.0, -3.0, -5.0, -10.0}) {
    for (double eta_E : {0.0, 1.0}) {
      const auto p = params_at(eta_E, db);
      for (auto v : {Variant::asymmetric, Variant::symmetric}) {
        ++checked;
        const double i = mutual_info(v, p, Party::eve);
        if (i != 0.0) {
          ++nonzero;
          o.info.push_back(std::string(to_string(v)) + " eta_E=" + g6(eta_E) + " dB=" + g6(db) + " I_AE=" + g6(i));
        }
      }
    }
  }
  o.pass = nonzero == 0;
  o.summary = std::to_string(checked - nonzero) + "/" + std::to_string(checked) + " endpoint values exactly 0";
  return o;
}

Outcome monotonicity() {
  Outcome o;
  int violations = 0;
  const auto grid = eta_grid(101);
  for (double z : {1.0, std::pow(10.0, -0.3)}) {
    for (auto v : {Variant::asymmetric, Variant::symmetric}) {
      double prev = -1.0;
      for (double eta_E : grid) {
        auto p = params_at(eta_E, 0.0);
        p.z = z;
        const double i = mutual_info(v, p, Party::bob);
        if (i < prev) ++violations;
        prev = i;
      }
    }
  }
  o.pass = violations == 0;
  o.summary = std::to_string(violations) + " decreases over 4 curves x 101 points";
  return o;
}

Outcome asymmetric_advantage() {
  Outcome o;
  const auto grid = eta_grid(101);
  int fails = 0, fails_clamped = 0, fails_upper = 0;
  double worst = 0.0, worst_eta = 0.0;
  for (double eta_E : grid) {
    const auto p = params_at(eta_E, -3.0);
    const double a = cs(Variant::asymmetric, p), s = cs(Variant::symmetric, p);
    if (a < s) {
      ++fails;
      if (s - a > worst) worst = s - a, worst_eta = eta_E;
      if (eta_E >= 0.5) ++fails_upper;
    }
    if (clamp0(a) < clamp0(s)) ++fails_clamped;
  }
  o.pass = fails == 0;
  o.summary = std::to_string(101 - fails) + "/101 grid points with C_s(asym) >= C_s(sym) at -3 dB";
  if (fails) {
    o.info.push_back("largest shortfall " + g6(worst) + " bits at eta_E=" + g6(worst_eta));
    if (fails_upper == 0 && fails_clamped == 0) {
      o.info.push_back("every violation sits where both capacities are negative (Eve out-hears Bob)");
    }
  }
  o.info.push_back("points with eta_E >= 0.5 violating: " + std::to_string(fails_upper));
  o.info.push_back("violations with C_s clamped at 0: " + std::to_string(fails_clamped));
  return o;
}

Outcome squeezing_advantage() {
  Outcome o;
  const auto grid = eta_grid(101);
  int fails = 0, fails_clamped = 0, fails_upper = 0;
  for (double eta_E : grid) {
    const double sq = cs(Variant::asymmetric, params_at(eta_E, -3.0));
    const double coh = cs(Variant::asymmetric, params_at(eta_E, 0.0));
    if (sq < coh) {
      ++fails;
      if (eta_E >= 0.5) ++fails_upper;
    }
    if (clamp0(sq) < clamp0(coh)) ++fails_clamped;
  }
  o.pass = fails == 0;
  o.summary = std::to_string(101 - fails) + "/101 grid points with C_s(-3 dB) >= C_s(coherent), asymmetric";
  if (fails && fails_upper == 0 && fails_clamped == 0) {
    o.info.push_back("every violation sits where C_s is negative; squeezing then raises I_AE more than I_AB");
  }
  o.info.push_back("points with eta_E >= 0.5 violating: " + std::to_string(fails_upper));
  o.info.push_back("violations with C_s clamped at 0: " + std::to_string(fails_clamped));
  return o;
}

Outcome saturation() {
  Outcome o;
  auto gaps = [](double eta_E) {
    const double c1 = cs(Variant::asymmetric, params_at(eta_E, -1.0));
    const double c5 = cs(Variant::asymmetric, params_at(eta_E, -5.0));
    const double c10 = cs(Variant::asymmetric, params_at(eta_E, -10.0));
    return std::pair{c5 - c1, c10 - c5};
  };
  const auto [g15, g510] = gaps(0.5);
  o.pass = g15 > g510;
  o.summary = "at eta_E=0.5: gain(-1->-5 dB)=" + g6(g15) + " vs gain(-5->-10 dB)=" + g6(g510);
  if (!o.pass) {
    o.info.push_back("at eta_E=0.5 Bob's and Eve's closed forms coincide, so C_s is 0 for every squeezing level");
  }
  for (double eta_E : {0.6, 0.75, 0.9}) {
    const auto [a, b] = gaps(eta_E);
    o.info.push_back("eta_E=" + g6(eta_E) + ": gains " + g6(a) + " vs " + g6(b) + (a > b ? " (saturating)" : ""));
  }
  return o;
}

Outcome monte_carlo_agreement(std::size_t runs) {
  Outcome o;
  const auto grid = eta_grid(11);
  int checked = 0, within = 0;
  double worst = 0.0;
  std::string worst_where;
  for (double db : {-1.0, 0.0}) {
    ProtocolConfig base;
    base.n = 100000;
    base.squeezing_db = db;
    SweepOptions options;
    options.mode = Provenance::monte_carlo;
    options.runs = runs;
    const auto mc = sweep(CurveVariant::asymmetric, grid, base, options);
    const auto an = sweep(CurveVariant::asymmetric, grid, base);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& m = mc.rows[i];
      const auto& a = an.rows[i];
      if (m.aborted()) {
        checked += 2;
        o.info.push_back("dB=" + g6(db) + " eta_E=" + g6(grid[i]) + ": every run aborted");
        continue;
      }
      for (auto [meas, ref, who] : {std::tuple{*m.i_ab, *a.i_ab, "I_AB"}, std::tuple{*m.i_ae, *a.i_ae, "I_AE"}}) {
        ++checked;
        const double dev = ref == 0.0 ? (meas == 0.0 ? 0.0 : INFINITY) : std::abs(meas - ref) / ref;
        if (dev <= 0.05) ++within;
        if (dev > worst) {
          worst = dev;
          worst_where = std::string(who) + " dB=" + g6(db) + " eta_E=" + g6(grid[i]) + " (mc " + g6(meas) +
                        ", analytic " + g6(ref) + ")";
        }
      }
    }
  }
  o.pass = within == checked;
  o.summary = std::to_string(within) + "/" + std::to_string(checked) + " values within 5%, " + std::to_string(runs) +
              " pooled 1e5-pulse runs per point";
  o.info.push_back("largest deviation " + g6(100 * worst) + "% at " + worst_where);
  return o;
}

Outcome random_phase_leakage() {
  Outcome o;
  ProtocolConfig base;
  base.n = 100000;
  base.squeezing_db = -3.0;
  SweepOptions options;
  options.mode = Provenance::monte_carlo;
  double max_ae = 0.0, at = 0.0;
  bool any_aborted = false;
  for (double db : {0.0, -3.0}) {
    base.squeezing_db = db;
    const auto curve = sweep(CurveVariant::symmetric_random_phase, eta_grid(101), base, options);
    for (const auto& r : curve.rows) {
      if (r.aborted()) {
        any_aborted = true;
        continue;
      }
      if (*r.i_ae > max_ae) max_ae = *r.i_ae, at = r.eta_E;
    }
  }
  o.pass = max_ae < 0.05 && !any_aborted;
  o.summary = "max I_AE over 101 points x {0, -3 dB} = " + g6(max_ae) + " bits (eta_E=" + g6(at) + ")";
  if (any_aborted) o.info.push_back("some grid points aborted");

  // Eve's squared-ratio estimate still sees the message when the phase is random.
  ProtocolConfig c = grid_point_config(CurveVariant::symmetric_random_phase, base, 0.5, 0, 0);
  c.squeezing_db = 0.0;
  const auto t = run_protocol(c);
  if (t.verdict.accepted) {
    std::vector<double> est, truth;
    for (const auto& [i, m] : eve_estimate(t)) {
      est.push_back(m);
      truth.push_back(*t.pulses[i].m_true);
    }
    // Spearman rank correlation, robust to the heavy tails of a ratio estimate.
    auto ranks = [](const std::vector<double>& v) {
      std::vector<std::size_t> idx(v.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
      std::vector<double> r(v.size());
      for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
      return r;
    };
    const auto ra = ranks(est), rb = ranks(truth);
    const double n = static_cast<double>(ra.size());
    double d2 = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) d2 += (ra[k] - rb[k]) * (ra[k] - rb[k]);
    const double spearman = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
    o.info.push_back("eve_estimate vs m_A at eta_E=0.5, random phase: Spearman " + g6(spearman));
  }
  return o;
}

Outcome gaussian_properties() {
  Outcome o;
  Rng rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> failed;

  double max_defect = 0.0;
  for (int i = 0; i < 10000; ++i) {
    max_defect = std::max({max_defect, symplectic_defect(SymplecticOp<double>::squeezer(0.001 + 0.999 * unit(rng))),
                           symplectic_defect(SymplecticOp<double>::beam_splitter(unit(rng))),
                           symplectic_defect(SymplecticOp<double>::rotation(20 * unit(rng) - 10))});
  }
  if (!(max_defect < 1e-10)) failed.push_back("symplectic form");
  o.info.push_back("max ||S Omega S^T - Omega||_inf = " + g6(max_defect));

  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const bool two = rng() % 2;
    auto s = coherent_state(4 * unit(rng) - 2, 4 * unit(rng) - 2);
    if (two) s = tensor_product(s, squeezed_vacuum(0.05 + 0.95 * unit(rng), 6 * unit(rng)));
    const int steps = 1 + static_cast<int>(rng() % 10);
    for (int k = 0; k < steps; ++k) {
      const int mode = two ? static_cast<int>(rng() % 2) : 0;
      switch (rng() % 5) {
        case 0: s = squeeze(s, mode, 0.05 + 0.95 * unit(rng)); break;
        case 1: s = rotate(s, mode, 2 * std::numbers::pi * unit(rng)); break;
        case 2: s = attenuate(s, mode, unit(rng)); break;
        case 3: s = mix_with_squeezed_vacuum(partial_trace(s, {mode}), 0.05 + 0.95 * unit(rng), unit(rng), unit(rng));
                if (two) s = tensor_product(s, GaussianStated::vacuum(1));
                break;
        default: if (two) s = beam_splitter(s, 0, 1, unit(rng)); break;
      }
    }
    violations += !satisfies_uncertainty(s);
  }
  if (violations) failed.push_back("uncertainty");
  o.info.push_back("uncertainty violations after 10^4 random sequences: " + std::to_string(violations));

  double comp = 0.0;
  for (int i = 0; i < 10000; ++i) {
    auto s = tensor_product(squeeze(coherent_state(unit(rng), unit(rng)), 0, 0.1 + 0.9 * unit(rng)),
                            squeezed_vacuum(0.1 + 0.9 * unit(rng), unit(rng)));
    s = beam_splitter(s, 0, 1, unit(rng));
    const double a = unit(rng), b = unit(rng);
    const auto lhs = attenuate(attenuate(s, 1, a), 1, b);
    const auto rhs = attenuate(s, 1, a * b);
    comp = std::max({comp, (Eigen::MatrixXd(lhs.cov()) - Eigen::MatrixXd(rhs.cov())).cwiseAbs().maxCoeff(),
                     (Eigen::VectorXd(lhs.mean()) - Eigen::VectorXd(rhs.mean())).cwiseAbs().maxCoeff()});
  }
  if (!(comp < 1e-12)) failed.push_back("loss composition");
  o.info.push_back("loss composition max deviation " + g6(comp));

  double worst_se = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = rotate(squeeze(coherent_state(3 * unit(rng), -unit(rng)), 0, 0.2 + 0.8 * unit(rng)), 0, 3 * unit(rng));
    const double phi = 3 * unit(rng);
    const auto st = homodyne_stats(s, 0, phi);
    constexpr int n = 100000;
    double sum = 0, sum2 = 0;
    for (int k = 0; k < n; ++k) {
      const double y = homodyne_sample(s, 0, phi, rng);
      sum += y;
      sum2 += y * y;
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    worst_se = std::max({worst_se, std::abs(mean - st.mean) / std::sqrt(st.variance / n),
                         std::abs(var - st.variance) / (st.variance * std::sqrt(2.0 / (n - 1)))});
  }
  if (!(worst_se < 5.0)) failed.push_back("homodyne moments");
  o.info.push_back("homodyne moments: worst deviation " + g6(worst_se) + " standard errors over 10^5 draws");

  double mix = 0.0, mix_abs = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double z = 0.01 + 0.99 * unit(rng);
    const auto out = mix_with_squeezed_vacuum(coherent_state(5 * unit(rng), 5 * unit(rng)), z);
    const double vx = 0.5 * (0.01 + 0.99 * z * z), vp = 0.5 * (0.01 + 0.99 / (z * z));
    // Relative, since the anti-squeezed variance reaches ~5e3 at z = 0.01.
    mix = std::max({mix, std::abs(out.cov()(0, 0) - vx) / vx, std::abs(out.cov()(1, 1) - vp) / vp,
                    std::abs(out.cov()(0, 1)) / std::sqrt(vx * vp)});
    mix_abs = std::max({mix_abs, std::abs(out.cov()(0, 0) - vx), std::abs(out.cov()(1, 1) - vp)});
  }
  if (!(mix < 1e-12)) failed.push_back("squeezer coupling covariance");
  o.info.push_back("squeezer coupling covariance max relative deviation " + g6(mix) + " (absolute " + g6(mix_abs) +
                   ", z down to 0.01)");

  o.pass = failed.empty();
  o.summary = o.pass ? "all five properties hold" : "failed:";
  for (const auto& f : failed) o.summary += " " + f;
  return o;
}

Outcome detection() {
  Outcome o;
  int aborted = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ProtocolConfig c;
    c.channel.eta_E = 0.5;
    c.seed = seed;
    aborted += !run_protocol(c).verdict.accepted;
  }
  o.pass = aborted >= 99;
  o.summary = std::to_string(aborted) + "/100 seeds aborted with an undeclared eta_E=0.5 tap";
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "cvqsdc_acceptance";
  fs::remove_all(root);

  auto invoke = [&](const std::vector<std::string>& args, const fs::path& dir) {
    std::vector<std::string> full = {"cvqsdc"};
    for (auto a : args) {
      if (a.starts_with("@")) a = (dir / a.substr(1)).string();
      full.push_back(a);
    }
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    std::string text = std::to_string(code) + "\n" + out.str() + err.str();
    // Stdout mentions the output paths, which differ between the two trees.
    for (auto pos = text.find(dir.string()); pos != std::string::npos; pos = text.find(dir.string())) {
      text.replace(pos, dir.string().size(), "<dir>");
    }
    return text;
  };

  const std::vector<std::vector<std::string>> commands = {
      {"run", "--seed", "7", "--set", "phase_mode=random", "--out", "@run.txt"},
      {"run", "--seed", "7", "--set", "channel.eta_E=0.4", "--out", "@abort.txt"},
      {"sweep", "--seed", "7", "--set", "sweep.mode=monte_carlo", "--grid", "11", "--out", "@sweep.csv"},
      {"figure3", "--seed", "7", "--set", "n=2000", "--out", "@fig3"},
      {"figure4", "--seed", "7", "--out", "@fig4.csv"},
      {"compare", "@sweep.csv", "--seed", "7"},
  };

  bool same = true;
  for (int pass = 0; pass < 2; ++pass) fs::create_directories(root / std::to_string(pass));
  for (const auto& cmd : commands) {
    const auto a = invoke(cmd, root / "0");
    const auto b = invoke(cmd, root / "1");
    if (a != b) {
      same = false;
      o.info.push_back("stdout/exit differs for '" + cmd[0] + "'");
    }
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "0")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), root / "0");
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream os;
      os << in.rdbuf();
      return os.str();
    };
    if (!fs::exists(root / "1" / rel) || slurp(e.path()) != slurp(root / "1" / rel)) {
      same = false;
      o.info.push_back("file differs: " + rel.string());
    }
  }
  fs::remove_all(root);
  o.pass = same && files == 7;
  o.summary = std::to_string(commands.size()) + " commands, " + std::to_string(files) +
              " output files byte-identical across two invocations";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  // Pooled runs per grid point for the Monte-Carlo agreement check.
  std::size_t runs = 24;
  if (argc > 1) runs = static_cast<std::size_t>(std::stoul(argv[1]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analytic endpoint identity", endpoint_identity},
      {"I_AB monotone in eta_E", monotonicity},
      {"asymmetric advantage", asymmetric_advantage},
      {"squeezing advantage", squeezing_advantage},
      {"saturation", saturation},
      {"Monte-Carlo vs analytic", [runs] { return monte_carlo_agreement(runs); }},
      {"random-phase leakage suppression", random_phase_leakage},
      {"Gaussian-engine properties", gaussian_properties},
      {"protocol detection", detection},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k + 1 << ". " << criteria[k].first << ": " << o.summary << " ("
              << g6(secs) << " s)\n";
    for (const auto& line : o.info) std::cout << "       info: " << line << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
