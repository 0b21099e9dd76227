// Secrecy curves over a grid of tap transmissivities eta_E, computed from the
// closed-form mutual informations or by running the protocol.
//
// CSV form, one block per curve, blocks separated by a blank line:
//
//   # series=coherent
//   # squeezing_db=0
//   eta_E,I_AB_bits,I_AE_bits,C_s_bits,provenance,variant
//   0,0,0,0,analytic,asymmetric
//   ...
//
// Comment lines are kept verbatim. A row whose protocol runs all aborted has
// NA in the three information columns.
#pragma once

#include "cvqsdc/security.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cvqsdc {

enum class CurveVariant { asymmetric, symmetric, symmetric_random_phase };
enum class Provenance { analytic, monte_carlo };

std::string_view to_string(CurveVariant variant);
std::string_view to_string(Provenance provenance);
CurveVariant parse_curve_variant(std::string_view text);
Provenance parse_provenance(std::string_view text);

struct CurveRow {
  double eta_E = 0.0;
  std::optional<double> i_ab;  ///< empty when every run at this point aborted
  std::optional<double> i_ae;
  std::optional<double> c_s;

  bool aborted() const { return !i_ab.has_value(); }
};

struct SecrecyCurve {
  CurveVariant variant = CurveVariant::asymmetric;
  Provenance provenance = Provenance::analytic;
  std::vector<std::string> comments;  ///< full lines, each starting with '#'
  std::vector<CurveRow> rows;

  /// Grid strictly increasing inside [0, 1] and C_s = I_AB - I_AE within
  /// `tolerance`. Throws std::invalid_argument.
  void validate(double tolerance = 1e-9) const;
  /// Value of a "# key=value" comment, if present.
  std::optional<std::string> setting(std::string_view key) const;
  void add_setting(std::string_view key, std::string_view value);
};

/// `points` evenly spaced values covering [0, 1], endpoints exact.
std::vector<double> eta_grid(std::size_t points);

struct SweepOptions {
  Provenance mode = Provenance::analytic;
  LogForm log_form = LogForm::one_plus;
  std::size_t runs = 1;       ///< protocol runs pooled per grid point
  unsigned threads = 0;       ///< 0: hardware concurrency
  double cap = kDefaultInfoCap;
};

/// The configuration run at one grid point: the variant's protocol settings,
/// Eve's tap at eta_E, and legitimate parties that take the whole observed
/// loss eta_E eta_L for fiber loss. The seed is derived from the base seed,
/// the grid index and the run number.
ProtocolConfig grid_point_config(CurveVariant variant, const ProtocolConfig& base, double eta_E,
                                 std::size_t grid_index, std::size_t run);

SecrecyCurve sweep(CurveVariant variant, std::span<const double> grid, const ProtocolConfig& base,
                   const SweepOptions& options = {});

void write_curves(std::ostream& out, std::span<const SecrecyCurve> curves);
/// Throws std::invalid_argument with a line number on schema errors.
std::vector<SecrecyCurve> read_curves(std::istream& in);

}  // namespace cvqsdc
