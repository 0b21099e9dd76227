// Information-theoretic security figures for the two protocol variants.
//
// The analytic mutual informations treat each party's homodyne reading as a
// Gaussian channel carrying u = x sqrt(m_A), x = sqrt(2)|alpha|, and use the
// Shannon-Hartley form I = log2(1 + S/N).
#pragma once

#include "cvqsdc/protocol.hpp"

#include <Eigen/Core>

#include <span>

namespace cvqsdc {

enum class Party { bob, eve };
/// one_plus: log2(1 + S/N). raw: log2(S/N), diverging where S vanishes.
enum class LogForm { one_plus, raw };

std::string_view to_string(Party party);

struct AnalyticParams {
  double eta_E = 1.0;
  double eta_L = 0.9;
  double z = 1.0;
  double var_x_sqrt_m = 0.0;  ///< Var(x sqrt(m_A))
  double var_m = 0.0;         ///< Var(m_A)
  double coupler_eta = 0.99;  ///< transmissivity of the squeezer coupling

  void validate() const;
  /// Transmissivities, squeezing and moments taken from a protocol config.
  static AnalyticParams from_config(const ProtocolConfig& config);
};

/// Alice squeezes after encoding.
double mutual_info_asym(const AnalyticParams& params, Party party, LogForm form = LogForm::one_plus);
/// Bob squeezes at preparation. Throws std::domain_error if the noise term
/// would not stay positive.
double mutual_info_sym(const AnalyticParams& params, Party party, LogForm form = LogForm::one_plus);
double mutual_info(Variant variant, const AnalyticParams& params, Party party, LogForm form = LogForm::one_plus);

/// Signed: negative when Eve learns more than Bob.
double secrecy_capacity(double i_ab, double i_ae);

/// log2(1 + signal / noise). Throws std::invalid_argument unless noise > 0
/// and signal >= 0.
double shannon_hartley(double signal, double noise);

/// Entropies in bits. Probabilities must be non-negative and sum to 1
/// within 1e-9, otherwise std::invalid_argument.
double discrete_entropy(const Eigen::VectorXd& p);
/// H(Y | X) for a joint table with rows indexed by X and columns by Y.
double conditional_entropy(const Eigen::MatrixXd& joint);
double discrete_mutual_info(const Eigen::MatrixXd& joint);

/// Var(x sqrt(m)) for independent x and m: E[x^2] E[m] - (E[x] E[sqrt m])^2.
double variance_of_product(const Distribution& x, const Distribution& m);

inline constexpr double kDefaultInfoCap = 30.0;

/// Streaming Monte-Carlo estimate of one party's information about the
/// per-pulse signal u = x sqrt(m_A), pooled over any number of transcripts.
///
/// Bob divides his reading by the channel gain he knows from the declared
/// channel: S/N = Var(u) / mean((y/g - u)^2).
/// Eve calibrates her backward tap reading against u by least squares with
/// an intercept: S/N = rho^2 / (1 - rho^2). If her backward tap holds no
/// light from Alice she learns nothing and the result is 0.
class MutualInfoAccumulator {
 public:
  explicit MutualInfoAccumulator(Party party) : party_(party) {}

  /// Adds the message pulses of an accepted transcript; aborted ones are
  /// counted and otherwise ignored.
  void add(const Transcript& transcript);
  void merge(const MutualInfoAccumulator& other);

  Party party() const { return party_; }
  std::size_t samples() const { return n_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t aborted() const { return aborted_; }

  double signal_to_noise() const;
  /// Throws std::invalid_argument when no message pulse has been added.
  double bits(LogForm form = LogForm::one_plus, double cap = kDefaultInfoCap) const;

 private:
  Party party_;
  bool blind_ = false;
  std::size_t n_ = 0;
  std::size_t accepted_ = 0;
  std::size_t aborted_ = 0;
  double su_ = 0.0, suu_ = 0.0, sy_ = 0.0, syy_ = 0.0, suy_ = 0.0;
  double sq_err_ = 0.0;
};

double monte_carlo_mutual_info(std::span<const Transcript> transcripts, Party party,
                               LogForm form = LogForm::one_plus, double cap = kDefaultInfoCap);

}  // namespace cvqsdc
