// Gaussian-state algebra: first moments and covariance matrices of a few
// optical modes, symplectic operations on them, pure-loss channels and
// homodyne measurement.
//
// Conventions used throughout the library:
//   * quadratures are ordered x1, p1, x2, p2, ...
//   * vacuum variance is 1/2 (hbar-free units)
//   * the symplectic form is block-diagonal with [[0, 1], [-1, 0]] per mode
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvqsdc {

/// Upper bound on the modes held by one state. Storage is inline, so states
/// never touch the heap; a signal plus one ancilla is all any operation needs.
inline constexpr int kMaxModes = 2;
inline constexpr int kMaxQuadratures = 2 * kMaxModes;

template <typename Scalar>
using QuadVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxQuadratures, 1>;
template <typename Scalar>
using QuadMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxQuadratures, kMaxQuadratures>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
inline constexpr Scalar kVacuumVariance = Scalar(0.5);

/// Tolerance for symmetry and symplectic-condition checks.
template <typename Scalar>
constexpr Scalar structural_tolerance() {
  return std::max(Scalar(1e-10), Scalar(100) * Eigen::NumTraits<Scalar>::epsilon());
}

/// Tolerance on the uncertainty bound nu >= 1/2.
template <typename Scalar>
constexpr Scalar uncertainty_tolerance() {
  return std::max(Scalar(1e-9), Scalar(1000) * Eigen::NumTraits<Scalar>::epsilon());
}

template <typename Scalar>
class GaussianState {
 public:
  using Vector = QuadVector<Scalar>;
  using Matrix = QuadMatrix<Scalar>;

  GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto dim = mean_.size();
    if (dim == 0 || dim % 2 != 0 || dim > kMaxQuadratures) {
      throw std::invalid_argument("GaussianState: mean must have 2*n entries, 1 <= n <= " +
                                  std::to_string(kMaxModes));
    }
    if (cov_.rows() != dim || cov_.cols() != dim) {
      throw std::invalid_argument("GaussianState: covariance shape does not match mean");
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
      throw std::invalid_argument("GaussianState: non-finite moments");
    }
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > structural_tolerance<Scalar>()) {
      throw std::invalid_argument("GaussianState: covariance is not symmetric");
    }
  }

  static GaussianState vacuum(int num_modes = 1) {
    if (num_modes < 1 || num_modes > kMaxModes) {
      throw std::invalid_argument("GaussianState::vacuum: bad mode count");
    }
    const int dim = 2 * num_modes;
    return GaussianState(Vector::Zero(dim), kVacuumVariance<Scalar> * Matrix::Identity(dim, dim));
  }

  int num_modes() const { return static_cast<int>(mean_.size() / 2); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  Vector2<Scalar> mode_mean(int mode) const {
    check_mode(mode);
    return mean_.template segment<2>(2 * mode);
  }
  Matrix2<Scalar> mode_cov(int mode) const {
    check_mode(mode);
    return cov_.template block<2, 2>(2 * mode, 2 * mode);
  }

  void check_mode(int mode) const {
    if (mode < 0 || mode >= num_modes()) {
      throw std::out_of_range("mode index " + std::to_string(mode) + " outside state with " +
                              std::to_string(num_modes()) + " mode(s)");
    }
  }

 private:
  Vector mean_;
  Matrix cov_;
};

using GaussianStated = GaussianState<double>;

/// A linear map on the quadratures of k modes.
template <typename Scalar>
struct SymplecticOp {
  QuadMatrix<Scalar> matrix;
  std::string_view name;
  Scalar parameter = Scalar(0);

  int num_modes() const { return static_cast<int>(matrix.rows() / 2); }
  std::string description() const { return std::string(name) + "(" + std::to_string(parameter) + ")"; }

  /// S(z) = diag(z, 1/z).
  static SymplecticOp squeezer(Scalar z) {
    if (!(z > Scalar(0)) || z > Scalar(1)) {
      throw std::invalid_argument("squeezer: z must lie in (0, 1]");
    }
    QuadMatrix<Scalar> m = QuadMatrix<Scalar>::Zero(2, 2);
    m(0, 0) = z;
    m(1, 1) = Scalar(1) / z;
    return {m, "squeezer", z};
  }

  /// Two-mode beam splitter with cos^2(theta) = eta. Mode A keeps the
  /// transmitted part of A; mode B receives -sin(theta) of A.
  static SymplecticOp beam_splitter(Scalar eta) {
    if (!(eta >= Scalar(0)) || eta > Scalar(1)) {
      throw std::invalid_argument("beam_splitter: transmissivity must lie in [0, 1]");
    }
    const Scalar c = std::sqrt(eta);
    const Scalar s = std::sqrt(Scalar(1) - eta);
    QuadMatrix<Scalar> m = QuadMatrix<Scalar>::Zero(4, 4);
    m(0, 0) = c;  m(0, 2) = s;
    m(1, 1) = c;  m(1, 3) = s;
    m(2, 0) = -s; m(2, 2) = c;
    m(3, 1) = -s; m(3, 3) = c;
    return {m, "beam_splitter", eta};
  }

  /// Phase-space rotation taking the x axis onto the direction phi.
  static SymplecticOp rotation(Scalar phi) {
    const Scalar c = std::cos(phi);
    const Scalar s = std::sin(phi);
    QuadMatrix<Scalar> m(2, 2);
    m << c, -s, s, c;
    return {m, "rotation", phi};
  }
};

template <typename Scalar>
QuadMatrix<Scalar> symplectic_form(int num_modes) {
  QuadMatrix<Scalar> omega = QuadMatrix<Scalar>::Zero(2 * num_modes, 2 * num_modes);
  for (int k = 0; k < num_modes; ++k) {
    omega(2 * k, 2 * k + 1) = Scalar(1);
    omega(2 * k + 1, 2 * k) = Scalar(-1);
  }
  return omega;
}

/// Infinity norm of S*Omega*S^T - Omega.
template <typename Scalar>
Scalar symplectic_defect(const SymplecticOp<Scalar>& op) {
  const auto omega = symplectic_form<Scalar>(op.num_modes());
  const QuadMatrix<Scalar> diff = op.matrix * omega * op.matrix.transpose() - omega;
  return diff.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Scalar>
bool is_symplectic(const SymplecticOp<Scalar>& op, Scalar tol = structural_tolerance<Scalar>()) {
  return symplectic_defect(op) < tol;
}

/// Applies `op` to the listed modes of `state` (mode i of the op acts on modes[i]).
template <typename Scalar>
GaussianState<Scalar> apply(const GaussianState<Scalar>& state, const SymplecticOp<Scalar>& op,
                            std::span<const int> modes) {
  if (static_cast<int>(modes.size()) != op.num_modes()) {
    throw std::invalid_argument("apply: " + op.description() + " needs " + std::to_string(op.num_modes()) +
                                " mode(s)");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    state.check_mode(modes[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (modes[i] == modes[j]) throw std::invalid_argument("apply: repeated mode index");
    }
  }
  const int dim = 2 * state.num_modes();
  QuadMatrix<Scalar> s = QuadMatrix<Scalar>::Identity(dim, dim);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      s.template block<2, 2>(2 * modes[i], 2 * modes[j]) =
          op.matrix.template block<2, 2>(2 * static_cast<int>(i), 2 * static_cast<int>(j));
    }
  }
  typename GaussianState<Scalar>::Matrix cov = s * state.cov() * s.transpose();
  // S*cov*S^T is symmetric in exact arithmetic; drop rounding asymmetry.
  cov = (cov + cov.transpose().eval()) * Scalar(0.5);
  return GaussianState<Scalar>(s * state.mean(), cov);
}

template <typename Scalar>
GaussianState<Scalar> apply(const GaussianState<Scalar>& state, const SymplecticOp<Scalar>& op,
                            std::initializer_list<int> modes) {
  return apply(state, op, std::span<const int>(modes.begin(), modes.size()));
}

/// |alpha> with alpha = alpha_re + i*alpha_im: mean sqrt(2)*(Re, Im), vacuum noise.
template <typename Scalar>
GaussianState<Scalar> coherent_state(Scalar alpha_re, Scalar alpha_im) {
  typename GaussianState<Scalar>::Vector mean(2);
  mean << std::sqrt(Scalar(2)) * alpha_re, std::sqrt(Scalar(2)) * alpha_im;
  return GaussianState<Scalar>(mean, kVacuumVariance<Scalar> * GaussianState<Scalar>::Matrix::Identity(2, 2));
}

template <typename Scalar>
GaussianState<Scalar> squeeze(const GaussianState<Scalar>& state, int mode, Scalar z) {
  return apply(state, SymplecticOp<Scalar>::squeezer(z), {mode});
}

template <typename Scalar>
GaussianState<Scalar> rotate(const GaussianState<Scalar>& state, int mode, Scalar phi) {
  return apply(state, SymplecticOp<Scalar>::rotation(phi), {mode});
}

template <typename Scalar>
GaussianState<Scalar> beam_splitter(const GaussianState<Scalar>& state, int mode_a, int mode_b, Scalar eta) {
  return apply(state, SymplecticOp<Scalar>::beam_splitter(eta), {mode_a, mode_b});
}

/// Vacuum squeezed by z along the quadrature x_angle = cos(angle) x + sin(angle) p.
template <typename Scalar>
GaussianState<Scalar> squeezed_vacuum(Scalar z, Scalar angle = Scalar(0)) {
  return rotate(squeeze(GaussianState<Scalar>::vacuum(1), 0, z), 0, angle);
}

/// Joint state of two independent systems; modes of `b` follow those of `a`.
template <typename Scalar>
GaussianState<Scalar> tensor_product(const GaussianState<Scalar>& a, const GaussianState<Scalar>& b) {
  const int da = static_cast<int>(a.mean().size());
  const int db = static_cast<int>(b.mean().size());
  if (da + db > kMaxQuadratures) throw std::invalid_argument("tensor_product: too many modes");
  typename GaussianState<Scalar>::Vector mean(da + db);
  mean << a.mean(), b.mean();
  typename GaussianState<Scalar>::Matrix cov = GaussianState<Scalar>::Matrix::Zero(da + db, da + db);
  cov.topLeftCorner(da, da) = a.cov();
  cov.bottomRightCorner(db, db) = b.cov();
  return GaussianState<Scalar>(mean, cov);
}

/// Marginal on the kept modes, in the order given.
template <typename Scalar>
GaussianState<Scalar> partial_trace(const GaussianState<Scalar>& state, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    state.check_mode(keep[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (keep[i] == keep[j]) throw std::invalid_argument("partial_trace: repeated mode index");
    }
  }
  const int dim = 2 * static_cast<int>(keep.size());
  typename GaussianState<Scalar>::Vector mean(dim);
  typename GaussianState<Scalar>::Matrix cov(dim, dim);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    mean.template segment<2>(2 * i) = state.mean().template segment<2>(2 * keep[i]);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      cov.template block<2, 2>(2 * i, 2 * j) = state.cov().template block<2, 2>(2 * keep[i], 2 * keep[j]);
    }
  }
  return GaussianState<Scalar>(mean, cov);
}

template <typename Scalar>
GaussianState<Scalar> partial_trace(const GaussianState<Scalar>& state, std::initializer_list<int> keep) {
  return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

/// Pure-loss channel of transmissivity eta on one mode. Equivalent to mixing
/// the mode with a vacuum ancilla on a beam splitter and discarding the ancilla.
template <typename Scalar>
GaussianState<Scalar> attenuate(const GaussianState<Scalar>& state, int mode, Scalar eta) {
  if (!(eta >= Scalar(0)) || eta > Scalar(1)) {
    throw std::invalid_argument("attenuate: transmissivity must lie in [0, 1]");
  }
  state.check_mode(mode);
  const Scalar amp = std::sqrt(eta);
  auto mean = state.mean();
  auto cov = state.cov();
  mean.template segment<2>(2 * mode) *= amp;
  cov.middleRows(2 * mode, 2) *= amp;
  cov.middleCols(2 * mode, 2) *= amp;
  cov.template block<2, 2>(2 * mode, 2 * mode) +=
      (Scalar(1) - eta) * kVacuumVariance<Scalar> * Matrix2<Scalar>::Identity();
  return GaussianState<Scalar>(mean, cov);
}

/// Adds isotropic Gaussian noise of the given variance to one mode.
template <typename Scalar>
GaussianState<Scalar> add_noise(const GaussianState<Scalar>& state, int mode, Scalar variance) {
  if (!(variance >= Scalar(0))) throw std::invalid_argument("add_noise: variance must be >= 0");
  state.check_mode(mode);
  auto cov = state.cov();
  cov.template block<2, 2>(2 * mode, 2 * mode) += variance * Matrix2<Scalar>::Identity();
  return GaussianState<Scalar>(state.mean(), cov);
}

template <typename Scalar>
struct HomodyneResult {
  Scalar mean;
  Scalar variance;
  std::optional<Scalar> sample;
};

/// Statistics of the quadrature x_phi = cos(phi) x + sin(phi) p on one mode.
template <typename Scalar>
HomodyneResult<Scalar> homodyne_stats(const GaussianState<Scalar>& state, int mode, Scalar phi) {
  const Vector2<Scalar> u(std::cos(phi), std::sin(phi));
  const Scalar mean = u.dot(state.mode_mean(mode));
  const Scalar variance = u.dot(state.mode_cov(mode) * u);
  if (!(variance > Scalar(0))) throw std::domain_error("homodyne_stats: non-positive quadrature variance");
  return {mean, variance, std::nullopt};
}

template <typename Scalar, typename Rng>
Scalar homodyne_sample(const GaussianState<Scalar>& state, int mode, Scalar phi, Rng& rng) {
  const auto stats = homodyne_stats(state, mode, phi);
  std::normal_distribution<Scalar> normal(stats.mean, std::sqrt(stats.variance));
  return normal(rng);
}

enum class DbConvention {
  power,      ///< z = 10^(dB/10)
  amplitude,  ///< z = 10^(dB/20)
};

template <typename Scalar>
Scalar db_to_z(Scalar squeezing_db, DbConvention convention = DbConvention::power) {
  if (!(squeezing_db <= Scalar(0))) {
    throw std::invalid_argument("db_to_z: squeezing must be <= 0 dB");
  }
  const Scalar divisor = convention == DbConvention::power ? Scalar(10) : Scalar(20);
  return std::pow(Scalar(10), squeezing_db / divisor);
}

/// Squeezing by coupling: a single-mode signal is combined on a beam splitter
/// with squeezed vacuum. The squeezed light sees transmissivity `coupler_eta`,
/// the signal the complementary port, and only the common output is kept.
/// For coupler_eta = 0.99 a vacuum-noise input comes out with amplitude x0.1
/// and covariance diag(0.01 + 0.99 z^2, 0.01 + 0.99 z^-2) / 2.
template <typename Scalar>
GaussianState<Scalar> mix_with_squeezed_vacuum(const GaussianState<Scalar>& state, Scalar z,
                                               Scalar coupler_eta = Scalar(0.99),
                                               Scalar squeeze_angle = Scalar(0)) {
  if (state.num_modes() != 1) throw std::invalid_argument("mix_with_squeezed_vacuum: single-mode input only");
  if (!(coupler_eta >= Scalar(0)) || coupler_eta > Scalar(1)) {
    throw std::invalid_argument("mix_with_squeezed_vacuum: coupler transmissivity must lie in [0, 1]");
  }
  const auto joint = tensor_product(squeezed_vacuum(z, squeeze_angle), state);
  return partial_trace(beam_splitter(joint, 0, 1, coupler_eta), {0});
}

/// Symplectic eigenvalues of a covariance matrix, ascending. Throws if the
/// covariance is not positive definite.
template <typename Scalar>
std::vector<Scalar> symplectic_eigenvalues(const QuadMatrix<Scalar>& cov) {
  using Dyn = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::SelfAdjointEigenSolver<Dyn> cov_eig{Dyn(cov)};
  if (cov_eig.eigenvalues().minCoeff() <= Scalar(0)) {
    throw std::domain_error("symplectic_eigenvalues: covariance is not positive definite");
  }
  const Dyn root = cov_eig.operatorSqrt();
  // A = sqrt(cov) Omega sqrt(cov) is antisymmetric with eigenvalues +-i nu.
  const Dyn a = root * Dyn(symplectic_form<Scalar>(n)) * root;
  Eigen::SelfAdjointEigenSolver<Dyn> a_eig(Dyn(a.transpose() * a));
  std::vector<Scalar> nus;
  nus.reserve(n);
  for (int k = 0; k < 2 * n; k += 2) {
    nus.push_back(std::sqrt(std::max(Scalar(0), a_eig.eigenvalues()(k))));
  }
  return nus;
}

/// True when cov + (i/2) Omega is positive semidefinite, equivalently when
/// every symplectic eigenvalue is at least the vacuum level. Testing the
/// Hermitian form directly keeps the rounding error proportional to the
/// covariance norm, where the eigenvalue route squares it.
template <typename Scalar>
bool satisfies_uncertainty(const GaussianState<Scalar>& state, Scalar tol = uncertainty_tolerance<Scalar>()) {
  using Complex = std::complex<Scalar>;
  using Herm = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = state.num_modes();
  const Herm form = state.cov().template cast<Complex>() +
                    Complex(0, kVacuumVariance<Scalar>) * symplectic_form<Scalar>(n).template cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Herm> eig(form, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

}  // namespace cvqsdc
