#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cvqkd/errors.hpp"

namespace cvqkd {

/// Quadrature labels. Mode ordering is (x1,p1,x2,p2,...) everywhere in this
/// library and is not configurable.
enum class Quadrature { x, p };

inline int quadrature_offset(Quadrature q) { return q == Quadrature::x ? 0 : 1; }

/// Symplectic form Omega: block-diagonal 2x2 blocks [[0,1],[-1,0]] per mode.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Second moments of the quadratures of a zero-mean Gaussian state, in
/// shot-noise units (vacuum variance = 1).
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0)
      throw InvalidParameter("covariance matrix must be square with even dimension, got " +
                             std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= kSymmetryTolerance))
      throw InvalidParameter("covariance matrix is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
  }

  static CovarianceMatrix vacuum(int n_modes) {
    if (n_modes < 1) throw InvalidParameter("vacuum state needs at least one mode");
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(entries_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// 2x2 block of one mode's own second moments.
  Eigen::Matrix2d mode_block(int mode) const {
    check_mode(mode);
    return entries_.block<2, 2>(2 * mode, 2 * mode);
  }

  void check_mode(int mode) const {
    if (mode < 0 || mode >= n_modes())
      throw InvalidParameter("mode index " + std::to_string(mode) + " out of range for " +
                             std::to_string(n_modes()) + " modes");
  }

  static constexpr double kSymmetryTolerance = 1e-12;

 private:
  Eigen::MatrixXd entries_;
};

/// Linear quadrature transform S with S Omega S^T = Omega.
class SymplecticTransform {
 public:
  explicit SymplecticTransform(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0)
      throw InvalidParameter("symplectic transform must be square with even dimension");
    const Eigen::MatrixXd omega = symplectic_form(n_modes());
    const double defect = (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
    if (!(defect <= kSymplecticTolerance))
      throw InvalidParameter("matrix does not preserve the symplectic form (defect " +
                             std::to_string(defect) + ")");
  }

  int n_modes() const { return static_cast<int>(matrix_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  static constexpr double kSymplecticTolerance = 1e-10;

 private:
  Eigen::MatrixXd matrix_;
};

/// Symplectic eigenvalues, one per mode, descending; >= 1 for physical states.
struct SymplecticSpectrum {
  std::vector<double> eigenvalues;

  double max_deviation_from_pure() const {
    double d = 0.0;
    for (double nu : eigenvalues) d = std::max(d, std::abs(nu - 1.0));
    return d;
  }
};

/// Two-mode squeezed vacuum with thermal marginals of variance V and
/// correlations +-sqrt(V^2-1) on the diagonal of the Z block.
inline CovarianceMatrix epr_state(double V) {
  if (!(V >= 1.0)) throw UnphysicalParameter("EPR variance must satisfy V >= 1, got " + std::to_string(V));
  const double c = std::sqrt(V * V - 1.0);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = V;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceMatrix(m);
}

/// Single-mode squeezer diag(e^-s, e^s): x-variance scales by e^-2s,
/// p-variance by e^+2s.
inline SymplecticTransform squeezer(double s) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 0) = std::exp(-s);
  m(1, 1) = std::exp(s);
  return SymplecticTransform(m);
}

/// Two-mode coupler of transmittance T, acting identically on x and p:
/// [[sqrt(T) I, sqrt(1-T) I], [sqrt(1-T) I, -sqrt(T) I]].
inline SymplecticTransform beamsplitter(double T) {
  if (!(T >= 0.0 && T <= 1.0))
    throw InvalidParameter("beamsplitter transmittance must lie in [0,1], got " + std::to_string(T));
  const double a = std::sqrt(T);
  const double b = std::sqrt(1.0 - T);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int q = 0; q < 2; ++q) {
    m(q, q) = a;
    m(q, 2 + q) = b;
    m(2 + q, q) = b;
    m(2 + q, 2 + q) = -a;
  }
  return SymplecticTransform(m);
}

namespace detail {

inline void check_distinct_modes(const std::vector<int>& modes, int n_modes) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] < 0 || modes[i] >= n_modes)
      throw InvalidParameter("mode index " + std::to_string(modes[i]) + " out of range for " +
                             std::to_string(n_modes) + " modes");
    for (std::size_t j = 0; j < i; ++j)
      if (modes[i] == modes[j])
        throw InvalidParameter("mode indices must be distinct, got " + std::to_string(modes[i]) +
                               " twice");
  }
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace detail

/// Congruence S gamma S^T with S embedded on the selected modes (identity on
/// the rest). modes[i] receives the transform's i-th mode.
inline CovarianceMatrix apply(const SymplecticTransform& s, const CovarianceMatrix& gamma,
                              const std::vector<int>& modes) {
  if (static_cast<int>(modes.size()) != s.n_modes())
    throw InvalidParameter("transform acts on " + std::to_string(s.n_modes()) + " modes, got " +
                           std::to_string(modes.size()) + " indices");
  detail::check_distinct_modes(modes, gamma.n_modes());
  const int dim = 2 * gamma.n_modes();
  Eigen::MatrixXd embedded = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t bi = 0; bi < modes.size(); ++bi)
    for (std::size_t bj = 0; bj < modes.size(); ++bj)
      embedded.block<2, 2>(2 * modes[bi], 2 * modes[bj]) =
          s.matrix().block<2, 2>(2 * static_cast<int>(bi), 2 * static_cast<int>(bj));
  return CovarianceMatrix(detail::symmetrized(embedded * gamma.matrix() * embedded.transpose()));
}

/// Principal submatrix on the kept modes, in the order given (a permutation of
/// all modes therefore reorders the state).
inline CovarianceMatrix partial_trace(const CovarianceMatrix& gamma, const std::vector<int>& keep) {
  if (keep.empty()) throw InvalidParameter("partial trace must keep at least one mode");
  detail::check_distinct_modes(keep, gamma.n_modes());
  const int out_dim = 2 * static_cast<int>(keep.size());
  Eigen::MatrixXd sub(out_dim, out_dim);
  for (std::size_t bi = 0; bi < keep.size(); ++bi)
    for (std::size_t bj = 0; bj < keep.size(); ++bj)
      sub.block<2, 2>(2 * static_cast<int>(bi), 2 * static_cast<int>(bj)) =
          gamma.matrix().block<2, 2>(2 * keep[bi], 2 * keep[bj]);
  return CovarianceMatrix(sub);
}

/// Symplectic spectrum of a positive-definite covariance matrix.
///
/// Uses the similarity i*Omega*gamma ~ i*L^T*Omega*L for gamma = L L^T; the
/// latter is i times an antisymmetric matrix, whose singular values are the
/// symplectic eigenvalues, each twice.
inline SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& gamma) {
  Eigen::LLT<Eigen::MatrixXd> llt(gamma.matrix());
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("covariance matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd k = l.transpose() * symplectic_form(gamma.n_modes()) * l;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
  const auto& sv = svd.singularValues();  // descending, in pairs
  SymplecticSpectrum spectrum;
  spectrum.eigenvalues.reserve(gamma.n_modes());
  for (int i = 0; i < gamma.n_modes(); ++i)
    spectrum.eigenvalues.push_back(0.5 * (sv(2 * i) + sv(2 * i + 1)));
  return spectrum;
}

/// Throws UnphysicalState unless all symplectic eigenvalues are >= 1 - tol.
inline void validate_physicality(const CovarianceMatrix& gamma, double tol = 1e-9) {
  const auto spectrum = symplectic_eigenvalues(gamma);
  for (double nu : spectrum.eigenvalues)
    if (nu < 1.0 - tol)
      throw UnphysicalState("uncertainty relation violated: symplectic eigenvalue " +
                            std::to_string(nu) + " < 1");
}

inline bool is_physical(const CovarianceMatrix& gamma, double tol = 1e-9) {
  try {
    validate_physicality(gamma, tol);
  } catch (const Error&) {
    return false;
  }
  return true;
}

namespace detail {

inline std::vector<int> complement_indices(int dim, int mode) {
  std::vector<int> rest;
  rest.reserve(dim - 2);
  for (int i = 0; i < dim; ++i)
    if (i / 2 != mode) rest.push_back(i);
  return rest;
}

}  // namespace detail

/// State of the remaining modes after an ideal homodyne measurement of one
/// quadrature of the selected mode. Only the measured diagonal element is
/// inverted (Moore-Penrose on the projected block).
inline CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& gamma, int mode,
                                              Quadrature quadrature) {
  gamma.check_mode(mode);
  if (gamma.n_modes() < 2)
    throw InvalidParameter("conditioning requires at least one unmeasured mode");
  const int dim = 2 * gamma.n_modes();
  const int q = 2 * mode + quadrature_offset(quadrature);
  const double v = gamma(q, q);
  if (!(v > 0.0))
    throw NumericalFailure("measured quadrature variance must be positive, got " + std::to_string(v));
  const auto rest = detail::complement_indices(dim, mode);
  Eigen::VectorXd cross(rest.size());
  for (std::size_t a = 0; a < rest.size(); ++a) cross(static_cast<int>(a)) = gamma(rest[a], q);
  Eigen::MatrixXd out(rest.size(), rest.size());
  for (std::size_t a = 0; a < rest.size(); ++a)
    for (std::size_t b = 0; b < rest.size(); ++b)
      out(static_cast<int>(a), static_cast<int>(b)) =
          gamma(rest[a], rest[b]) - cross(static_cast<int>(a)) * cross(static_cast<int>(b)) / v;
  return CovarianceMatrix(detail::symmetrized(out));
}

/// State of the remaining modes after an ideal heterodyne measurement of the
/// selected mode: gamma_rest - sigma (gamma_mode + I)^-1 sigma^T.
inline CovarianceMatrix condition_on_heterodyne(const CovarianceMatrix& gamma, int mode) {
  gamma.check_mode(mode);
  if (gamma.n_modes() < 2)
    throw InvalidParameter("conditioning requires at least one unmeasured mode");
  const int dim = 2 * gamma.n_modes();
  Eigen::Matrix2d block = gamma.mode_block(mode) + Eigen::Matrix2d::Identity();
  const double det = block.determinant();
  if (!(det > 0.0) || !std::isfinite(det))
    throw NumericalFailure("heterodyne conditioning block is singular");
  const Eigen::Matrix2d inv = block.inverse();
  const auto rest = detail::complement_indices(dim, mode);
  Eigen::MatrixXd sigma(rest.size(), 2);
  for (std::size_t a = 0; a < rest.size(); ++a)
    for (int u = 0; u < 2; ++u) sigma(static_cast<int>(a), u) = gamma(rest[a], 2 * mode + u);
  Eigen::MatrixXd rest_block(rest.size(), rest.size());
  for (std::size_t a = 0; a < rest.size(); ++a)
    for (std::size_t b = 0; b < rest.size(); ++b)
      rest_block(static_cast<int>(a), static_cast<int>(b)) = gamma(rest[a], rest[b]);
  return CovarianceMatrix(detail::symmetrized(rest_block - sigma * inv * sigma.transpose()));
}

}  // namespace cvqkd
