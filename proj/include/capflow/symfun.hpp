#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace capflow {

/// Raised when a curvature vector leaves the cone a formula needs
/// (e.g. H_{l-1} <= 0 in the curvature ratio).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
using CurvatureVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

[[nodiscard]] inline double binomial(int n, int k)
{
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / i;
  return b;
}

/// All elementary symmetric polynomials e_0..e_n of the entries of kappa,
/// from the coefficients of prod(1 + t kappa_i).
template <typename Derived>
[[nodiscard]] CurvatureVector<typename Derived::Scalar>
elementary_symmetric(const Eigen::MatrixBase<Derived>& kappa)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = kappa.size();
  CurvatureVector<Scalar> e = CurvatureVector<Scalar>::Zero(n + 1);
  e(0) = Scalar(1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j >= 1; --j) e(j) += kappa(i) * e(j - 1);
  return e;
}

/// sigma_k(kappa) with sigma_0 = 1 and sigma_{n+1} = 0.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar sigma_k(const Eigen::MatrixBase<Derived>& kappa, int k)
{
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  if (k < 0 || k > n + 1)
    throw std::out_of_range("sigma_k: k=" + std::to_string(k) + " outside 0.." +
                            std::to_string(n + 1));
  if (k == n + 1) return Scalar(0);
  // Only the first k+1 coefficients are needed.
  CurvatureVector<Scalar> e = CurvatureVector<Scalar>::Zero(k + 1);
  e(0) = Scalar(1);
  for (int i = 0; i < n; ++i)
    for (int j = std::min(i + 1, k); j >= 1; --j) e(j) += kappa(i) * e(j - 1);
  return e(k);
}

/// sigma_k of kappa with the i-th entry removed (kappa|i).
template <typename Derived>
[[nodiscard]] typename Derived::Scalar sigma_k_without(const Eigen::MatrixBase<Derived>& kappa,
                                                       Eigen::Index i, int k)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = kappa.size();
  CurvatureVector<Scalar> rest(n - 1);
  for (Eigen::Index a = 0, b = 0; a < n; ++a)
    if (a != i) rest(b++) = kappa(a);
  return sigma_k(rest, k);
}

/// Normalized mean curvature H_k = sigma_k / binom(n, k), 0 <= k <= n.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar normalized_H(const Eigen::MatrixBase<Derived>& kappa, int k)
{
  const int n = static_cast<int>(kappa.size());
  if (k < 0 || k > n)
    throw std::out_of_range("normalized_H: k=" + std::to_string(k) + " outside 0.." +
                            std::to_string(n));
  return sigma_k(kappa, k) / static_cast<typename Derived::Scalar>(binomial(n, k));
}

/// True iff H_j(kappa) > 0 for all 1 <= j <= k. Open cone, no tolerance.
template <typename Derived>
[[nodiscard]] bool cone_member(const Eigen::MatrixBase<Derived>& kappa, int k)
{
  const int n = static_cast<int>(kappa.size());
  if (k < 1 || k > n)
    throw std::out_of_range("cone_member: k=" + std::to_string(k) + " outside 1.." +
                            std::to_string(n));
  const auto e = elementary_symmetric(kappa);
  for (int j = 1; j <= k; ++j)
    if (!(e(j) > 0)) return false;
  return true;
}

/// F = H_l / H_{l-1}. Requires kappa in the cone Gamma_+^l.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar curvature_ratio_F(const Eigen::MatrixBase<Derived>& kappa,
                                                         int l)
{
  const int n = static_cast<int>(kappa.size());
  if (l < 1 || l > n)
    throw std::out_of_range("curvature_ratio_F: l=" + std::to_string(l) + " outside 1.." +
                            std::to_string(n));
  if (!cone_member(kappa, l))
    throw DomainError("curvature_ratio_F: curvature vector outside Gamma_+^" +
                      std::to_string(l));
  return normalized_H(kappa, l) / normalized_H(kappa, l - 1);
}

/// dF/dkappa_i for F = H_l / H_{l-1}, using dsigma_k/dkappa_i = sigma_{k-1}(kappa|i).
template <typename Derived>
[[nodiscard]] CurvatureVector<typename Derived::Scalar>
curvature_ratio_gradient(const Eigen::MatrixBase<Derived>& kappa, int l)
{
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  const Scalar cl = static_cast<Scalar>(binomial(n, l));
  const Scalar cm = static_cast<Scalar>(binomial(n, l - 1));
  const Scalar hl = sigma_k(kappa, l) / cl;
  const Scalar hm = sigma_k(kappa, l - 1) / cm;
  CurvatureVector<Scalar> grad(n);
  for (int i = 0; i < n; ++i) {
    const Scalar dhl = sigma_k_without(kappa, i, l - 1) / cl;
    const Scalar dhm = l >= 2 ? sigma_k_without(kappa, i, l - 2) / cm : Scalar(0);
    grad(i) = (dhl * hm - hl * dhm) / (hm * hm);
  }
  return grad;
}

template <typename Derived>
[[nodiscard]] bool is_symmetric(const Eigen::MatrixBase<Derived>& w)
{
  using std::abs;
  const auto scale = std::max<typename Derived::RealScalar>(w.cwiseAbs().maxCoeff(), 1);
  return w.rows() == w.cols() && (w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

/// Newton tensor d sigma_k / d h^i_j at a symmetric Weingarten matrix W.
/// Evaluated in the eigenbasis, where it is diag(sigma_{k-1}(kappa|i)).
template <typename Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
newton_tensor(const Eigen::MatrixBase<Derived>& w, int k)
{
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(w.rows());
  if (!is_symmetric(w)) throw std::invalid_argument("newton_tensor: W is not symmetric");
  if (k < 1 || k > n)
    throw std::out_of_range("newton_tensor: k=" + std::to_string(k) + " outside 1.." +
                            std::to_string(n));
  const Mat sym = (w + w.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const auto& kappa = es.eigenvalues();
  CurvatureVector<Scalar> d(n);
  for (int i = 0; i < n; ++i) d(i) = sigma_k_without(kappa, i, k - 1);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace capflow
