#pragma once

#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqca::analysis {

template <typename Scalar>
using DensityMatrix3 = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

template <typename Scalar>
void requireAngle(Scalar theta) {
  if (!(theta >= Scalar(0) && theta <= std::numbers::pi_v<Scalar> / 2)) {
    throw std::domain_error("theta must lie in [0, pi/2]");
  }
}

/// Shannon binary entropy in bits, H(0) = H(1) = 0.
template <typename Scalar>
Scalar binaryEntropy(Scalar x) {
  if (!(x >= Scalar(0) && x <= Scalar(1))) throw std::domain_error("binary entropy argument outside [0, 1]");
  auto term = [](Scalar p) { return p > Scalar(0) ? -p * std::log2(p) : Scalar(0); };
  return term(x) + term(Scalar(1) - x);
}

/// von Neumann entropy (bits) of a spectrum; eigenvalues at or below zero contribute nothing.
template <typename Derived>
typename Derived::Scalar spectrumEntropy(const Eigen::MatrixBase<Derived>& eigenvalues) {
  using Scalar = typename Derived::Scalar;
  Scalar s(0);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const Scalar l = eigenvalues(i);
    if (l > Scalar(0)) s -= l * std::log2(l);
  }
  return s;
}

/// Eve's reduced probe state in the basis {|y,y>, |y,y'>, |y',y>}.
template <typename Scalar>
DensityMatrix3<Scalar> buildRhoE(Scalar theta) {
  requireAngle(theta);
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  Eigen::Matrix<Scalar, 3, 3> m;
  m << 2 * c * c, c * s, c * s,
       c * s,     s * s, 0,
       c * s,     0,     s * s;
  return (m / Scalar(2)).template cast<std::complex<Scalar>>();
}

template <typename Scalar>
struct Spectrum {
  Scalar e1;    ///< smaller non-vanishing eigenvalue
  Scalar e2;    ///< larger eigenvalue
  Scalar null;  ///< third eigenvalue, zero for a valid rho_E
};

template <typename Scalar>
Spectrum<Scalar> rhoESpectrum(const DensityMatrix3<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<DensityMatrix3<Scalar>> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");
  const auto& ev = solver.eigenvalues();  // ascending
  return {ev(1), ev(2), ev(0)};
}

template <typename Scalar>
Scalar vonNeumannEntropy(const DensityMatrix3<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<DensityMatrix3<Scalar>> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");
  return spectrumEntropy(solver.eigenvalues());
}

template <typename Scalar>
Spectrum<Scalar> rhoESpectrumClosedForm(Scalar theta) {
  const Scalar c2 = std::cos(2 * theta);
  return {(Scalar(1) - c2) / 4, (Scalar(3) + c2) / 4, Scalar(0)};
}

/// Holevo bound on Eve's information per sifted bit, H((1 - cos 2theta) / 4).
template <typename Scalar>
Scalar holevoChi(Scalar theta) {
  requireAngle(theta);
  return binaryEntropy((Scalar(1) - std::cos(2 * theta)) / 4);
}

template <typename Scalar>
Scalar errorRateTheory(Scalar theta) {
  requireAngle(theta);
  const Scalar s2 = std::sin(theta) * std::sin(theta);
  return s2 / (Scalar(1) + s2);
}

template <typename Scalar>
Scalar visibilityTheory(Scalar theta) {
  requireAngle(theta);
  return (Scalar(1) + std::cos(2 * theta)) / 2;
}

template <typename Scalar>
struct BasicSecurityPoint {
  Scalar theta;
  Scalar e;
  Scalar visibility;
  Scalar e1;
  Scalar e2;
  Scalar chi;
  Scalar iBC;
  Scalar keyRate;
};

using SecurityPoint = BasicSecurityPoint<double>;

/// Asymptotic key rate K = I_BC - chi with I_BC = 1 - H(e).
template <typename Scalar>
BasicSecurityPoint<Scalar> keyRate(Scalar theta) {
  requireAngle(theta);
  BasicSecurityPoint<Scalar> p;
  p.theta = theta;
  p.e = errorRateTheory(theta);
  p.visibility = visibilityTheory(theta);
  const auto ev = rhoESpectrumClosedForm(theta);
  p.e1 = ev.e1;
  p.e2 = ev.e2;
  p.chi = holevoChi(theta);
  p.iBC = Scalar(1) - binaryEntropy(p.e);
  p.keyRate = p.iBC - p.chi;
  return p;
}

struct Threshold {
  double theta;
  double e;
  int iterations;
};

/// Root of K(theta) on [0, pi/2] by bisection, to `tol` in theta.
Threshold securityThreshold(double tol = 1e-10);

using SecurityCurve = std::vector<SecurityPoint>;

/// `points` evenly spaced angles covering [0, pi/2] inclusive.
std::vector<double> uniformGrid(std::size_t points);

/// One point per grid angle, in grid order. The grid must be sorted within [0, pi/2].
SecurityCurve sweepCurves(const std::vector<double>& grid);

/// Header `theta,e,visibility,e1,chi,i_bc,key_rate`, 12 significant digits.
void writeCurveCsv(std::ostream& os, const SecurityCurve& curve);

/// Indices i where keyRate changes sign between rows i and i + 1.
std::vector<std::size_t> keyRateSignChanges(const SecurityCurve& curve);

}  // namespace cqca::analysis
