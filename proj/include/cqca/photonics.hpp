#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "cqca/random.hpp"
#include "cqca/types.hpp"

namespace cqca::photonics {

/// Amplitudes over Eve's probe basis {|y,y>, |y,y'>, |y',y>, |y',y'>} (y' = y-perp),
/// index = 2 * e1 + e2. Size 1 when no probe is attached.
template <typename Scalar>
using ProbeVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1, 0, 4, 1>;

inline constexpr Eigen::Index kProbeDim = 4;

/// Single-excitation state of the two interferometer arms, each branch
/// carrying the (possibly trivial) probe amplitude vector.
template <typename Scalar>
struct BasicJointState {
  ProbeVector<Scalar> ampB;
  ProbeVector<Scalar> ampC;

  Eigen::Index probeDim() const { return ampB.size(); }
  Scalar norm2() const { return ampB.squaredNorm() + ampC.squaredNorm(); }
  const ProbeVector<Scalar>& arm(Arm a) const { return a == Arm::B ? ampB : ampC; }
  ProbeVector<Scalar>& arm(Arm a) { return a == Arm::B ? ampB : ampC; }
};

using JointState = BasicJointState<double>;
using Probe = ProbeVector<double>;

/// Photon leaves Alice's beam splitter: transmitted into C, reflected (phase i) into B.
template <typename Scalar = double>
BasicJointState<Scalar> emit() {
  const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
  BasicJointState<Scalar> s;
  s.ampB = ProbeVector<Scalar>::Constant(1, std::complex<Scalar>(0, h));
  s.ampC = ProbeVector<Scalar>::Constant(1, std::complex<Scalar>(h, 0));
  return s;
}

/// Probe states |y,n> (photon in B) and |n,y> (photon in C) with <y|n> = cos(theta).
template <typename Scalar>
std::pair<ProbeVector<Scalar>, ProbeVector<Scalar>> probeBranchVectors(Scalar theta) {
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  ProbeVector<Scalar> yn = ProbeVector<Scalar>::Zero(kProbeDim);
  ProbeVector<Scalar> ny = ProbeVector<Scalar>::Zero(kProbeDim);
  yn(0) = c;  // |y,y>
  yn(1) = s;  // |y,y'>
  ny(0) = c;
  ny(2) = s;  // |y',y>
  return {yn, ny};
}

template <typename Scalar>
void checkTheta(Scalar theta) {
  if (!(theta >= Scalar(0) && theta <= std::numbers::pi_v<Scalar> / 2)) {
    throw std::domain_error("probe angle theta must lie in [0, pi/2]");
  }
}

/// Eve's onward-leg entangling interaction on a freshly emitted state.
template <typename Scalar>
BasicJointState<Scalar> attachEveProbe(const BasicJointState<Scalar>& state, Scalar theta) {
  checkTheta(theta);
  if (state.probeDim() != 1) throw std::logic_error("probe already attached");
  const auto [yn, ny] = probeBranchVectors(theta);
  BasicJointState<Scalar> out;
  out.ampB = state.ampB(0) * yn;
  out.ampC = state.ampC(0) * ny;
  return out;
}

struct ActionResult {
  JointState state;
  bool absorbed = false;
};

/// F is the identity. A absorbs the photon with the probability of finding it
/// in `arm` given the history encoded in the state's norm; on absorption the
/// state collapses onto that arm, otherwise the arm is zeroed without renormalizing.
ActionResult applyPartyAction(const JointState& state, Arm arm, Action action, RandomStream& rng);

struct PortAmplitudes {
  Probe ampD1;
  Probe ampD2;
};

/// Second pass through Alice's beam splitter.
template <typename Scalar>
std::pair<ProbeVector<Scalar>, ProbeVector<Scalar>> recombine(const BasicJointState<Scalar>& s) {
  const std::complex<Scalar> i(0, 1);
  const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
  return {(s.ampB - i * s.ampC) * h, (s.ampB + i * s.ampC) * h};
}

PortAmplitudes recombineAtBS(const JointState& state);

enum class Port : std::uint8_t { D1, D2, Lost };

struct DetectionEvent {
  /// Where the photon actually went among Alice's ports.
  Port photon = Port::Lost;
  bool darkD1 = false;
  bool darkD2 = false;
  /// Alice's reading: the photon click if any, else a lone dark click (D1 first).
  Announcement outcome = Announcement::Null;
  int clicks = 0;
  bool multipleCount = false;
  /// Probe amplitudes conditioned on the port the photon was routed to.
  Probe probe;
};

/// Samples Alice's detectors. The port is drawn from the squared norms of the
/// two port amplitudes relative to their sum, then thinned by `lossRate`;
/// each detector fires a dark count independently with `darkRate`.
DetectionEvent sampleDetection(const Probe& ampD1, const Probe& ampD2, double lossRate, double darkRate,
                               RandomStream& rng);

struct EveProbePair {
  double theta = 0.0;
  Probe collapsedState;
  Announcement announced = Announcement::Null;
};

/// Minimum-error success probability for |y,n> vs |n,y>, equal priors.
template <typename Scalar>
Scalar helstromSuccessProbability(Scalar theta) {
  const Scalar overlap = std::cos(theta) * std::cos(theta);
  return (Scalar(1) + std::sqrt(std::max(Scalar(0), Scalar(1) - overlap * overlap))) / 2;
}

/// Eve's guess of the secret bit (1 for |y,n>, i.e. Bob F / Charlie A) from the
/// Helstrom measurement applied to the collapsed probe. Only valid on D1 rounds.
int helstromGuess(const EveProbePair& probe, RandomStream& rng);

/// Probability that helstromGuess returns 1 for the given collapsed probe.
double helstromGuessOneProbability(const EveProbePair& probe);

}  // namespace cqca::photonics
