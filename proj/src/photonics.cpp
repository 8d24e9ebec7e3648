#include "cqca/photonics.hpp"

namespace cqca::photonics {

ActionResult applyPartyAction(const JointState& state, Arm arm, Action action, RandomStream& rng) {
  ActionResult out{state, false};
  if (action == Action::F) return out;

  const double total = state.norm2();
  const double inArm = state.arm(arm).squaredNorm();
  if (total > 0.0 && inArm > 0.0 && rng.bernoulli(inArm / total)) {
    out.absorbed = true;
    out.state.arm(arm == Arm::B ? Arm::C : Arm::B).setZero();
  } else {
    out.state.arm(arm).setZero();
  }
  return out;
}

PortAmplitudes recombineAtBS(const JointState& state) {
  auto [d1, d2] = recombine(state);
  return {std::move(d1), std::move(d2)};
}

DetectionEvent sampleDetection(const Probe& ampD1, const Probe& ampD2, double lossRate, double darkRate,
                               RandomStream& rng) {
  DetectionEvent ev;
  const double n1 = ampD1.squaredNorm();
  const double n2 = ampD2.squaredNorm();
  const double total = n1 + n2;

  if (total > 0.0) {
    const bool toD1 = rng.uniform() * total < n1;
    ev.photon = toD1 ? Port::D1 : Port::D2;
    ev.probe = toD1 ? ampD1 : ampD2;
    if (rng.bernoulli(lossRate)) ev.photon = Port::Lost;
  }
  ev.darkD1 = rng.bernoulli(darkRate);
  ev.darkD2 = rng.bernoulli(darkRate);

  ev.clicks = (ev.photon != Port::Lost ? 1 : 0) + (ev.darkD1 ? 1 : 0) + (ev.darkD2 ? 1 : 0);
  ev.multipleCount = ev.clicks >= 2;
  if (ev.photon == Port::D1) {
    ev.outcome = Announcement::D1;
  } else if (ev.photon == Port::D2) {
    ev.outcome = Announcement::D2;
  } else if (ev.darkD1) {
    ev.outcome = Announcement::D1;
  } else if (ev.darkD2) {
    ev.outcome = Announcement::D2;
  }
  return ev;
}

double helstromGuessOneProbability(const EveProbePair& probe) {
  if (probe.announced != Announcement::D1) {
    throw std::logic_error("Eve measures her probe only on D1-announced rounds");
  }
  if (probe.collapsedState.size() != kProbeDim) throw std::logic_error("no probe attached to this round");
  const double norm = probe.collapsedState.norm();
  if (norm == 0.0) throw std::logic_error("collapsed probe state has zero norm");

  const auto [yn, ny] = probeBranchVectors(probe.theta);
  const Eigen::Matrix4cd gamma = yn * yn.adjoint() - ny * ny.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(gamma);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Helstrom eigensolver did not converge");

  const Eigen::Vector4cd psi = probe.collapsedState / norm;
  constexpr double eps = 1e-12;
  double pOne = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double weight = std::norm(solver.eigenvectors().col(k).dot(psi));
    const double lambda = solver.eigenvalues()(k);
    if (lambda > eps) {
      pOne += weight;
    } else if (lambda >= -eps) {
      pOne += 0.5 * weight;  // degenerate directions carry no information
    }
  }
  return std::clamp(pOne, 0.0, 1.0);
}

int helstromGuess(const EveProbePair& probe, RandomStream& rng) {
  return rng.bernoulli(helstromGuessOneProbability(probe)) ? 1 : 0;
}

}  // namespace cqca::photonics
