#include <doctest.h>

#include <numbers>
#include <random>

#include "cqca/photonics.hpp"
#include "stat_helpers.hpp"

using namespace cqca;
using namespace cqca::photonics;
using cqca::testing::withinSigma;

namespace {

constexpr double kPi = std::numbers::pi;

struct CellOutcome {
  bool absorbedB = false;
  bool absorbedC = false;
  Announcement alice = Announcement::Null;
};

CellOutcome runCell(Action b, Action c, RandomStream& rng, double theta = -1.0, double loss = 0.0) {
  JointState s = emit();
  if (theta >= 0.0) s = attachEveProbe(s, theta);
  auto rb = applyPartyAction(s, Arm::B, b, rng);
  auto rc = applyPartyAction(rb.state, Arm::C, c, rng);
  CellOutcome out{rb.absorbed, rc.absorbed, Announcement::Null};
  if (rb.absorbed || rc.absorbed) return out;
  const auto ports = recombineAtBS(rc.state);
  out.alice = sampleDetection(ports.ampD1, ports.ampD2, loss, 0.0, rng).outcome;
  return out;
}

/// Brute-force minimum-error discrimination: best projective measurement in
/// the real plane spanned by the two (real) probe vectors.
double bruteForceHelstrom(double theta) {
  const auto [a, b] = probeBranchVectors(theta);
  const Eigen::Vector4d ar = a.real();
  const Eigen::Vector4d br = b.real();
  // Orthonormal basis of span{a, b}.
  const Eigen::Vector4d e1 = ar.normalized();
  Eigen::Vector4d e2 = br - e1.dot(br) * e1;
  if (e2.norm() < 1e-14) return 0.5;
  e2.normalize();
  double best = 0.0;
  constexpr int steps = 200000;
  for (int k = 0; k < steps; ++k) {
    const double phi = kPi * k / steps;
    const Eigen::Vector4d u = std::cos(phi) * e1 + std::sin(phi) * e2;
    const Eigen::Vector4d v = -std::sin(phi) * e1 + std::cos(phi) * e2;
    const double success = 0.5 * std::pow(u.dot(ar), 2) + 0.5 * std::pow(v.dot(br), 2);
    best = std::max(best, success);
  }
  return best;
}

}  // namespace

TEST_CASE("emit produces the balanced superposition with phase i on the reflected arm") {
  const JointState s = emit();
  CHECK(s.probeDim() == 1);
  CHECK(std::norm(s.ampB(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::norm(s.ampC(0)) == doctest::Approx(0.5).epsilon(1e-15));
  const std::complex<double> ratio = s.ampB(0) / s.ampC(0);
  CHECK(std::abs(ratio - std::complex<double>(0, 1)) < 1e-15);
  CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("attachEveProbe") {
  SUBCASE("theta = 0 leaves both branches on |y,y>") {
    const JointState s = attachEveProbe(emit(), 0.0);
    CHECK(s.probeDim() == 4);
    CHECK(std::norm(s.ampB(0)) == doctest::Approx(0.5));
    CHECK(std::norm(s.ampC(0)) == doctest::Approx(0.5));
    CHECK(s.ampB.tail(3).norm() == 0.0);
    CHECK(s.ampC.tail(3).norm() == 0.0);
  }
  SUBCASE("theta = pi/2 gives orthogonal probe branches |y,y'> and |y',y>") {
    const auto [yn, ny] = probeBranchVectors(kPi / 2);
    CHECK(std::abs(yn.dot(ny)) < 1e-15);
    CHECK(std::norm(yn(1)) == doctest::Approx(1.0));
    CHECK(std::norm(ny(2)) == doctest::Approx(1.0));
  }
  SUBCASE("theta = pi/4 overlap is 1/2") {
    const auto [yn, ny] = probeBranchVectors(kPi / 4);
    CHECK(std::abs(yn.dot(ny)) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("norm is unchanged") {
    CHECK(attachEveProbe(emit(), 0.7).norm2() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("out-of-range angles are rejected") {
    CHECK_THROWS_AS(attachEveProbe(emit(), -0.01), std::domain_error);
    CHECK_THROWS_AS(attachEveProbe(emit(), kPi / 2 + 1e-9), std::domain_error);
    CHECK_THROWS_AS(attachEveProbe(attachEveProbe(emit(), 0.1), 0.1), std::logic_error);
  }
}

TEST_CASE("probe overlap equals cos^2(theta) for random angles") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(0.0, kPi / 2);
  for (int i = 0; i < 100; ++i) {
    const double t = dist(gen);
    const JointState s = attachEveProbe(emit(), t);
    const double overlap = std::abs(s.ampB.normalized().dot(s.ampC.normalized()));
    CHECK(std::abs(overlap - std::cos(t) * std::cos(t)) < 1e-12);
  }
}

TEST_CASE("applyPartyAction") {
  RandomStream rng(11);
  SUBCASE("F is the identity, bit for bit") {
    const JointState s = attachEveProbe(emit(), 0.37);
    const auto r = applyPartyAction(s, Arm::B, Action::F, rng);
    CHECK_FALSE(r.absorbed);
    CHECK(r.state.ampB == s.ampB);
    CHECK(r.state.ampC == s.ampC);
  }
  SUBCASE("A on the honest state absorbs with probability 1/2") {
    constexpr std::size_t n = 100000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += applyPartyAction(emit(), Arm::B, Action::A, rng).absorbed;
    CHECK(withinSigma(hits, n, 0.5));
  }
  SUBCASE("non-absorption zeroes the arm without renormalizing") {
    JointState s = emit();
    for (int i = 0; i < 64; ++i) {
      const auto r = applyPartyAction(s, Arm::B, Action::A, rng);
      if (r.absorbed) {
        CHECK(r.state.ampC.norm() == 0.0);
        CHECK(r.state.ampB.squaredNorm() == doctest::Approx(0.5));
      } else {
        CHECK(r.state.ampB.norm() == 0.0);
        CHECK(r.state.norm2() == doctest::Approx(0.5));
      }
    }
  }
  SUBCASE("both parties absorbing: exactly one detector fires every round") {
    for (int i = 0; i < 20000; ++i) {
      const auto o = runCell(Action::A, Action::A, rng);
      CHECK(o.absorbedB != o.absorbedC);
    }
  }
  SUBCASE("absorption order is observationally irrelevant") {
    constexpr std::size_t n = 100000;
    std::size_t bFirst = 0, cFirst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto r1 = applyPartyAction(emit(), Arm::B, Action::A, rng);
      r1 = {applyPartyAction(r1.state, Arm::C, Action::A, rng).state, r1.absorbed};
      bFirst += r1.absorbed;
      auto r2 = applyPartyAction(emit(), Arm::C, Action::A, rng);
      const bool cAbsorbed = r2.absorbed;
      const auto r3 = applyPartyAction(r2.state, Arm::B, Action::A, rng);
      CHECK(cAbsorbed != r3.absorbed);
      cFirst += r3.absorbed;
    }
    CHECK(withinSigma(bFirst, n, 0.5));
    CHECK(withinSigma(cFirst, n, 0.5));
  }
}

TEST_CASE("recombineAtBS") {
  SUBCASE("honest F,F: dark port is exactly dark") {
    const auto p = recombineAtBS(emit());
    CHECK(p.ampD1.squaredNorm() < 1e-30);
    CHECK(p.ampD2.squaredNorm() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("Bob absorbs without a click, Charlie reflects: 1/4 at each port") {
    JointState s = emit();
    s.ampB.setZero();
    const auto p = recombineAtBS(s);
    CHECK(p.ampD1.squaredNorm() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.ampD2.squaredNorm() == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("Eve at theta = pi/2, F,F: 1/2 at each port") {
    const auto p = recombineAtBS(attachEveProbe(emit(), kPi / 2));
    CHECK(p.ampD2.squaredNorm() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.ampD1.squaredNorm() == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("Eve at theta, F,F: dark-port weight sin^2(theta)/2") {
    for (double t : {0.1, 0.42, 1.0}) {
      const auto p = recombineAtBS(attachEveProbe(emit(), t));
      CHECK(p.ampD1.squaredNorm() == doctest::Approx(std::pow(std::sin(t), 2) / 2).epsilon(1e-13));
    }
  }
  SUBCASE("norm conservation on 10^4 random states") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 10000; ++i) {
      JointState s;
      s.ampB = Probe(4);
      s.ampC = Probe(4);
      for (int k = 0; k < 4; ++k) {
        s.ampB(k) = {g(gen), g(gen)};
        s.ampC(k) = {g(gen), g(gen)};
      }
      const double scale = std::sqrt(s.norm2());
      s.ampB /= scale;
      s.ampC /= scale;
      const auto p = recombineAtBS(s);
      CHECK(std::abs(p.ampD1.squaredNorm() + p.ampD2.squaredNorm() - s.norm2()) < 1e-12);
    }
  }
}

TEST_CASE("sampleDetection") {
  RandomStream rng(5);
  SUBCASE("all weight on D2") {
    const Probe zero = Probe::Zero(1);
    const Probe one = Probe::Constant(1, 1.0);
    for (int i = 0; i < 1000; ++i) CHECK(sampleDetection(zero, one, 0.0, 0.0, rng).outcome == Announcement::D2);
  }
  SUBCASE("loss thins detections by lambda") {
    constexpr std::size_t n = 100000;
    std::size_t nulls = 0;
    const auto p = recombineAtBS(emit());
    for (std::size_t i = 0; i < n; ++i) nulls += sampleDetection(p.ampD1, p.ampD2, 0.1, 0.0, rng).outcome == Announcement::Null;
    CHECK(withinSigma(nulls, n, 0.1));
  }
  SUBCASE("dark counts produce multiple counts at the two-click rate") {
    constexpr std::size_t n = 100000;
    constexpr double d = 0.05;
    std::size_t multi = 0;
    const auto p = recombineAtBS(emit());
    for (std::size_t i = 0; i < n; ++i) multi += sampleDetection(p.ampD1, p.ampD2, 0.0, d, rng).multipleCount;
    // Photon always clicks, so any dark count makes a second click.
    CHECK(withinSigma(multi, n, 1.0 - (1.0 - d) * (1.0 - d)));
  }
  SUBCASE("a lone dark click is announced when the photon is lost") {
    const Probe zero = Probe::Zero(1);
    std::size_t d1 = 0;
    constexpr std::size_t n = 50000;
    for (std::size_t i = 0; i < n; ++i) d1 += sampleDetection(zero, zero, 0.0, 0.2, rng).outcome == Announcement::D1;
    CHECK(withinSigma(d1, n, 0.2));
  }
}

TEST_CASE("honest cells reproduce the outcome table") {
  RandomStream rng(99);
  constexpr std::size_t n = 40000;
  struct Expect {
    Action b, c;
    double d1, d2, null;
  };
  for (const Expect e : {Expect{Action::F, Action::F, 0.0, 1.0, 0.0}, Expect{Action::A, Action::F, 0.25, 0.25, 0.5},
                         Expect{Action::F, Action::A, 0.25, 0.25, 0.5}, Expect{Action::A, Action::A, 0.0, 0.0, 1.0}}) {
    std::size_t d1 = 0, d2 = 0, null = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto o = runCell(e.b, e.c, rng);
      d1 += o.alice == Announcement::D1;
      d2 += o.alice == Announcement::D2;
      null += o.alice == Announcement::Null;
    }
    CHECK(withinSigma(d1, n, e.d1));
    CHECK(withinSigma(d2, n, e.d2));
    CHECK(withinSigma(null, n, e.null));
  }
}

TEST_CASE("Eve's probe leaves the sift rate at 1/4") {
  RandomStream rng(123);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> dist(0.0, kPi / 2);
  constexpr std::size_t n = 20000;
  for (int k = 0; k < 5; ++k) {
    const double t = dist(gen);
    std::size_t af = 0, fa = 0;
    for (std::size_t i = 0; i < n; ++i) {
      af += runCell(Action::A, Action::F, rng, t).alice == Announcement::D1;
      fa += runCell(Action::F, Action::A, rng, t).alice == Announcement::D1;
    }
    CHECK(withinSigma(af, n, 0.25));
    CHECK(withinSigma(fa, n, 0.25));
  }
}

TEST_CASE("Helstrom measurement") {
  auto success = [](double theta) {
    const auto [yn, ny] = probeBranchVectors(theta);
    const double pOneGivenOne = helstromGuessOneProbability({theta, yn, Announcement::D1});
    const double pOneGivenZero = helstromGuessOneProbability({theta, ny, Announcement::D1});
    return 0.5 * pOneGivenOne + 0.5 * (1.0 - pOneGivenZero);
  };
  SUBCASE("identical states: coin flip") {
    CHECK(success(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(helstromSuccessProbability(0.0) == doctest::Approx(0.5));
  }
  SUBCASE("orthogonal states: perfect") {
    CHECK(success(kPi / 2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("theta = pi/4 against brute-force measurement search") {
    const double closed = (1.0 + std::sqrt(3.0) / 2.0) / 2.0;
    CHECK(closed == doctest::Approx(0.9330127018922193).epsilon(1e-15));
    CHECK(bruteForceHelstrom(kPi / 4) == doctest::Approx(closed).epsilon(1e-9));
    CHECK(success(kPi / 4) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(helstromSuccessProbability(kPi / 4) == doctest::Approx(closed).epsilon(1e-14));
  }
  SUBCASE("eigen-projector measurement matches the closed form across theta") {
    for (double t : {0.05, 0.3, 0.6, 1.1, 1.5}) {
      CHECK(success(t) == doctest::Approx(helstromSuccessProbability(t)).epsilon(1e-12));
      CHECK(bruteForceHelstrom(t) == doctest::Approx(helstromSuccessProbability(t)).epsilon(1e-8));
    }
  }
  SUBCASE("sampled guesses follow the measurement statistics") {
    RandomStream rng(8);
    const auto [yn, ny] = probeBranchVectors(kPi / 4);
    constexpr std::size_t n = 50000;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += helstromGuess({kPi / 4, yn, Announcement::D1}, rng) == 1;
    CHECK(withinSigma(correct, n, helstromSuccessProbability(kPi / 4)));
  }
  SUBCASE("only D1 rounds may be measured") {
    RandomStream rng(1);
    const auto [yn, ny] = probeBranchVectors(0.4);
    CHECK_THROWS_AS(helstromGuess({0.4, yn, Announcement::D2}, rng), std::logic_error);
    CHECK_THROWS_AS(helstromGuess({0.4, Probe::Zero(1), Announcement::D1}, rng), std::logic_error);
  }
}
