#include "doctest.h"

#include <cmath>
#include <random>

#include "coordsim/coordctrl.hpp"
#include "coordsim/errors.hpp"
#include "test_support.hpp"

using namespace coordsim;

TEST_CASE("mission rate profile") {
  const MissionRateProfile profile;
  CHECK(profile.rate(0.0) == 1.0);
  CHECK(profile.rate(29.0) == 1.0);
  CHECK(profile.rate(35.0) == doctest::Approx(1.1));
  CHECK(profile.rate(60.0) == doctest::Approx(1.1));
  CHECK(profile.accel(10.0) == 0.0);
  CHECK(profile.accel(32.0) > 0.0);
  for (double t = 29.0; t < 35.0; t += 0.01) {
    const double fd = (profile.rate(t + 1e-6) - profile.rate(t - 1e-6)) / 2e-6;
    CHECK(profile.accel(t) == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
  }

  MissionRateProfile::Params steep;
  steep.ramp_end = 29.1;
  CHECK_THROWS_AS(MissionRateProfile{steep}, ConfigError);
  MissionRateProfile::Params high;
  high.final_rate = 1.3;
  CHECK_THROWS_AS(MissionRateProfile{high}, ConfigError);
  MissionRateProfile::Params reversed;
  reversed.ramp_end = 10.0;
  CHECK_THROWS_AS(MissionRateProfile{reversed}, ConfigError);
}

TEST_CASE("bar alpha") {
  CHECK(bar_alpha(Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 2, 3), 1.2) == 0.0);
  CHECK(bar_alpha(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0), 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(bar_alpha(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero(), 0.0), ArgumentError);
  // bounded by the tracking error norm
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d v(g(rng), g(rng), g(rng));
    const Eigen::Vector3d e(g(rng), g(rng), g(rng));
    CHECK(std::abs(bar_alpha(v, e, 0.1)) <= e.norm());
  }
}

TEST_CASE("coordination law: consensus with no tracking error") {
  const Digraph d(3, {{2, 1}, {3, 2}});
  CoordinationState s = CoordinationState::initial(3);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  const MissionRateProfile profile;
  const auto acc = coordination_accel(s, d, zero, zero, profile, 0.0, {});
  CHECK(acc.cwiseAbs().maxCoeff() == 0.0);

  s.gamma << 1.0, 0.0, 0.0;
  const auto acc2 = coordination_accel(s, d, zero, zero, profile, 0.0, {0.75, 1.82, 1.2});
  CHECK(acc2(0) == 0.0);
  CHECK(acc2(1) == doctest::Approx(0.75));
  CHECK(acc2(2) == 0.0);

  CHECK_THROWS_AS(coordination_accel(CoordinationState::initial(2), d, zero, zero, profile, 0.0, {}),
                  DimensionError);
}

TEST_CASE("coordination law: loop form equals matrix form") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> g;
  const MissionRateProfile profile;
  const CoordinationGains gains{0.75, 1.82, 1.2};
  for (int trial = 0; trial < 100; ++trial) {
    const Digraph d = testing::random_digraph(rng);
    const int n = d.size();
    CoordinationState s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    Eigen::MatrixXd e(n, 3), v(n, 3);
    for (int i = 0; i < n; ++i) {
      s.gamma(i) = 10.0 * g(rng);
      s.gamma_dot(i) = 1.0 + 0.1 * g(rng);
      for (int c = 0; c < 3; ++c) {
        e(i, c) = g(rng);
        v(i, c) = g(rng);
      }
    }
    const double t = 31.0 + g(rng);
    const auto loop = coordination_accel(s, d, e, v, profile, t, gains);

    Eigen::VectorXd alpha(n);
    for (int i = 0; i < n; ++i) {
      alpha(i) = bar_alpha(v.row(i).transpose(), e.row(i).transpose(), gains.delta);
    }
    const Eigen::VectorXd matrix =
        -gains.b * (s.gamma_dot - Eigen::VectorXd::Constant(n, profile.rate(t))) -
        gains.a * laplacian(d).cast<double>() * s.gamma - alpha;
    CHECK((loop - matrix).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + matrix.cwiseAbs().maxCoeff()));

    CoordinationState shifted = s;
    shifted.gamma.array() += 123.0;
    const auto loop2 = coordination_accel(shifted, d, e, v, profile, t, gains);
    CHECK((loop - loop2).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("coordination error") {
  const auto q = build_projection(3);
  CoordinationState s = CoordinationState::initial(3);
  s.gamma.setConstant(4.0);
  auto err = coordination_error(s, q, 1.0);
  CHECK(err.norm < 1e-14);

  s.gamma_dot << 1.1, 1.1, 1.1;
  err = coordination_error(s, q, 1.0);
  CHECK(err.norm == doctest::Approx(std::sqrt(3.0) * 0.1));
  CHECK_THROWS_AS(coordination_error(CoordinationState::initial(2), q, 1.0), DimensionError);
}

TEST_CASE("feasibility boundary is inclusive") {
  CoordinationState s = CoordinationState::initial(3);
  const FeasibilityBounds bounds{0.5, 5.0};
  s.gamma_dot << 1.5, 0.5, 1.0;
  Eigen::VectorXd acc(3);
  acc << 5.0, -5.0, 0.0;
  CHECK(feasibility_check(s, acc, bounds).empty());

  s.gamma_dot(0) = std::nextafter(1.5, 2.0);
  acc(1) = std::nextafter(-5.0, -6.0);
  const auto v = feasibility_check(s, acc, bounds, 2.5);
  REQUIRE(v.size() == 2);
  CHECK(v[0].vehicle == 1);
  CHECK(v[0].bound == "rate");
  CHECK(v[1].vehicle == 2);
  CHECK(v[1].bound == "accel");
  CHECK(v[1].time == 2.5);
}
