#include "doctest.h"

#include <cmath>
#include <numbers>

#include "coordsim/errors.hpp"
#include "coordsim/vehicle.hpp"

using namespace coordsim;

TEST_CASE("reconnaissance trajectories") {
  for (int i = 1; i <= 5; ++i) {
    const auto traj = Trajectory::reconnaissance(i);
    CHECK(traj.params().lateral_offset == 6.0 - 2.0 * i);
    CHECK(traj.params().heading == doctest::Approx(-std::numbers::pi / 2 + std::numbers::pi * i / 6));
    const auto s = traj.eval(0.0);
    CHECK(s.position.x() == 0.0);
    CHECK(s.position.z() == 2.0);
    CHECK(s.velocity.x() == 1.0);
    CHECK(traj.v_d_max() >= 1.0);
    CHECK((i == 3 ? traj.a_d_max() == 0.0 : traj.a_d_max() > 0.0));
  }
  // vehicle 3 flies straight
  const auto straight = Trajectory::reconnaissance(3);
  CHECK(std::abs(straight.eval(7.0).position.y()) < 1e-12);
  // all paths converge near their lateral offset
  for (int i = 1; i <= 5; ++i) {
    const auto traj = Trajectory::reconnaissance(i);
    CHECK(std::abs(traj.eval(50.0).position.y() - traj.params().lateral_offset) < 1e-9);
  }
}

TEST_CASE("analytic derivatives match finite differences") {
  for (int i = 1; i <= 5; ++i) {
    const auto traj = Trajectory::reconnaissance(i);
    const double h = 1e-5;
    for (int k = 0; k < 1000; ++k) {
      const double t = 0.01 + (traj.t_f() - 0.02) * k / 999.0;
      const auto s = traj.eval(t);
      const Eigen::Vector3d fd_v = (traj.eval(t + h).position - traj.eval(t - h).position) / (2 * h);
      const Eigen::Vector3d fd_a = (traj.eval(t + h).velocity - traj.eval(t - h).velocity) / (2 * h);
      CHECK((fd_v - s.velocity).norm() <= 1e-6 * std::max(1.0, s.velocity.norm()));
      CHECK((fd_a - s.acceleration).norm() <= 1e-6 * std::max(1.0, s.acceleration.norm()));
    }
  }
}

TEST_CASE("evaluation outside the horizon clamps") {
  const auto traj = Trajectory::reconnaissance(1);
  const auto lo = traj.eval(-1.0);
  CHECK(lo.clamped);
  CHECK(lo.position == traj.eval(0.0).position);
  const auto hi = eval_trajectory(traj, 55.0);
  CHECK(hi.clamped);
  CHECK(hi.position == traj.eval(50.0).position);
  CHECK_FALSE(traj.eval(50.0).clamped);

  Trajectory::Params bad;
  bad.t_f = 0.0;
  CHECK_THROWS_AS(Trajectory{bad}, ConfigError);
}

TEST_CASE("path-following error and control") {
  const auto traj = Trajectory::reconnaissance(2);
  const Eigen::Vector3d p = traj.eval(3.0).position;
  CHECK(pf_error(traj, 3.0, p).norm() == 0.0);
  CHECK(pf_error(traj, 3.0, p - Eigen::Vector3d(1, 0, 0)).x() == doctest::Approx(1.0));

  TrackingGains gains;
  VehicleState vs;
  const Eigen::Vector3d u =
      pf_control(vs, Eigen::Vector3d(0.5, 0, 0), Eigen::Vector3d(0.25, 0, 0), gains);
  CHECK(u.x() == doctest::Approx(3.0));

  const Eigen::Vector3d big = pf_control(vs, Eigen::Vector3d(100, 0, 0), Eigen::Vector3d::Zero(), gains);
  CHECK(big.norm() == doctest::Approx(gains.a_max));
  CHECK(big.normalized().isApprox(Eigen::Vector3d::UnitX()));
}

TEST_CASE("saturation and gusts") {
  CHECK(saturate_velocity(Eigen::Vector3d(3, 4, 0), 10.0) == Eigen::Vector3d(3, 4, 0));
  CHECK(saturate_velocity(Eigen::Vector3d(3, 4, 0), 2.5).norm() == doctest::Approx(2.5));

  Gust gust{1, Eigen::Vector3d(0, 1, 0), 2.0, 4.0};
  const Eigen::Vector3d base(1, 0, 0);
  CHECK(apply_disturbance(base, gust, 1.999) == base);
  CHECK(apply_disturbance(base, gust, 2.0) == Eigen::Vector3d(1, 1, 0));
  CHECK(apply_disturbance(base, gust, 4.0) == base);
  gust.t_end = 2.0;
  CHECK_THROWS_AS(apply_disturbance(base, gust, 2.0), ArgumentError);
}
