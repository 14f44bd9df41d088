#include <doctest.h>

#include <cmath>

#include "conemcf/ivp.hpp"

using namespace conemcf;

TEST_SUITE_BEGIN("ivp");

TEST_CASE("exponential decay, both directions") {
  auto rhs = [](double, const IvpState<1>& y) { return IvpState<1>{-y[0]}; };
  auto fwd = integrate_ivp_system<1>(rhs, 0.0, 2.0, {1.0});
  CHECK(fwd.reached_end);
  CHECK(std::abs(fwd.y_end()[0] - std::exp(-2.0)) < 1e-11);

  auto bwd = integrate_ivp_system<1>(rhs, 2.0, 0.0, {std::exp(-2.0)});
  CHECK(bwd.reached_end);
  CHECK(std::abs(bwd.y_end()[0] - 1.0) < 1e-10);
}

TEST_CASE("harmonic oscillator hits an event at a quarter period") {
  auto rhs = [](double, const IvpState<2>& y) { return IvpState<2>{y[1], -y[0]}; };
  std::array<IvpEvent<2>, 1> ev = {
      IvpEvent<2>{[](double, const IvpState<2>& y) { return y[1]; }, -1}};
  auto sol = integrate_ivp_system<2>(rhs, 0.0, 10.0, {0.0, 1.0}, {}, ev);
  REQUIRE(sol.stopped_event == 0);
  CHECK(std::abs(sol.t_end() - M_PI / 2) < 1e-10);
  CHECK(std::abs(sol.y_end()[0] - 1.0) < 1e-10);
}

TEST_CASE("forced nodes appear exactly in the output") {
  auto rhs = [](double t, const IvpState<1>&) { return IvpState<1>{std::cos(t)}; };
  std::vector<double> nodes = {0.25, 0.5, 0.75};
  auto sol = integrate_ivp_system<1>(rhs, 0.0, 1.0, {0.0}, {}, {}, nodes);
  for (double n : nodes) {
    bool found = false;
    for (std::size_t i = 0; i < sol.t.size(); ++i)
      if (std::abs(sol.t[i] - n) < 1e-9) {
        found = true;
        CHECK(std::abs(sol.y[i][0] - std::sin(n)) < 1e-12);
      }
    CHECK(found);
  }
}

TEST_CASE("event direction filter ignores the opposite crossing") {
  // y' = cos t: y' crosses zero downward at pi/2, upward at 3pi/2.
  auto rhs = [](double t, const IvpState<1>&) { return IvpState<1>{std::cos(t)}; };
  std::array<IvpEvent<1>, 1> up_only = {
      IvpEvent<1>{[](double t, const IvpState<1>&) { return std::cos(t); }, +1}};
  auto sol = integrate_ivp_system<1>(rhs, 0.0, 8.0, {0.0}, {}, up_only);
  REQUIRE(sol.stopped_event == 0);
  CHECK(std::abs(sol.t_end() - 3 * M_PI / 2) < 1e-9);
}

TEST_SUITE_END();
