#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "zamr/riemann.hpp"

using namespace zamr;
using S = State<double>;

namespace {

const FluidPair<double> kAirWater{{1e5, 1.0, 340.0}, {1e5, 1000.0, 1500.0}, 1.05};

S random_state(std::mt19937_64& rng, const FluidPair<double>& fp, double umax) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alpha = unit(rng) < 0.3 ? 1 - 1e-7 : (unit(rng) < 0.5 ? 1e-7 : unit(rng));
  const double p = 0.7e5 + 1.5e5 * unit(rng);
  const Velocity<double> u(umax * (2 * unit(rng) - 1), umax * (2 * unit(rng) - 1), umax * (2 * unit(rng) - 1));
  return state_from_alpha_pressure(alpha, p, u, fp);
}

// Relaxation flux by sampling the self-similar solution at x/t = 0.
// Star pressure and speed come from the two Lagrangian jump relations
//   p* + a u* = p_L + a u_L,   p* - a u* = p_R - a u_R.
S sampled_flux(const S& wl, const S& wr, const FluidPair<double>& fp) {
  const double pl = mixture_pressure(wl[kRho], wl[kRhoY] / wl[kRho], fp);
  const double pr = mixture_pressure(wr[kRho], wr[kRhoY] / wr[kRho], fp);
  const double cl = wood_sound_speed(wl[kRho], wl[kRhoY] / wl[kRho], fp);
  const double cr = wood_sound_speed(wr[kRho], wr[kRhoY] / wr[kRho], fp);
  const double a = fp.theta * std::max(wl[kRho] * cl, wr[kRho] * cr);
  const double ul = wl[kMomX] / wl[kRho], ur = wr[kMomX] / wr[kRho];

  Eigen::Matrix2d m;
  m << 1, a, 1, -a;
  const Eigen::Vector2d sol = m.partialPivLu().solve(Eigen::Vector2d(pl + a * ul, pr - a * ur));
  const double ps = sol[0], us = sol[1];

  auto flux = [](const S& w, double pi) {
    const double u = w[kMomX] / w[kRho];
    S f = w * u;
    f[kMomX] += pi;
    return f;
  };
  auto star = [&](const S& w, double mass_flux) {
    // Lagrangian mass flux a through the acoustic wave fixes the star density
    const double u = w[kMomX] / w[kRho];
    const double lambda = mass_flux > 0 ? u - a / w[kRho] : u + a / w[kRho];
    const double rho = w[kRho] * (u - lambda) / (us - lambda);
    S s = w / w[kRho] * rho;
    s[kMomX] = rho * us;
    return s;
  };
  if (ul - a / wl[kRho] >= 0) return flux(wl, pl);
  if (ur + a / wr[kRho] <= 0) return flux(wr, pr);
  if (us >= 0) return flux(star(wl, 1.0), ps);
  return flux(star(wr, -1.0), ps);
}

S mirror(const S& w) {
  S m = w;
  m[kMomX] = -m[kMomX];
  return m;
}

}  // namespace

TEST_SUITE("riemann") {

TEST_CASE("flux equals the sampled relaxation solution") {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (double umax : {0.0, 1.0, 30.0, 400.0, 3000.0}) {
    for (int i = 0; i < 400; ++i) {
      const S wl = random_state(rng, kAirWater, umax);
      const S wr = random_state(rng, kAirWater, umax);
      S got;
      try {
        got = suliciu_flux(wl, wr, kAirWater);
      } catch (const RiemannError&) {
        continue;
      }
      const S want = sampled_flux(wl, wr, kAirWater);
      const double scale = want.cwiseAbs().maxCoeff() + physical_flux(wl, 1e5).cwiseAbs().maxCoeff();
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10 * scale);
      ++checked;
    }
  }
  CHECK(checked > 1500);
}

TEST_CASE("consistency F(W, W) = F(W)") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const S w = random_state(rng, kAirWater, 50.0);
    const double p = mixture_pressure(w[kRho], w[kRhoY] / w[kRho], kAirWater);
    const S f = physical_flux(w, p);
    CHECK((suliciu_flux(w, w, kAirWater) - f).cwiseAbs().maxCoeff() <= 1e-12 * f.cwiseAbs().maxCoeff() + 1e-9);
  }
}

TEST_CASE("material contact is resolved exactly") {
  for (double u : {-3.0, 0.0, 2.5}) {
    const Velocity<double> v(u, 1.0, -1.0);
    const S gas = state_from_alpha_pressure(1 - 1e-7, 1e5, v, kAirWater);
    const S liquid = state_from_alpha_pressure(1e-7, 1e5, v, kAirWater);
    const S f = suliciu_flux(gas, liquid, kAirWater);
    const S upwind = u >= 0 ? gas : liquid;
    S want = u * upwind;
    want[kMomX] += 1e5;
    CHECK((f - want).cwiseAbs().maxCoeff() <= 1e-9 * want.cwiseAbs().maxCoeff() + 1e-9);
  }
}

TEST_CASE("wave ordering and mirror symmetry") {
  // mixtures near alpha = 0.5 have a Wood speed near 20 m/s, so some collisions exceed theta
  std::mt19937_64 rng(9);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const S wl = random_state(rng, kAirWater, 20.0);
    const S wr = random_state(rng, kAirWater, 20.0);
    const auto l = make_face_state(wl, kAirWater);
    const auto r = make_face_state(wr, kAirWater);
    RelaxationWaves<double> s;
    try {
      s = relaxation_waves(l, r, kAirWater.theta);
    } catch (const RiemannError&) {
      continue;
    }
    ++checked;
    CHECK(s.left_speed < s.u_star);
    CHECK(s.u_star < s.right_speed);
    CHECK(s.left_star[kRho] > 0);
    CHECK(s.right_star[kRho] > 0);
    CHECK(s.left_star[kRhoY] / s.left_star[kRho] == doctest::Approx(wl[kRhoY] / wl[kRho]));

    const S f = suliciu_flux(wl, wr, kAirWater);
    const S g = suliciu_flux(mirror(wr), mirror(wl), kAirWater);
    CHECK((g + mirror(f)).cwiseAbs().maxCoeff() <= 1e-10 * f.cwiseAbs().maxCoeff());
  }
  CHECK(checked > 200);
}

TEST_CASE("collision too strong for theta raises RiemannError") {
  const S l = state_from_alpha_pressure(1 - 1e-7, 1e5, Velocity<double>(5000.0, 0, 0), kAirWater);
  const S r = state_from_alpha_pressure(1 - 1e-7, 1e5, Velocity<double>(-5000.0, 0, 0), kAirWater);
  CHECK_THROWS_AS(suliciu_flux(l, r, kAirWater), RiemannError);
  // a larger relaxation speed cures it
  FluidPair<double> wide = kAirWater;
  wide.theta = 40.0;
  CHECK_NOTHROW(suliciu_flux(l, r, wide));
}

}  // TEST_SUITE
