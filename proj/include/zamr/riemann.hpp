#pragma once

// Suliciu relaxation flux for the x-normal face problem.
//
// Four waves u_L - a/rho_L < u* < u_R + a/rho_R separate W_L, W*_L, W*_R, W_R;
// the flux is the upwind sum
//   Phi = 1/2 [F(W_L) + F(W_R) - |u_L - a/rho_L| (W*_L - W_L)
//              - |u*| (W*_R - W*_L) - |u_R + a/rho_R| (W_R - W*_R)].
// Mass fraction and tangential velocities are carried unchanged into each star state.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zamr/eos.hpp"

namespace zamr {

template <class Scalar>
using FaceFlux = State<Scalar>;

/// Raised when a star density is non-positive; a larger theta may cure it.
class RiemannError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Face state with its closure pressure and sound speed already evaluated.
template <class Scalar>
struct FaceState {
  State<Scalar> w;
  Scalar pressure{};
  Scalar sound_speed{};
};

template <class Scalar>
FaceState<Scalar> make_face_state(const State<Scalar>& w, const FluidPair<Scalar>& fp) {
  const Thermo<Scalar> t = thermo(w, fp);
  return {w, t.pressure, t.sound_speed};
}

/// F_x(W) = [rho u, rho Y u, rho u^2 + p, rho u v, rho u w].
template <class Scalar>
FaceFlux<Scalar> physical_flux(const State<Scalar>& w, Scalar p) {
  const Scalar u = w[kMomX] / w[kRho];
  FaceFlux<Scalar> f = u * w;
  f[kMomX] += p;
  return f;
}

template <class Scalar>
Scalar relaxation_speed(const FaceState<Scalar>& l, const FaceState<Scalar>& r, Scalar theta) {
  return theta * std::max(l.w[kRho] * l.sound_speed, r.w[kRho] * r.sound_speed);
}

template <class Scalar>
Scalar relaxation_speed(const State<Scalar>& wl, const State<Scalar>& wr, const FluidPair<Scalar>& fp) {
  return relaxation_speed(make_face_state(wl, fp), make_face_state(wr, fp), fp.theta);
}

/// Intermediate states of the relaxation Riemann problem.
template <class Scalar>
struct RelaxationWaves {
  Scalar a{};       // relaxation speed, kg m^-2 s^-1
  Scalar u_star{};  // contact speed
  Scalar p_star{};  // relaxed pressure in both star regions
  State<Scalar> left_star;
  State<Scalar> right_star;
  Scalar left_speed{};   // u_L - a/rho_L
  Scalar right_speed{};  // u_R + a/rho_R
};

template <class Scalar>
RelaxationWaves<Scalar> relaxation_waves(const FaceState<Scalar>& l, const FaceState<Scalar>& r, Scalar theta) {
  RelaxationWaves<Scalar> s;
  const Scalar rho_l = l.w[kRho];
  const Scalar rho_r = r.w[kRho];
  const Scalar u_l = l.w[kMomX] / rho_l;
  const Scalar u_r = r.w[kMomX] / rho_r;
  s.a = relaxation_speed(l, r, theta);
  s.u_star = (u_l + u_r) / 2 - (r.pressure - l.pressure) / (2 * s.a);
  s.p_star = (l.pressure + r.pressure) / 2 - s.a * (u_r - u_l) / 2;
  const Scalar inv_l = 1 / rho_l + (s.u_star - u_l) / s.a;
  const Scalar inv_r = 1 / rho_r - (s.u_star - u_r) / s.a;
  if (!(inv_l > 0) || !(inv_r > 0)) {
    throw RiemannError("relaxation star density is non-positive (1/rho*_L=" + std::to_string(static_cast<double>(inv_l)) +
                       ", 1/rho*_R=" + std::to_string(static_cast<double>(inv_r)) + ")");
  }
  auto star = [&](const State<Scalar>& w, Scalar inv_rho) {
    const Scalar rho = 1 / inv_rho;
    State<Scalar> out;
    out[kRho] = rho;
    out[kRhoY] = rho * (w[kRhoY] / w[kRho]);
    out[kMomX] = rho * s.u_star;
    out[kMomY] = rho * (w[kMomY] / w[kRho]);
    out[kMomZ] = rho * (w[kMomZ] / w[kRho]);
    return out;
  };
  s.left_star = star(l.w, inv_l);
  s.right_star = star(r.w, inv_r);
  s.left_speed = u_l - s.a / rho_l;
  s.right_speed = u_r + s.a / rho_r;
  return s;
}

template <class Scalar>
FaceFlux<Scalar> suliciu_flux(const FaceState<Scalar>& l, const FaceState<Scalar>& r, Scalar theta) {
  using std::abs;
  const RelaxationWaves<Scalar> s = relaxation_waves(l, r, theta);
  const FaceFlux<Scalar> fl = physical_flux(l.w, l.pressure);
  const FaceFlux<Scalar> fr = physical_flux(r.w, r.pressure);
  return (fl + fr - abs(s.left_speed) * (s.left_star - l.w) - abs(s.u_star) * (s.right_star - s.left_star) -
          abs(s.right_speed) * (r.w - s.right_star)) /
         2;
}

template <class Scalar>
FaceFlux<Scalar> suliciu_flux(const State<Scalar>& wl, const State<Scalar>& wr, const FluidPair<Scalar>& fp) {
  return suliciu_flux(make_face_state(wl, fp), make_face_state(wr, fp), fp.theta);
}

}  // namespace zamr
