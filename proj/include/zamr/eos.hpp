#pragma once

// Barotropic stiffened-gas phases under instantaneous pressure equilibrium.
//
//   p_k(rho_k) = p_k0 + c_k^2 (rho_k - rho_k0)
//   p = p_1(rho Y / alpha) = p_2(rho (1 - Y) / (1 - alpha))
//
// States carry W = [rho, rho Y, rho u_x, rho u_y, rho u_z]; in 2D the last
// momentum component stays zero.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zamr/errors.hpp"

namespace zamr {

enum Component : int { kRho = 0, kRhoY = 1, kMomX = 2, kMomY = 3, kMomZ = 4 };
inline constexpr int kNumComponents = 5;

template <class Scalar>
using State = Eigen::Matrix<Scalar, kNumComponents, 1>;

/// Lambda(W) = [rho_1 alpha, rho_2 (1 - alpha), u_x, u_y, u_z].
template <class Scalar>
using Primitive = Eigen::Matrix<Scalar, kNumComponents, 1>;

template <class Scalar>
using Velocity = Eigen::Matrix<Scalar, 3, 1>;

/// Floor applied to mass and volume fractions before the closure is solved.
inline constexpr double kFractionFloor = 1e-12;

template <class Scalar>
struct StiffenedGas {
  Scalar p0{};    // Pa
  Scalar rho0{};  // kg/m^3
  Scalar c{};     // m/s

  Scalar pressure(Scalar rho) const { return p0 + c * c * (rho - rho0); }
  Scalar density(Scalar p) const { return rho0 + (p - p0) / (c * c); }
  /// A_k = p_k0 - c_k^2 rho_k0, so that p_k = A_k + c_k^2 rho_k.
  Scalar offset() const { return p0 - c * c * rho0; }
};

template <class Scalar>
struct FluidPair {
  StiffenedGas<Scalar> fluid1;
  StiffenedGas<Scalar> fluid2;
  Scalar theta = Scalar(1.05);

  void validate() const {
    if (!(fluid1.c > 0) || !(fluid2.c > 0)) throw ConfigError("sound speeds must be positive");
    if (!(fluid1.rho0 > 0) || !(fluid2.rho0 > 0)) throw ConfigError("reference densities must be positive");
    if (!(theta > 1)) throw ConfigError("relaxation factor theta must exceed 1");
  }
};

template <class Scalar>
Scalar clamp_fraction(Scalar y) {
  return std::clamp(y, Scalar(kFractionFloor), Scalar(1 - kFractionFloor));
}

namespace detail {

/// Equilibrium residual p_1(m1/alpha) - p_2(m2/(1-alpha)); strictly decreasing on (0,1).
template <class Scalar>
Scalar equilibrium_residual(Scalar alpha, Scalar m1, Scalar m2, const FluidPair<Scalar>& fp) {
  return fp.fluid1.pressure(m1 / alpha) - fp.fluid2.pressure(m2 / (1 - alpha));
}

template <class Scalar>
Scalar bisect_alpha(Scalar m1, Scalar m2, const FluidPair<Scalar>& fp) {
  Scalar lo = 0, hi = 1;
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    if (equilibrium_residual(mid, m1, m2, fp) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

}  // namespace detail

/// Volume fraction of fluid 1 from the pressure-equilibrium closure.
///
/// Clearing denominators gives
///   (A2 - A1) a^2 + (A1 - A2 - c1^2 m1 - c2^2 m2) a + c1^2 m1 = 0,
/// which is positive at a = 0 and equals -c2^2 m2 < 0 at a = 1, so exactly one
/// root lies in (0,1). The root is taken from the cancellation-free form of
/// the quadratic formula; bisection covers the case where that fails.
template <class Scalar>
Scalar solve_alpha(Scalar rho, Scalar y, const FluidPair<Scalar>& fp) {
  using std::abs;
  using std::sqrt;
  if (!(rho > 0) || !std::isfinite(static_cast<double>(rho))) {
    throw NumericError("solve_alpha: non-positive or non-finite density " + std::to_string(static_cast<double>(rho)));
  }
  const Scalar yc = clamp_fraction(y);
  const Scalar m1 = rho * yc;
  const Scalar m2 = rho * (1 - yc);
  const Scalar k1 = fp.fluid1.c * fp.fluid1.c * m1;
  const Scalar k2 = fp.fluid2.c * fp.fluid2.c * m2;
  const Scalar a2 = fp.fluid2.offset() - fp.fluid1.offset();
  const Scalar a1 = -a2 - k1 - k2;
  const Scalar a0 = k1;

  Scalar alpha = std::numeric_limits<Scalar>::quiet_NaN();
  const Scalar scale = abs(a1) + abs(a0);
  if (abs(a2) <= std::numeric_limits<Scalar>::epsilon() * scale) {
    alpha = -a0 / a1;
  } else {
    const Scalar disc = a1 * a1 - 4 * a2 * a0;
    if (disc >= 0) {
      const Scalar q = -(a1 + (a1 >= 0 ? sqrt(disc) : -sqrt(disc))) / 2;
      const Scalar r1 = q / a2;
      const Scalar r2 = a0 / q;
      if (r2 > 0 && r2 < 1) {
        alpha = r2;
      } else if (r1 > 0 && r1 < 1) {
        alpha = r1;
      }
    }
  }
  if (!(alpha > 0 && alpha < 1)) alpha = detail::bisect_alpha(m1, m2, fp);
  if (!(alpha > 0 && alpha < 1)) {
    throw NumericError("solve_alpha: no volume fraction in (0,1) for rho=" + std::to_string(static_cast<double>(rho)) +
                       ", Y=" + std::to_string(static_cast<double>(y)));
  }
  return clamp_fraction(alpha);
}

/// Equilibrium pressure evaluated on the phase occupying the larger volume,
/// which keeps the phase density well conditioned when the other phase vanishes.
template <class Scalar>
Scalar pressure_from_alpha(Scalar rho, Scalar y, Scalar alpha, const FluidPair<Scalar>& fp) {
  const Scalar yc = clamp_fraction(y);
  if (alpha >= Scalar(0.5)) return fp.fluid1.pressure(rho * yc / alpha);
  return fp.fluid2.pressure(rho * (1 - yc) / (1 - alpha));
}

template <class Scalar>
Scalar mixture_pressure(Scalar rho, Scalar y, const FluidPair<Scalar>& fp) {
  return pressure_from_alpha(rho, y, solve_alpha(rho, y, fp), fp);
}

/// Wood: 1/(rho c)^2 = Y/(rho_1 c_1)^2 + (1-Y)/(rho_2 c_2)^2.
template <class Scalar>
Scalar wood_sound_speed_from_alpha(Scalar rho, Scalar y, Scalar alpha, const FluidPair<Scalar>& fp) {
  using std::sqrt;
  const Scalar yc = clamp_fraction(y);
  const Scalar z1 = (rho * yc / alpha) * fp.fluid1.c;
  const Scalar z2 = (rho * (1 - yc) / (1 - alpha)) * fp.fluid2.c;
  const Scalar inv = yc / (z1 * z1) + (1 - yc) / (z2 * z2);
  return 1 / (rho * sqrt(inv));
}

template <class Scalar>
Scalar wood_sound_speed(Scalar rho, Scalar y, const FluidPair<Scalar>& fp) {
  return wood_sound_speed_from_alpha(rho, y, solve_alpha(rho, y, fp), fp);
}

/// Closure quantities of one state, from a single volume-fraction solve.
template <class Scalar>
struct Thermo {
  Scalar alpha{};
  Scalar pressure{};
  Scalar sound_speed{};
};

template <class Scalar>
Thermo<Scalar> thermo(const State<Scalar>& w, const FluidPair<Scalar>& fp) {
  const Scalar rho = w[kRho];
  const Scalar y = w[kRhoY] / rho;
  Thermo<Scalar> t;
  t.alpha = solve_alpha(rho, y, fp);
  t.pressure = pressure_from_alpha(rho, y, t.alpha, fp);
  t.sound_speed = wood_sound_speed_from_alpha(rho, y, t.alpha, fp);
  return t;
}

template <class Scalar>
Velocity<Scalar> velocity(const State<Scalar>& w) {
  return w.template segment<3>(kMomX) / w[kRho];
}

/// Lambda: W -> [rho Y, rho (1 - Y), u]. rho Y equals rho_1 alpha by definition of Y.
template <class Scalar>
Primitive<Scalar> to_primitive(const State<Scalar>& w) {
  Primitive<Scalar> v;
  v[0] = w[kRhoY];
  v[1] = w[kRho] - w[kRhoY];
  v.template segment<3>(2) = w.template segment<3>(kMomX) / w[kRho];
  return v;
}

template <class Scalar>
State<Scalar> from_primitive(const Primitive<Scalar>& v) {
  State<Scalar> w;
  const Scalar rho = v[0] + v[1];
  w[kRho] = rho;
  w[kRhoY] = v[0];
  w.template segment<3>(kMomX) = rho * v.template segment<3>(2);
  return w;
}

template <class Scalar>
bool is_admissible(const State<Scalar>& w) {
  return w.allFinite() && w[kRho] > 0 && w[kRhoY] >= 0 && w[kRhoY] <= w[kRho];
}

/// Builds a conserved state from volume fraction, pressure and velocity.
template <class Scalar>
State<Scalar> state_from_alpha_pressure(Scalar alpha, Scalar p, const Velocity<Scalar>& u,
                                        const FluidPair<Scalar>& fp) {
  const Scalar m1 = alpha * fp.fluid1.density(p);
  const Scalar m2 = (1 - alpha) * fp.fluid2.density(p);
  Primitive<Scalar> v;
  v << m1, m2, u[0], u[1], u[2];
  return from_primitive(v);
}

namespace detail {

template <class Scalar>
Scalar simpson(Scalar a, Scalar fa, Scalar b, Scalar fb, Scalar fm) {
  return (b - a) / 6 * (fa + 4 * fm + fb);
}

template <class Scalar, class F>
Scalar adaptive_simpson(F&& f, Scalar a, Scalar fa, Scalar b, Scalar fb, Scalar m, Scalar fm, Scalar whole, Scalar tol,
                        int depth) {
  const Scalar lm = (a + m) / 2;
  const Scalar rm = (m + b) / 2;
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = simpson(a, fa, m, fm, flm);
  const Scalar right = simpson(m, fm, b, fb, frm);
  const Scalar delta = left + right - whole;
  using std::abs;
  if (abs(delta) <= 15 * tol) return left + right + delta / 15;
  if (depth <= 0) throw NumericError("free energy quadrature did not converge");
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace detail

namespace detail {

// int_{rho_ref}^{rho} (P(r, Y) - shift) / r^2 dr
template <class Scalar>
Scalar pressure_integral(Scalar rho, Scalar y, const FluidPair<Scalar>& fp, Scalar rho_ref, Scalar shift,
                         Scalar rel_tol) {
  using std::abs;
  if (!(rho > 0) || !(rho_ref > 0)) throw NumericError("free energy needs positive densities");
  if (rho == rho_ref) return Scalar(0);
  auto integrand = [&](Scalar r) { return (mixture_pressure(r, y, fp) - shift) / (r * r); };
  const Scalar fa = integrand(rho_ref);
  const Scalar fb = integrand(rho);
  const Scalar m = (rho_ref + rho) / 2;
  const Scalar fm = integrand(m);
  const Scalar whole = simpson(rho_ref, fa, rho, fb, fm);
  // scale the tolerance by a magnitude estimate so it is relative
  const Scalar mag = (abs(fa) + abs(fb) + abs(fm)) / 3 * abs(rho - rho_ref);
  const Scalar tol = rel_tol * std::max(mag, std::numeric_limits<Scalar>::min());
  return adaptive_simpson(integrand, rho_ref, fa, rho, fb, m, fm, whole, tol, 48);
}

}  // namespace detail

/// Specific free energy F(rho, Y) = int_{rho_ref}^{rho} P(r, Y) / r^2 dr (J/kg),
/// by adaptive Simpson quadrature with relative tolerance `rel_tol`.
template <class Scalar>
Scalar free_energy(Scalar rho, Scalar y, const FluidPair<Scalar>& fp, Scalar rho_ref, Scalar rel_tol = Scalar(1e-11)) {
  return detail::pressure_integral(rho, y, fp, rho_ref, Scalar(0), rel_tol);
}

/// int_{rho_ref}^{rho} (P(r, Y) - P(rho_ref, Y)) / r^2 dr. At fixed Y, rho times this
/// differs from rho F by a function linear in rho, and stays small near rho_ref.
template <class Scalar>
Scalar relative_free_energy(Scalar rho, Scalar y, const FluidPair<Scalar>& fp, Scalar rho_ref,
                            Scalar rel_tol = Scalar(1e-11)) {
  return detail::pressure_integral(rho, y, fp, rho_ref, mixture_pressure(rho_ref, y, fp), rel_tol);
}

}  // namespace zamr
