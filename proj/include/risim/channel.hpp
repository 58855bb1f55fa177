// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risim/rng.hpp"

// Geometric channel model for a reflecting-surface downlink.
//
// The surface is a uniform planar array of n_x * n_y elements. A plane
// wave towards azimuth nu / elevation psi is described by the direction
// cosines u = cos(psi)cos(nu), v = cos(psi)sin(nu); array responses factor
// into per-axis phase ramps in u and v. The base-station -> surface and
// surface -> user hops compose into a single rank-one cascaded channel
// whose direction cosines are the coordinate-wise sums of the two hops,
// so u and v each live in [-2, 2]. Direction cosines, not angles, are the
// working representation: sums of angles are meaningless near grating
// regions while cosine sums stay well defined.

namespace risim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct ArrayGeometry {
  int n_x = 16;
  int n_y = 16;
  double spacing_wavelengths = 0.25;  // element pitch in carrier wavelengths

  int size() const { return n_x * n_y; }

  void validate() const {
    if (n_x <= 0 || n_y <= 0)
      throw std::invalid_argument("ArrayGeometry: element counts must be positive");
    if (!(spacing_wavelengths > 0.0))
      throw std::invalid_argument("ArrayGeometry: spacing must be positive");
  }
};

// Direction-cosine pair. For a single hop |u|,|v| <= 1; for a cascaded
// (two-hop) direction each component lies in [-2, 2].
struct SteeringDirection {
  double u = 0.0;
  double v = 0.0;

  static SteeringDirection from_angles(double azimuth_rad, double elevation_rad = 0.0) {
    return {std::cos(elevation_rad) * std::cos(azimuth_rad),
            std::cos(elevation_rad) * std::sin(azimuth_rad)};
  }
};

// Direction of departure from `from` towards `to` in the scene plane
// (elevation 0), as direction cosines.
inline SteeringDirection direction_between(const Vec2& from, const Vec2& to) {
  const double d = distance(from, to);
  if (!(d > 0.0))
    throw std::invalid_argument("direction_between: coincident points have no direction");
  return {(to.x - from.x) / d, (to.y - from.y) / d};
}

struct LinkBudget {
  double c0_db = -30.0;        // reference path gain at 1 m
  double exp_bs_ris = 2.0;     // path-loss exponent, base station -> surface
  double exp_ris_ue = 2.8;     // path-loss exponent, surface -> user
  double exp_bs_ue = 3.8;      // path-loss exponent, blocked direct link
  double tx_snr_db = 110.0;    // transmit power over noise, in dB

  double tx_snr_linear() const { return std::pow(10.0, tx_snr_db / 10.0); }
};

// One user of the downlink: position, cascaded direction seen at the
// surface, and a block-static small-scale fading coefficient.
struct UePlacement {
  Vec2 position;
  SteeringDirection cascaded;
  std::complex<double> fading{1.0, 0.0};
};

// Planar-array response for a given direction. Element (m, n) with
// m in [0, n_x), n in [0, n_y) sits at index m * n_y + n (x-major, the
// Kronecker order of the x and y factors) and carries phase
// 2*pi*spacing*(m*u + n*v).
inline std::vector<std::complex<double>> steering_vector(const ArrayGeometry& geom,
                                                         const SteeringDirection& dir) {
  geom.validate();
  std::vector<std::complex<double>> a;
  a.reserve(static_cast<std::size_t>(geom.size()));
  const double k = 2.0 * std::numbers::pi * geom.spacing_wavelengths;
  for (int m = 0; m < geom.n_x; ++m) {
    const double px = k * m * dir.u;
    for (int n = 0; n < geom.n_y; ++n) {
      a.push_back(std::polar(1.0, px + k * n * dir.v));
    }
  }
  return a;
}

// Composition of the incoming (base station -> surface) and outgoing
// (surface -> user) directions into the cascaded channel's direction:
// coordinate-wise sum of direction cosines.
inline SteeringDirection cascaded_direction(const SteeringDirection& bs_side,
                                            const SteeringDirection& ue_side) {
  return {bs_side.u + ue_side.u, bs_side.v + ue_side.v};
}

// Distance-power-law path gain (linear scale): c0 * d^-exponent.
inline double path_loss_linear(double distance_m, double exponent, const LinkBudget& budget) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("path_loss_linear: distance must be positive, got " +
                                std::to_string(distance_m));
  return std::pow(10.0, budget.c0_db / 10.0) * std::pow(distance_m, -exponent);
}

// Two-hop cascaded large-scale gain for a user: bs->surface times surface->user.
inline double cascaded_path_gain(const Vec2& bs, const Vec2& ris, const Vec2& ue,
                                 const LinkBudget& budget) {
  return path_loss_linear(distance(bs, ris), budget.exp_bs_ris, budget) *
         path_loss_linear(distance(ris, ue), budget.exp_ris_ue, budget);
}

// <phi, a> with the convention of conjugating the first argument.
inline std::complex<double> inner_product_conj(std::span<const std::complex<double>> phi,
                                               std::span<const std::complex<double>> a) {
  if (phi.size() != a.size())
    throw std::invalid_argument("inner_product_conj: length mismatch (" +
                                std::to_string(phi.size()) + " vs " + std::to_string(a.size()) +
                                ")");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < phi.size(); ++i) acc += std::conj(phi[i]) * a[i];
  return acc;
}

// Scalar effective channel through the surface: sqrt(beta) * alpha * phi^H a.
inline std::complex<double> effective_channel(std::span<const std::complex<double>> phase_profile,
                                              std::span<const std::complex<double>> response,
                                              double beta, std::complex<double> alpha) {
  if (!(beta >= 0.0)) throw std::invalid_argument("effective_channel: beta must be nonnegative");
  return std::sqrt(beta) * alpha * inner_product_conj(phase_profile, response);
}

// Achievable spectral efficiency at a given post-combining power gain,
// log2(1 + gain * snr), in bit/s/Hz.
inline double spectral_efficiency_from_gain(double power_gain, const LinkBudget& budget) {
  if (!(power_gain >= 0.0))
    throw std::invalid_argument("spectral_efficiency_from_gain: gain must be nonnegative");
  return std::log2(1.0 + power_gain * budget.tx_snr_linear());
}

inline double spectral_efficiency(std::complex<double> effective, const LinkBudget& budget) {
  return spectral_efficiency_from_gain(std::norm(effective), budget);
}

}  // namespace risim
