#pragma once

// Analytic transform evaluation and inversion.
//
// A TransformHandle wraps either a self-map F of the upper half-plane or a
// self-map eta of the unit disk with eta(0) = 0.  Inversion runs a damped
// Newton iteration with a domain guard, extended by straight-segment
// continuation from a trust anchor (i*1e3 for F, 1e-3 for eta) when the
// target is far from the anchor image.  Boundary recovery extrapolates
// Poisson-regularized values to the boundary through a ladder of offsets.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wrapconv/common.hpp"
#include "wrapconv/measures.hpp"

namespace wrapconv {

struct TransformHandle {
  enum class Kind { FOnHalfPlane, EtaOnDisk };

  Kind kind = Kind::FOnHalfPlane;
  std::function<cplx(cplx)> eval;
  bool periodic_shift = false;          // F(z + 2pi) = F(z) + 2pi
  bool vanishes_only_at_zero = false;   // eta(z) = 0 iff z = 0
  std::string provenance = "closed-form";

  cplx operator()(cplx z) const { return eval(z); }

  bool in_domain(cplx z) const {
    return kind == Kind::FOnHalfPlane ? in_upper_half(z) : in_unit_disk(z);
  }
};

struct InversionResult {
  cplx preimage{0.0, 0.0};
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline cplx numeric_derivative(const TransformHandle& t, cplx z) {
  const double h = 1e-7 * (1.0 + std::abs(z));
  // For F handles step parallel to the real axis keeps both points in the
  // half-plane; for eta handles shrink toward the origin if near the rim.
  cplx dz{h, 0.0};
  if (t.kind == TransformHandle::Kind::EtaOnDisk && std::abs(z) + h >= 1.0) dz = -z / std::abs(z) * h;
  const cplx f1 = t(z + dz);
  const cplx f0 = t(z - dz);
  return (f1 - f0) / (2.0 * dz);
}

/// Damped Newton solve of T(w) = target from a seed inside the domain.
/// Up to `max_iter` iterations with `max_halvings` step halvings each.
inline InversionResult newton_solve(const TransformHandle& t, cplx target, cplx seed,
                                    double tol, int max_iter = 200, int max_halvings = 10) {
  cplx w = seed;
  if (!t.in_domain(w)) throw NumericError("left-domain");
  cplx fw = t(w);
  if (!is_finite(fw)) throw NumericError("nan-in-evaluation");
  double err = std::abs(fw - target);
  for (int it = 1; it <= max_iter; ++it) {
    if (err <= tol) return InversionResult{w, err, it - 1};
    const cplx der = numeric_derivative(t, w);
    if (!is_finite(der) || std::abs(der) == 0.0) throw NumericError("no-convergence");
    cplx step = (target - fw) / der;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= max_halvings; ++h) {
      const cplx cand = w + lambda * step;
      if (t.in_domain(cand)) {
        const cplx fc = t(cand);
        if (is_finite(fc)) {
          const double ec = std::abs(fc - target);
          if (ec < err || (h == max_halvings && ec < 1.5 * err)) {
            w = cand;
            fw = fc;
            err = ec;
            accepted = true;
            break;
          }
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (!t.in_domain(w + lambda * step)) throw NumericError("left-domain");
      throw NumericError("no-convergence");
    }
  }
  if (err <= tol) return InversionResult{w, err, max_iter};
  throw NumericError("no-convergence");
}

}  // namespace detail

/// Continuation anchor for a handle: a point whose image is trusted to be
/// reachable by Newton directly (deep in the half-plane / near the origin).
inline cplx inversion_anchor(const TransformHandle& t) {
  return t.kind == TransformHandle::Kind::FOnHalfPlane ? cplx{0.0, 1e3} : cplx{1e-3, 0.0};
}

/// Solve T(preimage) = target.  A direct Newton attempt from the seed is
/// tried first; on failure the target is reached along a straight segment
/// from the anchor image, adaptively subdivided.
inline InversionResult invert_transform(const TransformHandle& t, cplx target, cplx seed,
                                        double tol = 1e-12) {
  try {
    return detail::newton_solve(t, target, seed, tol);
  } catch (const NumericError&) {
    // fall through to continuation
  }
  const cplx z0 = inversion_anchor(t);
  const cplx w0 = t(z0);
  cplx z = z0;
  double s = 0.0;
  double step = 1.0;
  int iterations = 0;
  InversionResult last{z0, std::abs(w0 - target), 0};
  int splits = 0;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + step);
    const cplx w_next = w0 + s_next * (target - w0);
    try {
      last = detail::newton_solve(t, w_next, z, tol);
      iterations += last.iterations;
      z = last.preimage;
      s = s_next;
      step = std::min(1.0, step * 2.0);
    } catch (const NumericError&) {
      step *= 0.5;
      if (++splits > 60 || step < 1e-7) throw NumericError("no-convergence");
    }
  }
  last.iterations = iterations;
  return last;
}

/// phi(z) = F^{-1}(z) - z, continued from the high-imaginary anchor.
inline cplx phi_eval(const TransformHandle& f, cplx z, double tol = 1e-12) {
  if (f.kind != TransformHandle::Kind::FOnHalfPlane)
    throw std::invalid_argument("phi_eval expects an F handle");
  const InversionResult inv = invert_transform(f, z, z, tol);
  return inv.preimage - z;
}

/// Derivative of eta at the origin, used as the invertibility guard.
inline cplx eta_derivative_at_zero(const TransformHandle& eta) {
  const double h = 1e-6;
  return (eta(cplx{h, 0.0}) - eta(cplx{-h, 0.0})) / (2.0 * h);
}

/// Sigma(z) = eta^{-1}(z)/z, with Sigma(0) = 1/eta'(0).
inline cplx sigma_eval(const TransformHandle& eta, cplx z, double tol = 1e-12) {
  if (eta.kind != TransformHandle::Kind::EtaOnDisk)
    throw std::invalid_argument("sigma_eval expects an eta handle");
  const cplx d0 = eta_derivative_at_zero(eta);
  if (std::abs(d0) < 1e-12) throw NumericError("eta-derivative-zero");
  if (z == cplx{0.0, 0.0}) return 1.0 / d0;
  cplx seed = z / d0;
  if (std::abs(seed) >= 1.0) seed = z;
  const InversionResult inv = invert_transform(eta, z, seed, tol);
  return inv.preimage / z;
}

struct RecoveryOptions {
  double atom_threshold = 1e-4;
  // Refinement ladder used for the second pass at detected atom locations.
  std::vector<double> refine_ladder{1e-5, 1e-6, 1e-7};
};

inline std::vector<double> default_y_ladder() { return {1e-2, 1e-3, 1e-4}; }

namespace detail {

/// Shared boundary-recovery loop for both domains.
/// `density_of(x, h)` and `atom_est(x, h)` evaluate at approach offset h.
inline MeasureProfile recover_generic(Domain domain, const std::vector<double>& grid,
                                      const std::vector<double>& ladder,
                                      const std::function<double(double, double)>& density_of,
                                      const std::function<cplx(double, double)>& atom_est,
                                      const std::function<double(double, double)>& near_atom_score,
                                      const RecoveryOptions& opt, const std::string& note_head) {
  MeasureProfile p;
  p.domain = domain;
  p.grid = grid;
  p.density.resize(grid.size());

  std::vector<cplx> est(ladder.size());
  std::vector<double> dens(ladder.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      dens[j] = density_of(grid[i], ladder[j]);
      est[j] = atom_est(grid[i], ladder[j]);
      if (!std::isfinite(dens[j]) || !is_finite(est[j])) throw NumericError("nan-in-evaluation");
    }
    double d = extrapolate_to_zero<double>(ladder, dens);
    p.density[i] = std::max(0.0, d);
    const cplx m0 = extrapolate_to_zero<cplx>(ladder, est);
    if (std::abs(m0) > opt.atom_threshold) candidates.push_back(i);
  }

  // Refinement pass: locate each candidate atom by minimizing the
  // near-atom score at a small offset, then extrapolate the residue
  // estimate along the refinement ladder.
  std::vector<ProfileAtom> atoms;
  const double y_loc = opt.refine_ladder.back();
  std::size_t skip_until = 0;
  for (std::size_t idx : candidates) {
    if (idx < skip_until) continue;
    const double spacing = grid.size() > 1 ? (grid[1] - grid[0]) : 1.0;
    double a = grid[idx] - 1.5 * spacing;
    double b = grid[idx] + 1.5 * spacing;
    // Golden-section minimization of the score.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = near_atom_score(x1, y_loc), f2 = near_atom_score(x2, y_loc);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - gr * (b - a);
        f1 = near_atom_score(x1, y_loc);
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + gr * (b - a);
        f2 = near_atom_score(x2, y_loc);
      }
      if (b - a < 1e-13 * (1.0 + std::abs(a))) break;
    }
    const double x_star = 0.5 * (a + b);
    std::vector<cplx> refined(opt.refine_ladder.size());
    for (std::size_t j = 0; j < opt.refine_ladder.size(); ++j)
      refined[j] = atom_est(x_star, opt.refine_ladder[j]);
    const cplx w = extrapolate_to_zero<cplx>(opt.refine_ladder, refined);
    if (w.real() > opt.atom_threshold) {
      bool merged = false;
      for (ProfileAtom& existing : atoms)
        if (std::abs(existing.position - x_star) < 2.0 * spacing) merged = true;
      if (!merged) atoms.push_back(ProfileAtom{x_star, w.real()});
    }
    // Skip the immediate neighbors of a processed candidate.
    skip_until = idx + 2;
  }
  p.atoms = std::move(atoms);
  p.captured_mass = p.atom_mass() + p.density_mass();
  p.truncation_note = note_head;
  return p;
}

}  // namespace detail

/// Boundary recovery on the line: density(x) = -(1/pi) Im(1/F(x + iy))
/// extrapolated through the y ladder; atoms where lim iy/F(x+iy) exceeds
/// the threshold, refined by a second ladder pass at the located abscissa.
inline MeasureProfile recover_line(const TransformHandle& f, const std::vector<double>& grid,
                                   std::vector<double> y_ladder = default_y_ladder(),
                                   const RecoveryOptions& opt = {}) {
  if (f.kind != TransformHandle::Kind::FOnHalfPlane)
    throw std::invalid_argument("recover_line expects an F handle");
  auto density_of = [&](double x, double y) {
    const cplx v = f(cplx{x, y});
    if (!is_finite(v)) throw NumericError("nan-in-evaluation");
    return -(1.0 / kPi) * std::imag(1.0 / v);
  };
  auto atom_est = [&](double x, double y) { return cplx{0.0, y} / f(cplx{x, y}); };
  auto score = [&](double x, double y) { return std::abs(f(cplx{x, y})); };
  std::string note = "line window [" + std::to_string(grid.front()) + ", " +
                     std::to_string(grid.back()) + "], y-ladder " +
                     std::to_string(y_ladder.front()) + ".." + std::to_string(y_ladder.back());
  return detail::recover_generic(Domain::Line, grid, y_ladder, density_of, atom_est, score, opt,
                                 note);
}

inline std::vector<double> default_r_ladder() { return {1e-2, 1e-3, 1e-4}; }

/// Boundary recovery on the circle.  The profile abscissa x is the angle of
/// the carrier point e^{ix}; evaluation uses eta(r e^{-ix}) in both the
/// Poisson density and the residue estimate (clockwise orientation).
/// The ladder parameterizes h = 1 - r.
inline MeasureProfile recover_circle(const TransformHandle& eta, const std::vector<double>& grid,
                                     std::vector<double> r_ladder = default_r_ladder(),
                                     const RecoveryOptions& opt = {}) {
  if (eta.kind != TransformHandle::Kind::EtaOnDisk)
    throw std::invalid_argument("recover_circle expects an eta handle");
  auto density_of = [&](double x, double h) {
    const cplx e = eta((1.0 - h) * std::polar(1.0, -x));
    if (!is_finite(e)) throw NumericError("nan-in-evaluation");
    return (1.0 / kTwoPi) * std::real((1.0 + e) / (1.0 - e));
  };
  auto atom_est = [&](double x, double h) {
    const cplx e = eta((1.0 - h) * std::polar(1.0, -x));
    return h * e / (1.0 - e);
  };
  auto score = [&](double x, double h) {
    return std::abs(1.0 - eta((1.0 - h) * std::polar(1.0, -x)));
  };
  std::string note = "circle grid of " + std::to_string(grid.size()) + " angles, r-ladder 1-" +
                     std::to_string(r_ladder.front()) + "..1-" + std::to_string(r_ladder.back());
  return detail::recover_generic(Domain::Circle, grid, r_ladder, density_of, atom_est, score, opt,
                                 note);
}

/// Sampling checks used by tests: worst violation of the Pick property
/// Im F(z) >= Im z over the given half-plane samples (0 when clean).
inline double pick_defect(const TransformHandle& f, const std::vector<cplx>& samples) {
  double worst = 0.0;
  for (cplx z : samples) worst = std::max(worst, z.imag() - f(z).imag());
  return worst;
}

/// Worst violation of the Schur bounds |eta(z)| <= |z|, eta(0) = 0.
inline double schur_defect(const TransformHandle& eta, const std::vector<cplx>& samples) {
  double worst = std::abs(eta(cplx{0.0, 0.0}));
  for (cplx z : samples) worst = std::max(worst, std::abs(eta(z)) - std::abs(z));
  return worst;
}

}  // namespace wrapconv
