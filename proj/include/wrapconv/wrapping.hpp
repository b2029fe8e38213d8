#pragma once

// The wrapping correspondence between half-plane data and disk data.
//
// Descriptor level: (beta, sigma) maps to (gamma = e^{-i beta}, sigma) with
//   eta(z) = gamma z exp(-K_sigma(z)),
// and the induced transforms satisfy exp(i F(z)) = eta(e^{iz}) exactly.
// Measure level: wrap_direct pushes a line profile to the circle through
// x -> e^{-ix}, summing translates over a finite window with an analytic
// tail estimate fitted to the profile edges.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "wrapconv/class_l.hpp"
#include "wrapconv/common.hpp"
#include "wrapconv/measures.hpp"
#include "wrapconv/transforms.hpp"

namespace wrapconv {

/// Disk-side descriptor: unit-modulus gamma plus a finite circle measure.
/// Induces eta(z) = gamma z exp(-K_sigma(z)), which vanishes only at 0 and
/// has eta'(0) = gamma e^{-sigma mass} != 0.
struct BooleanIDDescriptor {
  cplx gamma{1.0, 0.0};
  CircleMeasure sigma;

  void validate() const {
    if (std::abs(std::abs(gamma) - 1.0) > 1e-12)
      throw std::invalid_argument("gamma must have unit modulus");
  }

  cplx eta_at(cplx z) const { return gamma * z * std::exp(-sigma.herglotz_integral(z)); }
};

inline TransformHandle eta_handle(const BooleanIDDescriptor& b) {
  b.validate();
  TransformHandle t;
  t.kind = TransformHandle::Kind::EtaOnDisk;
  t.vanishes_only_at_zero = true;
  t.provenance = "closed-form";
  t.eval = [b](cplx z) { return b.eta_at(z); };
  return t;
}

/// (beta, sigma) -> (e^{-i beta}, sigma).  Exact; no numerics.
inline BooleanIDDescriptor wrap_descriptor(const ClassLDescriptor& d) {
  return BooleanIDDescriptor{std::polar(1.0, -d.beta), d.sigma};
}

/// (gamma, sigma) -> (beta = -Arg gamma + 2 pi n, sigma), Arg in (-pi, pi].
inline ClassLDescriptor unwrap_descriptor(const BooleanIDDescriptor& b, int n = 0) {
  b.validate();
  return ClassLDescriptor{-std::arg(b.gamma) + kTwoPi * n, b.sigma};
}

/// Wrap a 2pi-equivariant F handle into its eta handle:
/// eta(w) = exp(i F(z)) for any z with e^{iz} = w.
inline TransformHandle wrap_handle(const TransformHandle& f) {
  if (f.kind != TransformHandle::Kind::FOnHalfPlane || !f.periodic_shift)
    throw std::invalid_argument("wrap_handle expects a 2pi-equivariant F handle");
  TransformHandle t;
  t.kind = TransformHandle::Kind::EtaOnDisk;
  t.vanishes_only_at_zero = true;
  t.provenance = "composed";
  t.eval = [f](cplx w) -> cplx {
    if (w == cplx{0.0, 0.0}) return {0.0, 0.0};
    const cplx z{std::arg(w), -std::log(std::abs(w))};
    return std::exp(kImag * f(z));
  };
  return t;
}

/// Inverse direction on handles: F(z) = z - i log(eta(e^{iz})/e^{iz}) with
/// the logarithm branch continued from a high-imaginary anchor.
inline TransformHandle unwrap_handle(const TransformHandle& eta) {
  if (eta.kind != TransformHandle::Kind::EtaOnDisk || !eta.vanishes_only_at_zero)
    throw std::invalid_argument("unwrap_handle expects an eta handle vanishing only at 0");
  TransformHandle t;
  t.kind = TransformHandle::Kind::FOnHalfPlane;
  t.periodic_shift = true;
  t.provenance = "composed";
  t.eval = [eta](cplx z) -> cplx {
    auto g = [&](cplx u) {
      const cplx w = std::exp(kImag * u);
      return eta(w) / w;
    };
    const cplx z0{0.0, 14.0};
    cplx logg = std::log(g(z0));
    cplx cur = z0;
    const cplx target{wrap_angle(z.real()), z.imag()};
    int steps = std::max(2, static_cast<int>(std::abs(target - cur) / 0.4) + 1);
    for (int attempt = 0; attempt < 8; ++attempt) {
      cplx lg = logg;
      cplx from = cur;
      bool ok = true;
      for (int s = 1; s <= steps; ++s) {
        const cplx u = from + (target - from) * (static_cast<double>(s) / steps);
        cplx ln = std::log(g(u));
        ln += kImag * (kTwoPi * std::round((lg.imag() - ln.imag()) / kTwoPi));
        if (std::abs(ln - lg) > 1.5) {
          ok = false;
          break;
        }
        lg = ln;
      }
      if (ok) return target - kImag * lg + (z.real() - target.real());
      steps *= 2;
    }
    throw NumericError("no-convergence");
  };
  return t;
}

struct WrapDirectOptions {
  int window = 64;            // translate window M
  bool tail_correction = true;
};

/// Direct-series wrap of a line profile: circle density at the point
/// e^{-ix} is sum over |m| <= M of the line density at x + 2 pi m; line
/// atoms at x map to circle atoms at e^{-ix} with the same weight.
/// Beyond the window (or the profile grid) the tail is estimated from a
/// C/x^2 fit to the profile edges.
inline MeasureProfile wrap_direct(const MeasureProfile& line, const std::vector<double>& angle_grid,
                                  const WrapDirectOptions& opt = {}) {
  if (line.domain != Domain::Line) throw std::invalid_argument("wrap_direct expects a line profile");
  if (line.captured_mass < 0.99) throw NumericError("insufficient-mass");

  MeasureProfile circ;
  circ.domain = Domain::Circle;
  circ.grid = angle_grid;
  circ.density.resize(angle_grid.size(), 0.0);

  double c_plus = 0.0, c_minus = 0.0;
  double edge_plus = 0.0, edge_minus = 0.0;
  const bool have_density = line.grid.size() >= 2;
  if (have_density) {
    // Fit u(s) ~ C/s^2 on the outer five percent of the window.
    const double lo = line.grid.front(), hi = line.grid.back();
    const double span = hi - lo;
    double sp = 0.0, sm = 0.0;
    int np = 0, nm = 0;
    for (std::size_t i = 0; i < line.grid.size(); ++i) {
      const double x = line.grid[i];
      if (x > hi - 0.05 * span && x > 0.0) {
        sp += line.density[i] * x * x;
        ++np;
      }
      if (x < lo + 0.05 * span && x < 0.0) {
        sm += line.density[i] * x * x;
        ++nm;
      }
    }
    c_plus = np > 0 ? sp / np : 0.0;
    c_minus = nm > 0 ? sm / nm : 0.0;
    edge_plus = hi;
    edge_minus = lo;
  }

  double tail_bound = 0.0;
  for (std::size_t i = 0; i < angle_grid.size(); ++i) {
    const double phi = angle_grid[i];
    double s = 0.0;
    for (int m = -opt.window; m <= opt.window; ++m) s += line.density_interp(-phi + kTwoPi * m);
    if (opt.tail_correction && have_density) {
      // Remaining translates behave like sum_{m > m0} C / (x0 + 2 pi m)^2
      // = (C / 4 pi^2) psi'(m0 + x0 / 2 pi); psi'(a) ~ 1/(a - 1/2).
      const double x_here = -phi;
      const double first_plus =
          std::floor((std::min(edge_plus, kTwoPi * opt.window + x_here) - x_here) / kTwoPi) + 1.0;
      const double a_plus = first_plus + x_here / kTwoPi;
      const double t_plus = c_plus / (4.0 * kPi * kPi) / std::max(0.5, a_plus - 0.5);
      const double first_minus =
          std::floor((x_here - std::max(edge_minus, -kTwoPi * opt.window + x_here)) / kTwoPi) + 1.0;
      const double a_minus = first_minus - x_here / kTwoPi;
      const double t_minus = c_minus / (4.0 * kPi * kPi) / std::max(0.5, a_minus - 0.5);
      s += t_plus + t_minus;
      tail_bound = std::max(tail_bound, t_plus + t_minus);
    }
    circ.density[i] = std::max(0.0, s);
  }

  for (const ProfileAtom& a : line.atoms) {
    const double phi = wrap_angle(-a.position);
    bool merged = false;
    for (ProfileAtom& existing : circ.atoms) {
      if (std::abs(existing.position - phi) < 1e-12 ||
          std::abs(std::abs(existing.position - phi) - kTwoPi) < 1e-12) {
        existing.weight += a.weight;
        merged = true;
        break;
      }
    }
    if (!merged) circ.atoms.push_back(ProfileAtom{phi, a.weight});
  }
  std::sort(circ.atoms.begin(), circ.atoms.end(),
            [](const ProfileAtom& a, const ProfileAtom& b) { return a.position < b.position; });

  circ.captured_mass = circ.atom_mass() + circ.density_mass();
  circ.truncation_note = "direct series window M=" + std::to_string(opt.window) +
                         ", tail estimate " + std::to_string(tail_bound);
  return circ;
}

struct AtomPair {
  double line_x = 0.0;
  double circle_angle = 0.0;  // angle of the carrier point on the circle
  double line_weight = 0.0;
  double circle_weight = 0.0;
};

/// Pairs the line atoms of a purely atomic descriptor with the circle
/// atoms of its wrapped image; the circle weight comes from the residue
/// limit (1 - r) eta / (1 - eta) along an r ladder.
inline std::vector<AtomPair> atom_correspondence(const ClassLDescriptor& d, int window = 8) {
  const std::vector<LineAtom> lines = solve_atoms_detailed(d, window);
  const TransformHandle eta = eta_handle(wrap_descriptor(d));
  const std::vector<double> ladder{1e-5, 1e-6, 1e-7};
  std::vector<AtomPair> pairs;
  pairs.reserve(lines.size());
  for (const LineAtom& la : lines) {
    const double phi = wrap_angle(-la.x);
    std::vector<cplx> est(ladder.size());
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      const cplx e = eta((1.0 - ladder[j]) * std::polar(1.0, -phi));
      est[j] = ladder[j] * e / (1.0 - e);
    }
    const cplx w = extrapolate_to_zero<cplx>(ladder, est);
    pairs.push_back(AtomPair{la.x, phi, la.weight, w.real()});
  }
  return pairs;
}

}  // namespace wrapconv
