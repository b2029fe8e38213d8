#pragma once

// Translation-equivariant half-plane transforms parameterized by a real
// shift beta and a finite circle measure sigma:
//
//   F(z) = z - beta + i K(e^{iz}),   K(w) = integral (1 + zeta w)/(1 - zeta w) dsigma
//
// F satisfies F(z + 2pi) = F(z) + 2pi by construction; f(w) = -beta + i K(w)
// maps the disk into the closed upper half-plane.  For purely atomic sigma
// the represented line measure is purely atomic and its atoms are the roots
// of a cotangent equation, one per interval between consecutive poles.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "wrapconv/common.hpp"
#include "wrapconv/measures.hpp"
#include "wrapconv/transforms.hpp"

namespace wrapconv {

struct ClassLDescriptor {
  double beta = 0.0;
  CircleMeasure sigma;

  /// Disk-side symbol f(w) = -beta + i K(w).
  cplx f_disk(cplx w) const { return -beta + kImag * sigma.herglotz_integral(w); }
};

/// Closed-form F handle induced by a descriptor.
inline TransformHandle classl_F(const ClassLDescriptor& d) {
  TransformHandle t;
  t.kind = TransformHandle::Kind::FOnHalfPlane;
  t.periodic_shift = true;
  t.provenance = "closed-form";
  t.eval = [d](cplx z) { return z + d.f_disk(std::exp(kImag * z)); };
  return t;
}

struct MembershipResult {
  bool is_member = false;
  double max_deviation = 0.0;  // worst |F(z+2pi) - F(z) - 2pi| over the samples
};

/// Equivariance + Pick test over half-plane samples.
inline MembershipResult membership_check(const TransformHandle& f, const std::vector<cplx>& samples,
                                         double tol = 1e-8) {
  double dev = 0.0;
  bool pick_ok = true;
  for (cplx z : samples) {
    dev = std::max(dev, std::abs(f(z + kTwoPi) - f(z) - kTwoPi));
    if (f(z).imag() < z.imag() - 1e-10) pick_ok = false;
  }
  return MembershipResult{dev < tol && pick_ok, dev};
}

struct LineAtom {
  double x = 0.0;
  double weight = 0.0;
  int family = 0;       // index of the sigma atom owning the left pole
  int branch_k = 0;     // 2pi-translate index of the left pole
  double left_pole = 0.0;
  double right_pole = 0.0;
};

namespace detail {

inline double cot(double u) { return std::cos(u) / std::sin(u); }

}  // namespace detail

/// Roots of x - beta = sum_j a_j cot((theta_j + x)/2) between consecutive
/// poles -theta_j + 2 pi k for |k| <= window, with weights
/// 1 / (1 + (1/2) sum_j a_j (1 + cot^2((theta_j + x)/2))).
/// sigma must be purely atomic.  Throws "window-too-small" when the
/// captured weight is below 0.5.
inline std::vector<LineAtom> solve_atoms_detailed(const ClassLDescriptor& d, int window) {
  if (window < 1) throw std::invalid_argument("solve_atoms: window must be >= 1");
  if (d.sigma.has_density_part())
    throw std::invalid_argument("solve_atoms: sigma must be purely atomic");
  const auto& atoms = d.sigma.atoms();
  if (atoms.empty()) {
    // Point mass at beta.
    return {LineAtom{d.beta, 1.0, 0, 0, d.beta, d.beta}};
  }

  struct Pole {
    double x;
    int family;
    int k;
  };
  std::vector<Pole> poles;
  poles.reserve(atoms.size() * (2 * window + 1));
  for (std::size_t j = 0; j < atoms.size(); ++j)
    for (int k = -window; k <= window; ++k)
      poles.push_back(Pole{-atoms[j].theta + kTwoPi * k, static_cast<int>(j), k});
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.x < b.x; });

  auto rhs = [&](double x) {
    double s = 0.0;
    for (const CircleAtom& a : atoms) s += a.mass * detail::cot(0.5 * (a.theta + x));
    return s;
  };
  auto g = [&](double x) { return x - d.beta - rhs(x); };
  auto weight_at = [&](double x) {
    double s = 1.0;
    for (const CircleAtom& a : atoms) {
      const double c = detail::cot(0.5 * (a.theta + x));
      s += 0.5 * a.mass * (1.0 + c * c);
    }
    return 1.0 / s;
  };

  const double standoff = 1e-9;
  std::vector<LineAtom> roots;
  roots.reserve(poles.size());
  for (std::size_t m = 0; m + 1 < poles.size(); ++m) {
    double lo = poles[m].x + standoff;
    double hi = poles[m + 1].x - standoff;
    if (hi <= lo) continue;  // coincident poles from equal angles cannot occur (distinct atoms)
    double glo = g(lo), ghi = g(hi);
    // g increases from -inf to +inf across the interval; widen the standoff
    // if the evaluation right next to the pole has not yet blown up.
    int guard = 0;
    while (glo > 0.0 && guard++ < 30) {
      lo = poles[m].x + (lo - poles[m].x) * 0.1;
      glo = g(lo);
    }
    guard = 0;
    while (ghi < 0.0 && guard++ < 30) {
      hi = poles[m + 1].x - (poles[m + 1].x - hi) * 0.1;
      ghi = g(hi);
    }
    if (!(glo < 0.0 && ghi > 0.0)) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    roots.push_back(LineAtom{x, weight_at(x), poles[m].family, poles[m].k, poles[m].x,
                             poles[m + 1].x});
  }
  double captured = 0.0;
  for (const LineAtom& r : roots) captured += r.weight;
  if (captured < 0.5) throw NumericError("window-too-small");
  return roots;
}

inline RealAtomicMeasure solve_atoms(const ClassLDescriptor& d, int window) {
  std::vector<RealAtom> out;
  for (const LineAtom& r : solve_atoms_detailed(d, window)) out.push_back(RealAtom{r.x, r.weight});
  return RealAtomicMeasure(std::move(out));
}

/// Density of the absolutely continuous part over the given grid:
///   density(x) = (1/pi) Im f(e^{ix}) / ((x + Re f(e^{ix}))^2 + (Im f(e^{ix}))^2)
/// evaluated at the boundary directly when sigma has no atoms (the trig
/// polynomial makes f continuous up to the circle); otherwise through an
/// r-ladder, with the profile flagged partial.
inline MeasureProfile classl_density(const ClassLDescriptor& d, const std::vector<double>& grid) {
  MeasureProfile p;
  p.domain = Domain::Line;
  p.grid = grid;
  p.density.resize(grid.size());
  const bool mixed = d.sigma.has_atoms();
  const std::vector<double> ladder = mixed ? std::vector<double>{1e-3, 1e-4, 1e-5}
                                           : std::vector<double>{0.0};
  std::vector<double> vals(ladder.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      const double r = 1.0 - ladder[j];
      const cplx fb = d.f_disk(r * std::polar(1.0, x));
      const double im = fb.imag(), re = fb.real();
      vals[j] = (1.0 / kPi) * im / ((x + re) * (x + re) + im * im);
    }
    double v = mixed ? extrapolate_to_zero<double>(ladder, vals) : vals[0];
    p.density[i] = std::max(0.0, v);
  }
  p.captured_mass = p.density_mass();
  p.truncation_note = mixed ? "atomic-part-present: absolutely continuous part only, r-ladder"
                            : "boundary evaluation at r=1";
  return p;
}

/// Branch index n = floor(-beta / 2pi).  Shifting by m replaces beta with
/// beta - 2 pi m (convolving with the point mass at 2 pi m); the wrapped
/// image is unchanged.
inline int branch_index(const ClassLDescriptor& d) {
  return static_cast<int>(std::floor(-d.beta / kTwoPi));
}

inline ClassLDescriptor shift(const ClassLDescriptor& d, int m) {
  return ClassLDescriptor{d.beta - kTwoPi * m, d.sigma};
}

}  // namespace wrapconv
