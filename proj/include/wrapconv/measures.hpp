#pragma once

// Measure representations.
//
// CircleMeasure is a finite positive measure on the unit circle given by a
// list of atoms plus a nonnegative trigonometric-polynomial density with
// respect to normalized angle d(theta)/2pi.  RealAtomicMeasure is a finite
// atomic measure on the real line.  MeasureProfile is the common output
// container for recovered measures on either domain: detected atoms plus a
// sampled density grid with mass accounting.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wrapconv/common.hpp"

namespace wrapconv {

struct CircleAtom {
  double theta = 0.0;  // angle of the carrier point e^{i theta}, in [0, 2pi)
  double mass = 0.0;   // >= 0
};

/// Finite positive measure on the circle: atoms + trig-polynomial density
/// d(e^{i theta}) = c0 + 2 Re sum_{n>=1} c_n e^{i n theta} w.r.t. dtheta/2pi.
/// Density nonnegativity is certified by dense sampling at construction.
class CircleMeasure {
 public:
  static constexpr int kPositivityGrid = 4096;
  static constexpr double kPositivityTol = 1e-9;

  CircleMeasure() = default;

  CircleMeasure(std::vector<CircleAtom> atoms, double c0, std::vector<cplx> cn)
      : atoms_(std::move(atoms)), c0_(c0), cn_(std::move(cn)) {
    validate();
  }

  static CircleMeasure point_mass(double theta, double mass) {
    return CircleMeasure({CircleAtom{wrap_angle(theta), mass}}, 0.0, {});
  }

  static CircleMeasure haar(double mass) { return CircleMeasure({}, mass, {}); }

  const std::vector<CircleAtom>& atoms() const { return atoms_; }
  double c0() const { return c0_; }
  const std::vector<cplx>& cn() const { return cn_; }

  bool has_atoms() const { return !atoms_.empty(); }
  bool has_density_part() const {
    if (c0_ != 0.0) return true;
    for (const cplx& c : cn_)
      if (c != cplx{0.0, 0.0}) return true;
    return false;
  }
  bool is_zero() const { return !has_atoms() && !has_density_part(); }

  double atom_mass() const {
    double s = 0.0;
    for (const CircleAtom& a : atoms_) s += a.mass;
    return s;
  }

  double total_mass() const { return atom_mass() + c0_; }

  /// Density value of the absolutely continuous part at angle theta,
  /// with respect to dtheta/2pi.
  double density_at(double theta) const {
    double d = c0_;
    for (std::size_t n = 0; n < cn_.size(); ++n) {
      const double k = static_cast<double>(n + 1);
      d += 2.0 * (cn_[n].real() * std::cos(k * theta) - cn_[n].imag() * std::sin(k * theta));
    }
    return d;
  }

  /// Moment m_n = integral of zeta^n, n >= 0.  m_0 is the total mass; the
  /// density part contributes conj(c_n) for 1 <= n <= N and zero beyond.
  cplx fourier_moment(int n) const {
    if (n < 0) throw std::invalid_argument("fourier_moment: n must be >= 0");
    if (n == 0) return cplx{total_mass(), 0.0};
    cplx m{0.0, 0.0};
    if (static_cast<std::size_t>(n) <= cn_.size()) m += std::conj(cn_[n - 1]);
    for (const CircleAtom& a : atoms_)
      m += a.mass * std::polar(1.0, n * a.theta);
    return m;
  }

  /// Herglotz integral K(w) = integral of (1 + zeta w)/(1 - zeta w).
  /// Closed form: atoms contribute rational terms, the density part a
  /// polynomial c0 + 2 sum conj(c_n) w^n.
  cplx herglotz_integral(cplx w) const {
    cplx s{c0_, 0.0};
    if (!cn_.empty()) {
      cplx poly{0.0, 0.0};
      for (std::size_t n = cn_.size(); n-- > 0;) poly = (poly + std::conj(cn_[n])) * w;
      s += 2.0 * poly;
    }
    for (const CircleAtom& a : atoms_) {
      const cplx zw = std::polar(1.0, a.theta) * w;
      s += a.mass * (1.0 + zw) / (1.0 - zw);
    }
    return s;
  }

  /// Sum of two measures.  Atom angles are merged on exact equality only;
  /// callers quantize deliberately when they want coalescing.
  friend CircleMeasure circle_measure_add(const CircleMeasure& a, const CircleMeasure& b) {
    std::vector<CircleAtom> atoms = a.atoms_;
    for (const CircleAtom& x : b.atoms_) {
      auto it = std::find_if(atoms.begin(), atoms.end(),
                             [&](const CircleAtom& y) { return y.theta == x.theta; });
      if (it != atoms.end())
        it->mass += x.mass;
      else
        atoms.push_back(x);
    }
    std::vector<cplx> cn(std::max(a.cn_.size(), b.cn_.size()), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.cn_.size(); ++i) cn[i] += a.cn_[i];
    for (std::size_t i = 0; i < b.cn_.size(); ++i) cn[i] += b.cn_[i];
    return CircleMeasure(std::move(atoms), a.c0_ + b.c0_, std::move(cn));
  }

  friend CircleMeasure circle_measure_scale(const CircleMeasure& a, double t) {
    if (t < 0.0) throw NumericError("negative mass");
    std::vector<CircleAtom> atoms = a.atoms_;
    for (CircleAtom& x : atoms) x.mass *= t;
    std::vector<cplx> cn = a.cn_;
    for (cplx& c : cn) c *= t;
    return CircleMeasure(std::move(atoms), a.c0_ * t, std::move(cn));
  }

 private:
  void validate() const {
    for (const CircleAtom& a : atoms_) {
      if (!(a.mass >= 0.0)) throw std::invalid_argument("circle atom mass must be >= 0");
      if (a.theta < 0.0 || a.theta >= kTwoPi)
        throw std::invalid_argument("circle atom angle must lie in [0, 2pi)");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      for (std::size_t j = i + 1; j < atoms_.size(); ++j)
        if (atoms_[i].theta == atoms_[j].theta)
          throw std::invalid_argument("circle atom angles must be distinct");
    if (!(c0_ >= 0.0)) throw std::invalid_argument("c0 must be >= 0");
    if (has_density_part()) {
      const double tol = kPositivityTol * std::max(1.0, c0_);
      for (int i = 0; i < kPositivityGrid; ++i) {
        const double theta = kTwoPi * i / kPositivityGrid;
        if (density_at(theta) < -tol)
          throw std::invalid_argument("trig-polynomial density is negative on the certificate grid");
      }
    }
  }

  std::vector<CircleAtom> atoms_;
  double c0_ = 0.0;
  std::vector<cplx> cn_;
};

struct RealAtom {
  double x = 0.0;
  double w = 0.0;  // >= 0
};

/// Finite atomic measure on the real line.  Used both for atom lists of
/// probability measures (total weight <= 1) and for finite canonical
/// measures, so only nonnegativity and distinctness are enforced here;
/// is_sub_probability() checks the stronger contract where it applies.
class RealAtomicMeasure {
 public:
  RealAtomicMeasure() = default;

  explicit RealAtomicMeasure(std::vector<RealAtom> atoms) : atoms_(std::move(atoms)) {
    for (const RealAtom& a : atoms_)
      if (!(a.w >= 0.0)) throw std::invalid_argument("real atom weight must be >= 0");
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      for (std::size_t j = i + 1; j < atoms_.size(); ++j)
        if (atoms_[i].x == atoms_[j].x)
          throw std::invalid_argument("real atom locations must be distinct");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const RealAtom& a, const RealAtom& b) { return a.x < b.x; });
  }

  const std::vector<RealAtom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const {
    double s = 0.0;
    for (const RealAtom& a : atoms_) s += a.w;
    return s;
  }

  bool is_sub_probability(double tol = 1e-9) const { return total_mass() <= 1.0 + tol; }

 private:
  std::vector<RealAtom> atoms_;
};

enum class Domain { Line, Circle };

struct ProfileAtom {
  double position = 0.0;  // line: abscissa x; circle: angle of the point e^{i pos}
  double weight = 0.0;
};

/// Recovered measure: detected atoms plus a sampled density grid.
/// Line densities are w.r.t. dx, circle densities w.r.t. the angle dx.
struct MeasureProfile {
  Domain domain = Domain::Line;
  std::vector<ProfileAtom> atoms;
  std::vector<double> grid;     // increasing abscissas
  std::vector<double> density;  // values >= 0, same length as grid
  double captured_mass = 0.0;
  std::string truncation_note;

  double atom_mass() const {
    double s = 0.0;
    for (const ProfileAtom& a : atoms) s += a.weight;
    return s;
  }

  double density_mass() const { return trapezoid(grid, density); }

  /// Internal accounting consistency and the sub-probability cap.
  void validate() const {
    if (grid.size() != density.size()) throw std::invalid_argument("profile grid size mismatch");
    for (double d : density)
      if (!(d >= 0.0)) throw std::invalid_argument("profile density must be >= 0");
    const double recomputed = atom_mass() + density_mass();
    if (std::abs(recomputed - captured_mass) > 1e-9)
      throw std::invalid_argument("profile mass accounting is inconsistent");
    if (captured_mass > 1.0 + 1e-6)
      throw std::invalid_argument("profile captured mass exceeds 1");
  }

  /// Linear interpolation of the density; zero outside the grid.
  double density_interp(double x) const {
    if (grid.size() < 2 || x < grid.front() || x > grid.back()) return 0.0;
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    std::size_t i = static_cast<std::size_t>((x - grid.front()) / h);
    if (i + 1 >= grid.size()) i = grid.size() - 2;
    // Guard against non-uniform grids: fall back to a local search.
    if (!(grid[i] <= x && x <= grid[i + 1])) {
      auto it = std::upper_bound(grid.begin(), grid.end(), x);
      i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - grid.begin())) - 1;
      if (i + 1 >= grid.size()) i = grid.size() - 2;
    }
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return density[i] * (1.0 - t) + density[i + 1] * t;
  }
};

}  // namespace wrapconv
