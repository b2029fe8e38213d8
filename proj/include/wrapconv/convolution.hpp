#pragma once

// The six convolutions, powers, subordination distributions and the
// interpolation flows, on descriptors and transform handles.
//
// Additive side: Boolean convolution is exact descriptor arithmetic,
// monotone convolution is handle composition, free convolution runs the
// subordination fixed point
//   omega1(z) = fix of w -> z + h2(z + h1(w)),  h(w) = F(w) - w,
// and returns F(omega1(z)) through the first factor.  Multiplicative
// operations are routed through the descriptor-level unwrap, the line
// operation, and the exponential wrap of the result.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "wrapconv/class_l.hpp"
#include "wrapconv/common.hpp"
#include "wrapconv/measures.hpp"
#include "wrapconv/transforms.hpp"
#include "wrapconv/wrapping.hpp"

namespace wrapconv {

struct FixedPointDiagnostics {
  int max_iterations = 0;
  double max_residual = 0.0;
};

struct ConvolutionResult {
  TransformHandle handle;
  std::optional<ClassLDescriptor> closed_form_line;
  std::optional<BooleanIDDescriptor> closed_form_circle;
  FixedPointDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Boolean convolutions: exact closed forms.

inline ClassLDescriptor boolean_add(const ClassLDescriptor& a, const ClassLDescriptor& b) {
  return ClassLDescriptor{a.beta + b.beta, circle_measure_add(a.sigma, b.sigma)};
}

inline ClassLDescriptor boolean_power(const ClassLDescriptor& d, double t) {
  if (t < 0.0) throw std::invalid_argument("boolean_power: t must be >= 0");
  return ClassLDescriptor{t * d.beta, circle_measure_scale(d.sigma, t)};
}

inline BooleanIDDescriptor mult_boolean(const BooleanIDDescriptor& a, const BooleanIDDescriptor& b) {
  return BooleanIDDescriptor{a.gamma * b.gamma, circle_measure_add(a.sigma, b.sigma)};
}

/// t-th Boolean power on the circle at an explicit branch k, realized as
/// wrap(boolean_power(unwrap(b, k), t)).  Multi-valuedness lives entirely
/// in the branch choice.
inline BooleanIDDescriptor mult_boolean_power(const BooleanIDDescriptor& b, double t, int branch) {
  return wrap_descriptor(boolean_power(unwrap_descriptor(b, branch), t));
}

/// Boolean power at the handle level: F -> z + t (F(z) - z), eta analog
/// through the wrapped form.
inline TransformHandle boolean_power_handle(const TransformHandle& f, double t) {
  if (f.kind != TransformHandle::Kind::FOnHalfPlane)
    throw std::invalid_argument("boolean_power_handle expects an F handle");
  TransformHandle out;
  out.kind = TransformHandle::Kind::FOnHalfPlane;
  out.periodic_shift = f.periodic_shift;
  out.provenance = "composed";
  out.eval = [f, t](cplx z) { return z + t * (f(z) - z); };
  return out;
}

// ---------------------------------------------------------------------------
// Monotone convolution: composition of handles of matching kind.

inline TransformHandle monotone_compose(const TransformHandle& a, const TransformHandle& b) {
  if (a.kind != b.kind) throw std::invalid_argument("monotone_compose: handle kinds must match");
  TransformHandle out;
  out.kind = a.kind;
  out.periodic_shift = a.periodic_shift && b.periodic_shift;
  out.vanishes_only_at_zero = a.vanishes_only_at_zero && b.vanishes_only_at_zero;
  out.provenance = "composed";
  out.eval = [a, b](cplx z) { return a(b(z)); };
  return out;
}

// ---------------------------------------------------------------------------
// Free convolution by subordination fixed point.

struct FixedPointOptions {
  double step_tol = 1e-13;
  int max_iterations = 10000;
};

namespace detail {

inline cplx subordination_fixed_point(const std::function<cplx(cplx)>& map, cplx w0,
                                      const FixedPointOptions& opt) {
  cplx w = w0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const cplx next = map(w);
    if (!is_finite(next)) throw NumericError("nan-in-evaluation");
    if (std::abs(next - w) < opt.step_tol) return next;
    w = next;
  }
  throw NumericError("fixed-point-stall");
}

}  // namespace detail

/// Free additive convolution of two F handles.  The result handle flags
/// periodic_shift when both inputs carry it.
inline ConvolutionResult free_add(const TransformHandle& f1, const TransformHandle& f2,
                                  const FixedPointOptions& opt = {}) {
  if (f1.kind != TransformHandle::Kind::FOnHalfPlane ||
      f2.kind != TransformHandle::Kind::FOnHalfPlane)
    throw std::invalid_argument("free_add expects F handles");
  ConvolutionResult res;
  res.handle.kind = TransformHandle::Kind::FOnHalfPlane;
  res.handle.periodic_shift = f1.periodic_shift && f2.periodic_shift;
  res.handle.provenance = "fixed-point";
  res.handle.eval = [f1, f2, opt](cplx z) {
    auto h1 = [&](cplx w) { return f1(w) - w; };
    auto h2 = [&](cplx w) { return f2(w) - w; };
    auto map = [&](cplx w) { return z + h2(z + h1(w)); };
    const cplx omega1 = detail::subordination_fixed_point(map, z, opt);
    return f1(omega1);
  };
  return res;
}

/// t-th free power, t >= 1:  omega = fix of w -> z/t + (1 - 1/t) F(w),
/// F_t(z) = F(omega(z)).
inline ConvolutionResult free_power(const TransformHandle& f, double t,
                                    const FixedPointOptions& opt = {}) {
  if (f.kind != TransformHandle::Kind::FOnHalfPlane)
    throw std::invalid_argument("free_power expects an F handle");
  if (t < 1.0) throw std::invalid_argument("free_power: t must be >= 1");
  ConvolutionResult res;
  res.handle.kind = TransformHandle::Kind::FOnHalfPlane;
  res.handle.periodic_shift = f.periodic_shift;
  res.handle.provenance = "fixed-point";
  if (t == 1.0) {
    res.handle = f;
    return res;
  }
  res.handle.eval = [f, t, opt](cplx z) {
    auto map = [&](cplx w) { return z / t + (1.0 - 1.0 / t) * f(w); };
    const cplx omega = detail::subordination_fixed_point(map, z, opt);
    return f(omega);
  };
  return res;
}

// ---------------------------------------------------------------------------
// Multiplicative free convolution through the unwrap route.

inline ConvolutionResult mult_free(const BooleanIDDescriptor& b1, const BooleanIDDescriptor& b2,
                                   const FixedPointOptions& opt = {}) {
  if (b1.sigma.is_zero() && b2.sigma.is_zero()) {
    // Rotations compose exactly.
    BooleanIDDescriptor out{b1.gamma * b2.gamma, CircleMeasure{}};
    ConvolutionResult res;
    res.handle = eta_handle(out);
    res.closed_form_circle = out;
    return res;
  }
  const TransformHandle f1 = classl_F(unwrap_descriptor(b1, 0));
  const TransformHandle f2 = classl_F(unwrap_descriptor(b2, 0));
  ConvolutionResult res;
  res.handle = wrap_handle(free_add(f1, f2, opt).handle);
  return res;
}

/// t-th multiplicative free power (t >= 1) at an explicit unwrap branch.
inline ConvolutionResult mult_free_power(const BooleanIDDescriptor& b, double t, int branch,
                                         const FixedPointOptions& opt = {}) {
  const TransformHandle f = classl_F(unwrap_descriptor(b, branch));
  ConvolutionResult res;
  res.handle = wrap_handle(free_power(f, t, opt).handle);
  return res;
}

/// Free power for arbitrary t > 0 through the phi route: solves
/// z' + t phi(z') = w' on the line and exponentiates.  Used where partial
/// powers appear inside identities; the measure itself need not exist for
/// t < 1, only the composite evaluations used by callers.
inline TransformHandle free_power_phi_eta(const ClassLDescriptor& d, double t) {
  if (t <= 0.0) throw std::invalid_argument("free_power_phi_eta: t must be > 0");
  const TransformHandle f = classl_F(d);
  TransformHandle out;
  out.kind = TransformHandle::Kind::EtaOnDisk;
  out.vanishes_only_at_zero = true;
  out.provenance = "fixed-point";
  out.eval = [f, t](cplx w) -> cplx {
    if (w == cplx{0.0, 0.0}) return {0.0, 0.0};
    // Solve u + t*phi(u) = z_w for u; eta_t(w) = exp(i F_t) with
    // F_t(z_w) = u... the inverse relation F_t^{-1} = z + t phi gives
    // eta_t(w) = exp(i u) directly at z_w = -i Log w.
    const cplx zw{std::arg(w), -std::log(std::abs(w))};
    TransformHandle inv_map;
    inv_map.kind = TransformHandle::Kind::FOnHalfPlane;
    inv_map.provenance = "composed";
    inv_map.eval = [f, t](cplx u) { return u + t * phi_eval(f, u); };
    const InversionResult r = invert_transform(inv_map, zw, zw, 1e-12);
    return std::exp(kImag * r.preimage);
  };
  return out;
}

// ---------------------------------------------------------------------------
// Subordination distributions.

/// Line: F_{mu boxright nu} = F_nu^{-1} o F_{mu boxplus nu}.
inline ConvolutionResult subordination_dist_line(const TransformHandle& f_mu,
                                                 const TransformHandle& f_nu,
                                                 const FixedPointOptions& opt = {}) {
  const TransformHandle f_sum = free_add(f_mu, f_nu, opt).handle;
  ConvolutionResult res;
  res.handle.kind = TransformHandle::Kind::FOnHalfPlane;
  res.handle.periodic_shift = f_sum.periodic_shift;
  res.handle.provenance = "fixed-point";
  res.handle.eval = [f_sum, f_nu](cplx z) {
    const cplx target = f_sum(z);
    return invert_transform(f_nu, target, z, 1e-12).preimage;
  };
  return res;
}

/// Circle: eta_{mu msubord nu} = eta_nu^{-1} o eta_{mu boxtimes nu}.
inline ConvolutionResult subordination_dist_circle(const TransformHandle& eta_mu,
                                                   const TransformHandle& eta_nu,
                                                   const FixedPointOptions& opt = {}) {
  const TransformHandle f_mu = unwrap_handle(eta_mu);
  const TransformHandle f_nu = unwrap_handle(eta_nu);
  const TransformHandle eta_prod = wrap_handle(free_add(f_mu, f_nu, opt).handle);
  ConvolutionResult res;
  res.handle.kind = TransformHandle::Kind::EtaOnDisk;
  res.handle.vanishes_only_at_zero = true;
  res.handle.provenance = "fixed-point";
  res.handle.eval = [eta_prod, eta_nu](cplx z) -> cplx {
    if (z == cplx{0.0, 0.0}) return {0.0, 0.0};
    const cplx target = eta_prod(z);
    return invert_transform(eta_nu, target, z, 1e-12).preimage;
  };
  return res;
}

inline ConvolutionResult subordination_dist_circle(const BooleanIDDescriptor& b_mu,
                                                   const BooleanIDDescriptor& b_nu,
                                                   const FixedPointOptions& opt = {}) {
  const TransformHandle eta_prod = mult_free(b_mu, b_nu, opt).handle;
  const TransformHandle eta_nu = eta_handle(b_nu);
  ConvolutionResult res;
  res.handle.kind = TransformHandle::Kind::EtaOnDisk;
  res.handle.vanishes_only_at_zero = true;
  res.handle.provenance = "fixed-point";
  res.handle.eval = [eta_prod, eta_nu](cplx z) -> cplx {
    if (z == cplx{0.0, 0.0}) return {0.0, 0.0};
    const cplx target = eta_prod(z);
    return invert_transform(eta_nu, target, z, 1e-12).preimage;
  };
  return res;
}

// ---------------------------------------------------------------------------
// Interpolation flows.

/// Line flow: F_out(z) = z + (F_{t}(z) - z) / (1 + t) where F_t is the
/// (1+t)-th free power of the input handle.
inline TransformHandle belinschi_nica_line(const TransformHandle& f, double t,
                                           const FixedPointOptions& opt = {}) {
  if (t < 0.0) throw std::invalid_argument("belinschi_nica_line: t must be >= 0");
  if (t == 0.0) return f;
  const TransformHandle ft = free_power(f, 1.0 + t, opt).handle;
  return boolean_power_handle(ft, 1.0 / (1.0 + t));
}

/// Circle flow at an explicit branch: wrap o line-flow o unwrap.
inline ConvolutionResult belinschi_nica_circle(const BooleanIDDescriptor& b, double t,
                                               int branch = 0, const FixedPointOptions& opt = {}) {
  const TransformHandle f = classl_F(unwrap_descriptor(b, branch));
  ConvolutionResult res;
  res.handle = wrap_handle(belinschi_nica_line(f, t, opt));
  if (t == 0.0) res.closed_form_circle = b;
  return res;
}

}  // namespace wrapconv
