#include "visclim/mollify.hpp"

#include <algorithm>
#include <memory>

namespace visclim {

namespace {

constexpr int kKernelOrder = 48;   // Gauss points carrying the kernel
constexpr int kTableNodes = 2049;  // u-grid for the smoothed flux/diffusion tables

Real raw_bump(Real s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

/// First-order Taylor extension of fn beyond [0,1]; keeps the Lipschitz
/// constant and restores the second-order convolution error up to the ends.
struct Extended {
  Fn1 fn;
  Real f0, f1, s0, s1;

  Extended(const Fn1& f, Real slope0, Real slope1)
      : fn(f), f0(f(0.0)), f1(f(1.0)), s0(slope0), s1(slope1) {}

  Real operator()(Real u) const {
    if (u < 0.0) return f0 + s0 * u;
    if (u > 1.0) return f1 + s1 * (u - 1.0);
    return fn(u);
  }
  Real deriv_extended(const Fn1& dfn, Real u) const {
    if (u < 0.0) return s0;
    if (u > 1.0) return s1;
    return dfn(u);
  }
};

}  // namespace

MollifierKernel::MollifierKernel(Real width) : width_(width) {
  if (!(width > 0.0)) throw std::invalid_argument("MollifierKernel: width must be positive");
  const QuadRule rule = gauss_legendre(kKernelOrder);
  nodes_ = rule.nodes;
  weights_ = Array::Zero(kKernelOrder);
  for (int i = 0; i < kKernelOrder; ++i) weights_[i] = rule.weights[i] * raw_bump(nodes_[i]);
  weights_ /= weights_.sum();  // exact unit mass under this rule

  // Cumulative mass table for the smoothed step.
  const int n = 1025;
  Array cum = Array::Zero(n);
  Real acc = 0;
  const Real h = 2.0 / (n - 1);
  Real prev = raw_bump(-1.0);
  for (int i = 1; i < n; ++i) {
    const Real s = -1.0 + i * h;
    const Real cur = raw_bump(s);
    acc += 0.5 * h * (prev + cur);
    cum[i] = acc;
    prev = cur;
  }
  cum /= cum[n - 1];
  step_ = LinearTable(-1.0, 1.0, std::move(cum));
}

Real MollifierKernel::convolve(const Fn1& fn, Real x) const {
  Real acc = 0;
  for (Eigen::Index i = 0; i < nodes_.size(); ++i) acc += weights_[i] * fn(x - width_ * nodes_[i]);
  return acc;
}

Real MollifierKernel::smooth_step(Real x) const { return step_(x / width_); }

Real MollifierKernel::density(Real s) const {
  static const Real norm = adaptive_simpson(raw_bump, -1.0, 1.0, 1e-14);
  return raw_bump(s / width_) / (norm * width_);
}

namespace {

struct SmoothedCurve {
  HermiteTable table;
  Real value_shift = 0.0;
};

SmoothedCurve smooth_on_unit(const MollifierKernel& kernel, const Fn1& fn, const Fn1& dfn,
                             Real slope0, Real slope1, bool shift_to_zero) {
  Extended ext(fn, slope0, slope1);
  Array vals = Array::Zero(kTableNodes), ders = Array::Zero(kTableNodes);
  for (int i = 0; i < kTableNodes; ++i) {
    const Real u = static_cast<Real>(i) / (kTableNodes - 1);
    vals[i] = kernel.convolve([&](Real s) { return ext(s); }, u);
    ders[i] = kernel.convolve([&](Real s) { return ext.deriv_extended(dfn, s); }, u);
  }
  SmoothedCurve out;
  if (shift_to_zero) {
    out.value_shift = vals[0];
    vals -= out.value_shift;
  }
  out.table = HermiteTable(0.0, 1.0, std::move(vals), std::move(ders));
  return out;
}

/// Discrete kernel smoothing of grid samples: nonnegative unit-mass weights,
/// constant extension at the box edges.
Array smooth_axis(const Array& v, long n, long stride, long lines, long line_stride, Real mu,
                  Real dx) {
  const long radius = std::max<long>(1, static_cast<long>(std::ceil(mu / dx)));
  Array w = Array::Zero(2 * radius + 1);
  for (long k = -radius; k <= radius; ++k) w[k + radius] = raw_bump(k * dx / mu);
  const Real total = w.sum();
  if (total <= 0) return v;
  w /= total;
  Array out = v;
  for (long line = 0; line < lines; ++line) {
    const long base = line * line_stride;
    for (long i = 0; i < n; ++i) {
      Real acc = 0;
      for (long k = -radius; k <= radius; ++k) {
        const long j = std::clamp<long>(i + k, 0, n - 1);
        acc += w[k + radius] * v[base + j * stride];
      }
      out[base + i * stride] = acc;
    }
  }
  return out;
}

Array smooth_datum_values(const GridFunction& u0, Real mu) {
  const GridSpec& g = u0.grid;
  const long n = g.cells_per_axis;
  Array v = smooth_axis(u0.values, n, 1, g.dimension == 1 ? 1 : n, n, mu, g.dx());
  if (g.dimension == 2) v = smooth_axis(v, n, n, n, 1, mu, g.dx());
  return v.min(1.0).max(0.0);
}

Real second_difference_l1(const Array& v, Real dx) {
  Real acc = 0;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i)
    acc += std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]);
  return acc / dx;
}

InitialDatum datum_from_values(const GridSpec& grid, Array values, Real support_radius) {
  auto stored = std::make_shared<Array>(std::move(values));
  auto spec = std::make_shared<GridSpec>(grid);
  InitialDatum d;
  d.sample = [stored, spec](const Point& x) {
    const Real dx = spec->dx();
    auto clampi = [&](Real c) {
      return std::clamp<long>(static_cast<long>(std::floor((c + spec->half_width) / dx)), 0,
                              spec->cells_per_axis - 1);
    };
    const long ix = clampi(x.x());
    const long idx = spec->dimension == 1 ? ix : ix + spec->cells_per_axis * clampi(x.y());
    return (*stored)[idx];
  };
  d.support_radius = support_radius;
  d.bind_grid(grid);
  return d;
}

}  // namespace

MollifiedFamily mollify_model(const ModelSpec& model, Real mu, const GridSpec& grid,
                              const std::vector<Real>& ladder) {
  if (!(mu > 0.0) || mu > 0.25)
    throw std::invalid_argument("mollify_model: mu must lie in (0, 0.25]");
  if (!model.hypothesis_report.all_required_pass())
    throw InvalidModel("mollify_model: model failed its required hypotheses");
  if (std::isfinite(model.initial.support_radius) &&
      model.initial.support_radius + mu > grid.half_width)
    throw std::invalid_argument(
        "mollify_model: cutoff radius (box half-width) smaller than datum support");

  MollifierKernel kernel(mu);
  MollifiedFamily fam;
  fam.mu = mu;

  // Flux.
  if (model.flux.is_zero()) {
    fam.f_mu = model.flux;
  } else {
    std::vector<Fn1> comps, ders;
    for (int ax = 0; ax < model.flux.dimension; ++ax) {
      Fn1 f = model.flux.component[ax];
      Fn1 df = [&m = model.flux, ax](Real u) { return m.deriv(ax, u); };
      auto curve = std::make_shared<SmoothedCurve>(
          smooth_on_unit(kernel, f, df, model.flux.deriv(ax, 0.0), model.flux.deriv(ax, 1.0),
                         /*shift_to_zero=*/true));
      comps.push_back([curve](Real u) { return curve->table(u); });
      ders.push_back([curve](Real u) { return curve->table.derivative(u); });
    }
    fam.f_mu = make_flux(model.flux.dimension, model.flux.lipschitz, std::move(comps),
                         std::move(ders));
  }

  // Diffusion: A_mu from the smoothed primitive, a_mu from the smoothed
  // diffusivity; the Taylor extension keeps the pair consistent.
  if (model.diffusion.is_zero) {
    fam.A_mu = model.diffusion;
  } else {
    auto curve = std::make_shared<SmoothedCurve>(
        smooth_on_unit(kernel, model.diffusion.A, model.diffusion.a, model.diffusion.a(0.0),
                       model.diffusion.a(1.0), /*shift_to_zero=*/false));
    fam.A_mu.A = [curve](Real u) { return curve->table(u); };
    fam.A_mu.a = [curve](Real u) { return curve->table.derivative(u); };
    fam.A_mu.lipschitz = model.diffusion.lipschitz;
  }
  {
    Real amax = 0;
    for (int i = 0; i <= 1024; ++i)
      amax = std::max(amax, model.diffusion.is_zero ? 0.0 : fam.A_mu.a(i / 1024.0));
    fam.a_mu_lipschitz = amax;
  }

  // Source: smooth the indicator edges.
  fam.g_mu = model.source;
  if (model.source.structure == SourceStructure::indicator_ramp && model.source.ramp) {
    const RampSource ramp = *model.source.ramp;
    auto kern = std::make_shared<MollifierKernel>(kernel);
    Fn1 chi = [kern, ramp](Real x) {
      return kern->smooth_step(x - ramp.lo) * kern->smooth_step(ramp.hi - x);
    };
    fam.g_mu.chi_profile = chi;
    auto h = ramp.h;
    fam.g_mu.eval = [chi, h](Real t, const Point& x, Real u) { return chi(x.x()) * h(t, u); };
  }

  // Datum.
  const GridFunction u0 = model.initial.realize(grid);
  fam.u0_mu = datum_from_values(grid, smooth_datum_values(u0, mu),
                                std::isfinite(model.initial.support_radius)
                                    ? model.initial.support_radius + mu
                                    : model.initial.support_radius);

  // kappa0 frozen over the ladder (including the requested mu).
  std::vector<Real> widths = ladder;
  widths.push_back(mu);
  Real kappa0 = 0;
  for (Real w : widths) {
    if (!(w > 0.0)) continue;
    const Array smoothed = smooth_datum_values(u0, w);
    kappa0 = std::max(kappa0, w * second_difference_l1(smoothed, grid.dx()));
  }
  fam.kappa0 = kappa0;
  return fam;
}

bool FamilyConvergenceReport::all_conditions_pass() const {
  if (rows.empty()) return false;
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

FamilyConvergenceReport verify_family(const ModelSpec& model, const std::vector<Real>& ladder,
                                      const GridSpec& grid) {
  if (ladder.size() < 3 || !is_strictly_decreasing(ladder))
    throw std::invalid_argument("verify_family: need >= 3 strictly decreasing mu values");

  FamilyConvergenceReport report;
  const GridFunction u0 = model.initial.realize(grid);
  const Real u0_l1 = u0.l1(), u0_l2 = u0.l2(), u0_tv = u0.tv(0);

  // Reference curvature |D(A(u0)')| on the grid (second differences of A(u0)).
  Real curv_ref = 0;
  if (!model.diffusion.is_zero) {
    Array Au0 = Array::Zero(u0.values.size());
    for (Eigen::Index i = 0; i < u0.values.size(); ++i) Au0[i] = model.diffusion.A(u0.values[i]);
    curv_ref = second_difference_l1(Au0, grid.dx());
  }

  const int nu = 513;
  for (Real mu : ladder) {
    MollifiedFamily fam = mollify_model(model, mu, grid, ladder);
    FamilyConditionRow row;
    row.mu = mu;

    Real sup_f = 0, sup_A = 0, max_fmu_slope = 0;
    for (int i = 0; i < nu; ++i) {
      const Real u = static_cast<Real>(i) / (nu - 1);
      for (int ax = 0; ax < model.flux.dimension && !model.flux.is_zero(); ++ax) {
        sup_f = std::max(sup_f, std::abs(fam.f_mu.eval(ax, u) - model.flux.eval(ax, u)));
        max_fmu_slope = std::max(max_fmu_slope, std::abs(fam.f_mu.deriv(ax, u)));
      }
      if (!model.diffusion.is_zero)
        sup_A = std::max(sup_A, std::abs(fam.A_mu.A(u) - model.diffusion.A(u)));
    }
    row.sup_f_err = sup_f;
    row.sup_A_err = sup_A;
    row.lip_margin = model.flux.lipschitz - max_fmu_slope;

    // Space-time L1 distance of the sources, sup over u.
    Real g_err = 0, sign_margin = kInf;
    if (!model.source.is_zero()) {
      const int nt = 4;
      for (int it = 0; it <= nt; ++it) {
        const Real t = model.horizon * it / nt;
        for (int iu = 0; iu <= 8; ++iu) {
          const Real u = iu / 8.0;
          Real l1 = 0;
          for (long c = 0; c < grid.total_cells(); ++c) {
            const Point x = grid.cell_center(c);
            l1 += std::abs(fam.g_mu(t, x, u) - model.source(t, x, u));
          }
          g_err = std::max(g_err, l1 * grid.cell_volume() * model.horizon);
        }
        for (long c = 0; c < grid.total_cells(); ++c) {
          const Point x = grid.cell_center(c);
          sign_margin = std::min(sign_margin, fam.g_mu(t, x, 0.0));
          sign_margin = std::min(sign_margin, -fam.g_mu(t, x, 1.0));
        }
      }
    }
    row.g_l1_err = g_err;
    row.sign_margin = model.source.is_zero() ? 0.0 : sign_margin;

    const GridFunction u0m = fam.u0_mu.realize(grid);
    row.u0_l1_err = l1_distance(u0m, u0);
    row.u0_l2_err = std::sqrt(sum_sq(u0m.values - u0.values) * grid.cell_volume());
    row.range_margin = std::min(u0m.values.minCoeff(), 1.0 - u0m.values.maxCoeff());
    row.mass_margin = u0_l1 - u0m.l1();
    row.l2_margin = u0_l2 - u0m.l2();
    row.tv_margin = u0_tv - u0m.tv(0);
    row.kappa0_margin = fam.kappa0 - mu * second_difference_l1(u0m.values, grid.dx());

    if (model.diffusion.is_zero) {
      row.curv_margin = 0.0;
    } else {
      Array Amu = Array::Zero(u0m.values.size());
      for (Eigen::Index i = 0; i < u0m.values.size(); ++i) Amu[i] = fam.A_mu.A(u0m.values[i]);
      row.curv_margin = curv_ref - second_difference_l1(Amu, grid.dx());
    }

    const Real tol = 1e-10;
    row.pass = row.lip_margin >= -tol && row.range_margin >= -tol && row.mass_margin >= -tol &&
               row.l2_margin >= -tol && row.tv_margin >= -tol && row.curv_margin >= -tol &&
               row.kappa0_margin >= -tol && row.sign_margin >= -tol;
    report.rows.push_back(row);
  }

  auto monotone = [](auto getter, const std::vector<FamilyConditionRow>& rows) {
    for (size_t i = 1; i < rows.size(); ++i)
      if (getter(rows[i]) > getter(rows[i - 1]) + 1e-14) return false;
    return true;
  };
  report.f_errors_monotone =
      monotone([](const FamilyConditionRow& r) { return r.sup_f_err; }, report.rows);
  report.A_errors_monotone =
      monotone([](const FamilyConditionRow& r) { return r.sup_A_err; }, report.rows);
  report.g_errors_monotone =
      monotone([](const FamilyConditionRow& r) { return r.g_l1_err; }, report.rows);
  for (size_t i = 1; i < report.rows.size(); ++i) {
    const Real denom = report.rows[i].sup_f_err;
    report.f_error_ratios.push_back(denom > 0 ? report.rows[i - 1].sup_f_err / denom : 0.0);
  }
  return report;
}

}  // namespace visclim
