#include "visclim/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace visclim {

namespace {

constexpr Real kZeroTol = 1e-12;
constexpr Real kSlackTol = 1e-9;        // sampling slack on declared Lipschitz constants
constexpr Real kAffineTol = 1e-10;      // second-difference threshold for nonlinearity
constexpr int kDyadicDepth = 4;

std::string g_custom_table_path;

/// Peak-normalized C-infinity bump, supported on (-1,1).
Real bump_profile(Real s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

Real finite_or_throw(Real v, const std::string& what, Real arg) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "invalid model: " << what << " returns non-finite value at input " << arg;
    throw InvalidModel(os.str());
  }
  return v;
}

}  // namespace

Real FluxSpec::deriv(int axis, Real u) const {
  if (!derivative.empty() && derivative[axis]) return derivative[axis](u);
  return central_difference(component[axis], u, 1e-6, 0.0, 1.0);
}

FluxSpec make_flux(int dimension, Real lipschitz, std::vector<Fn1> component,
                   std::vector<Fn1> derivative) {
  FluxSpec f;
  f.dimension = dimension;
  f.lipschitz = lipschitz;
  f.component = std::move(component);
  f.derivative = std::move(derivative);
  if (!f.component.empty() && static_cast<int>(f.component.size()) != dimension)
    throw InvalidModel("make_flux: component count must match dimension");
  for (size_t i = 0; i < f.component.size(); ++i) {
    const Real at0 = finite_or_throw(f.component[i](0.0), "flux component", 0.0);
    if (std::abs(at0) > kZeroTol) {
      std::ostringstream os;
      os << "make_flux: f(0) = " << at0 << " in component " << i << " exceeds 1e-12";
      throw InvalidModel(os.str());
    }
  }
  return f;
}

void InitialDatum::bind_grid(const GridSpec& grid) {
  norm_grid = grid;
  const GridFunction u0 = realize(grid);
  l1_norm = u0.l1();
  l2_norm = u0.l2();
  tv.assign(grid.dimension, 0.0);
  for (int ax = 0; ax < grid.dimension; ++ax) tv[ax] = u0.tv(ax);
}

GridFunction InitialDatum::realize(const GridSpec& grid) const {
  return GridFunction::sample(grid, sample, 0.0);
}

bool HypothesisReport::all_required_pass() const {
  for (const auto& r : records)
    if (r.id != "genuine_nonlinearity" && !r.pass) return false;
  return !records.empty();
}

bool HypothesisReport::genuinely_nonlinear() const {
  const auto* r = find("genuine_nonlinearity");
  return r && r->pass;
}

const HypothesisRecord* HypothesisReport::find(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

namespace {

HypothesisRecord check_flux(const ModelSpec& m, int samples) {
  HypothesisRecord rec{"flux_lipschitz", true, true, ""};
  const auto& f = m.flux;
  if (f.is_zero()) {
    rec.detail = "f = 0";
    return rec;
  }
  Real max_quot = 0;
  for (int ax = 0; ax < f.dimension; ++ax) {
    Real prev_u = 0.0, prev_f = finite_or_throw(f.eval(ax, 0.0), "flux component", 0.0);
    if (std::abs(prev_f) > kZeroTol) {
      rec.pass = false;
      rec.detail = "f(0) != 0";
      return rec;
    }
    for (int i = 1; i < samples; ++i) {
      const Real u = static_cast<Real>(i) / (samples - 1);
      const Real fv = finite_or_throw(f.eval(ax, u), "flux component", u);
      max_quot = std::max(max_quot, std::abs(fv - prev_f) / (u - prev_u));
      prev_u = u;
      prev_f = fv;
    }
  }
  std::ostringstream os;
  os << "max sampled |df/du| = " << max_quot << " vs declared " << f.lipschitz;
  rec.detail = os.str();
  if (max_quot > f.lipschitz + kSlackTol) rec.pass = false;
  return rec;
}

HypothesisRecord check_diffusion(const ModelSpec& m, int samples) {
  HypothesisRecord rec{"diffusion_monotone", true, true, ""};
  const auto& d = m.diffusion;
  if (d.is_zero) {
    rec.detail = "A = 0";
    return rec;
  }
  Real min_a = kInf, prev_A = finite_or_throw(d.A(0.0), "diffusion A", 0.0);
  for (int i = 0; i < samples; ++i) {
    const Real u = static_cast<Real>(i) / (samples - 1);
    const Real av = finite_or_throw(d.a(u), "diffusivity a", u);
    min_a = std::min(min_a, av);
    if (i > 0) {
      const Real Av = finite_or_throw(d.A(u), "diffusion A", u);
      if (Av < prev_A - kZeroTol) {
        std::ostringstream os;
        os << "A decreasing near u = " << u;
        rec.pass = false;
        rec.detail = os.str();
        return rec;
      }
      prev_A = Av;
    }
  }
  if (min_a < -kZeroTol) {
    std::ostringstream os;
    os << "a(u) attains " << min_a;
    rec.pass = false;
    rec.detail = os.str();
    return rec;
  }
  // A(u) - A(0) must agree with the quadrature of a.
  Real worst = 0;
  for (Real u : {0.25, 0.5, 0.75, 1.0}) {
    const Real byA = d.A(u) - d.A(0.0);
    const Real byQuad = adaptive_simpson(d.a, 0.0, u, 1e-11);
    worst = std::max(worst, std::abs(byA - byQuad));
  }
  std::ostringstream os;
  os << "min a = " << min_a << ", |A - int a| <= " << worst;
  rec.detail = os.str();
  if (worst > 1e-6) rec.pass = false;
  return rec;
}

HypothesisRecord check_source(const ModelSpec& m, int samples) {
  HypothesisRecord rec{"source_bounds", true, true, ""};
  const auto& g = m.source;
  if (g.is_zero()) {
    rec.detail = "g = 0";
    return rec;
  }
  const GridSpec& grid = m.initial.norm_grid;
  const Real T = m.horizon;
  const int nt = 5;
  Real max_gu = 0, max_int_g = 0, max_int_gt = 0, worst_sign = 0;
  const Real du = 1e-6, dt = std::max(1e-6, 1e-6 * T);
  for (int it = 0; it <= nt; ++it) {
    const Real t = T * it / nt;
    for (int iu = 0; iu < 9; ++iu) {
      const Real u = iu / 8.0;
      Real int_g = 0, int_gt = 0;
      for (long c = 0; c < grid.total_cells(); ++c) {
        const Point x = grid.cell_center(c);
        const Real gv = finite_or_throw(g(t, x, u), "source g", u);
        int_g += std::abs(gv);
        const Real tp = std::min(T, t + dt), tm = std::max(0.0, t - dt);
        int_gt += std::abs(g(tp, x, u) - g(tm, x, u)) / (tp - tm);
        const Real up = std::min(1.0, u + du), um = std::max(0.0, u - du);
        max_gu = std::max(max_gu, std::abs(g(t, x, up) - g(t, x, um)) / (up - um));
        if (iu == 0) worst_sign = std::min(worst_sign, gv);        // need g(.,.,0) >= 0
        if (iu == 8) worst_sign = std::min(worst_sign, -gv);       // need g(.,.,1) <= 0
      }
      max_int_g = std::max(max_int_g, int_g * grid.cell_volume());
      max_int_gt = std::max(max_int_gt, int_gt * grid.cell_volume());
    }
  }
  // x-variation: computable for ramps only.
  Real tv_bound = 0;
  bool tv_verified = false;
  if (g.structure == SourceStructure::indicator_ramp && g.ramp) {
    tv_verified = true;
    for (int it = 0; it <= nt; ++it)
      for (int iu = 0; iu < 9; ++iu)
        tv_bound = std::max(tv_bound, 2.0 * std::abs(g.ramp->h(T * it / nt, iu / 8.0)));
  }
  std::ostringstream os;
  os << "sign margin " << worst_sign << "; |g_u| <= " << max_gu << "; int|g| <= " << max_int_g
     << "; int|g_t| <= " << max_int_gt;
  if (tv_verified)
    os << "; x-TV <= " << tv_bound;
  else {
    os << "; x-TV declared, not verified";
    rec.verified = false;
  }
  os << "; kappa = " << g.kappa;
  rec.detail = os.str();
  const Real tol = kSlackTol * std::max<Real>(1.0, g.kappa);
  if (worst_sign < -kZeroTol || max_gu > g.kappa + tol || max_int_g > g.kappa + tol ||
      max_int_gt > g.kappa + tol || (tv_verified && tv_bound > g.kappa + tol))
    rec.pass = false;
  (void)samples;
  return rec;
}

HypothesisRecord check_datum(const ModelSpec& m) {
  HypothesisRecord rec{"datum_range", true, true, ""};
  const GridFunction u0 = m.initial.realize(m.initial.norm_grid);
  const Real lo = u0.values.minCoeff(), hi = u0.values.maxCoeff();
  if (lo < -kZeroTol || hi > 1.0 + kZeroTol) {
    std::ostringstream os;
    os << "datum range [" << lo << ", " << hi << "] leaves [0,1]";
    rec.pass = false;
    rec.detail = os.str();
    return rec;
  }
  const Real dl1 = std::abs(u0.l1() - m.initial.l1_norm);
  const Real dl2 = std::abs(u0.l2() - m.initial.l2_norm);
  std::ostringstream os;
  os << "range [" << lo << ", " << hi << "], L1 = " << m.initial.l1_norm
     << ", TV = " << (m.initial.tv.empty() ? 0.0 : m.initial.tv[0]);
  rec.detail = os.str();
  if (dl1 > kZeroTol * (1 + m.initial.l1_norm) || dl2 > kZeroTol * (1 + m.initial.l2_norm))
    rec.pass = false;
  return rec;
}

std::vector<Point> direction_sample(int dimension) {
  if (dimension == 1) return {Point(1, 0), Point(-1, 0)};
  const Real s = 1.0 / std::sqrt(2.0);
  return {Point(1, 0), Point(-1, 0), Point(0, 1),  Point(0, -1),
          Point(s, s), Point(-s, -s), Point(s, -s), Point(-s, s)};
}

HypothesisRecord check_nonlinearity(const ModelSpec& m) {
  HypothesisRecord rec{"genuine_nonlinearity", true, true, ""};
  const auto& f = m.flux;
  auto along = [&](const Point& xi, Real u) {
    Real acc = 0;
    for (int ax = 0; ax < f.dimension && !f.is_zero(); ++ax) acc += xi[ax] * f.eval(ax, u);
    return acc;
  };
  // Coarse-to-fine dyadic scan; the first affine subinterval is the witness.
  for (const Point& xi : direction_sample(f.dimension)) {
    for (int depth = 0; depth <= kDyadicDepth; ++depth) {
      const int pieces = 1 << depth;
      for (int p = 0; p < pieces; ++p) {
        const Real a = static_cast<Real>(p) / pieces;
        const Real b = static_cast<Real>(p + 1) / pieces;
        const Real mid = 0.5 * (a + b);
        const Real second = along(xi, a) - 2.0 * along(xi, mid) + along(xi, b);
        if (std::abs(second) <= kAffineTol) {
          std::ostringstream os;
          os << "affine on [" << a << ", " << b << "] along direction (" << xi.x() << ", "
             << xi.y() << "); |second difference| = " << std::abs(second);
          rec.pass = false;
          rec.detail = os.str();
          return rec;
        }
      }
    }
  }
  rec.detail = "second differences exceed tolerance on all dyadic subintervals";
  return rec;
}

}  // namespace

HypothesisReport validate_hypotheses(const ModelSpec& model, int samples) {
  if (samples < 3) throw std::invalid_argument("validate_hypotheses: samples >= 3 required");
  HypothesisReport report;
  report.records.push_back(check_flux(model, samples));
  report.records.push_back(check_diffusion(model, samples));
  report.records.push_back(check_source(model, samples));
  report.records.push_back(check_datum(model));
  report.records.push_back(check_nonlinearity(model));
  return report;
}

// ---------------------------------------------------------------------------
// Scenario library.

const std::vector<std::string> kBuiltinScenarios = {
    "greenshields_lwr", "burgers", "heat", "porous_medium",
    "lwr_entry",        "lwr_exit", "custom_table"};

void set_custom_table_path(const std::string& path) { g_custom_table_path = path; }

FluxSpec tabulated_flux(const std::vector<Real>& u, const std::vector<Real>& f) {
  if (u.size() != f.size() || u.size() < 2)
    throw InvalidModel("tabulated_flux: need matching breakpoint vectors of size >= 2");
  if (std::abs(u.front()) > kZeroTol || std::abs(u.back() - 1.0) > kZeroTol)
    throw InvalidModel("tabulated_flux: u must run from 0 to 1");
  for (size_t i = 1; i < u.size(); ++i)
    if (!(u[i] > u[i - 1])) throw InvalidModel("tabulated_flux: u must be strictly increasing");
  if (std::abs(f.front()) > kZeroTol) throw InvalidModel("tabulated_flux: f(0) must be 0");
  Real lip = 0;
  for (size_t i = 1; i < u.size(); ++i)
    lip = std::max(lip, std::abs(f[i] - f[i - 1]) / (u[i] - u[i - 1]));
  auto us = std::make_shared<std::vector<Real>>(u);
  auto fs = std::make_shared<std::vector<Real>>(f);
  auto locate = [us](Real x) {
    auto it = std::upper_bound(us->begin(), us->end(), x);
    size_t i = it == us->begin() ? 0 : (it - us->begin() - 1);
    return std::min(i, us->size() - 2);
  };
  Fn1 eval = [us, fs, locate](Real x) {
    x = std::clamp(x, 0.0, 1.0);
    const size_t i = locate(x);
    const Real t = (x - (*us)[i]) / ((*us)[i + 1] - (*us)[i]);
    return (*fs)[i] + t * ((*fs)[i + 1] - (*fs)[i]);
  };
  Fn1 deriv = [us, fs, locate](Real x) {
    x = std::clamp(x, 0.0, 1.0);
    const size_t i = locate(x);
    return ((*fs)[i + 1] - (*fs)[i]) / ((*us)[i + 1] - (*us)[i]);
  };
  return make_flux(1, lip, {eval}, {deriv});
}

namespace {

FluxSpec read_table_flux() {
  if (g_custom_table_path.empty()) {
    // Embedded sample: chords of u(1-u) at 11 breakpoints.
    std::vector<Real> u, f;
    for (int i = 0; i <= 10; ++i) {
      const Real ui = i / 10.0;
      u.push_back(ui);
      f.push_back(ui * (1.0 - ui));
    }
    return tabulated_flux(u, f);
  }
  std::ifstream in(g_custom_table_path);
  if (!in) throw InvalidModel("custom_table: cannot open " + g_custom_table_path);
  std::vector<Real> u, f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Real uu, ff;
    if (!(ls >> uu >> ff)) throw InvalidModel("custom_table: malformed line: " + line);
    u.push_back(uu);
    f.push_back(ff);
  }
  return tabulated_flux(u, f);
}

struct ParamReader {
  const Params& params;
  mutable std::map<std::string, bool> seen;

  Real get(const std::string& key, Real fallback) const {
    auto it = params.find(key);
    seen[key] = true;
    return it == params.end() ? fallback : it->second;
  }
  void finish(const std::string& scenario) const {
    for (const auto& [k, v] : params) {
      (void)v;
      if (!seen.count(k))
        throw InvalidModel("builtin_model(" + scenario + "): unknown parameter '" + k + "'");
    }
  }
};

void require_range(const std::string& what, Real v, Real lo, Real hi) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " = " << v << " outside documented range [" << lo << ", " << hi << "]";
    throw InvalidModel(os.str());
  }
}

InitialDatum make_datum(const ParamReader& p, const GridSpec& grid, int default_kind) {
  // kinds: 0 box, 1 riemann, 2 bump, 3 constant, 4 zero
  const int kind = static_cast<int>(p.get("u0_kind", default_kind));
  InitialDatum d;
  const int dim = grid.dimension;
  switch (kind) {
    case 0: {
      const Real c = p.get("u0_center", 0.0), w = p.get("u0_halfwidth", 0.5),
                 h = p.get("u0_height", 0.8);
      require_range("u0_height", h, 0.0, 1.0);
      require_range("u0_halfwidth", w, 0.0, grid.half_width);
      d.sample = [c, w, h, dim](const Point& x) {
        bool in = std::abs(x.x() - c) <= w;
        if (dim == 2) in = in && std::abs(x.y() - c) <= w;
        return in ? h : 0.0;
      };
      d.support_radius = std::abs(c) + w;
      break;
    }
    case 1: {
      const Real ul = p.get("u0_left", 1.0), ur = p.get("u0_right", 0.0),
                 xj = p.get("u0_jump", 0.0);
      require_range("u0_left", ul, 0.0, 1.0);
      require_range("u0_right", ur, 0.0, 1.0);
      d.sample = [ul, ur, xj](const Point& x) { return x.x() < xj ? ul : ur; };
      d.support_radius = kInf;
      break;
    }
    case 2: {
      const Real c = p.get("u0_center", 0.0), w = p.get("u0_width", 0.8),
                 h = p.get("u0_height", 0.8);
      require_range("u0_height", h, 0.0, 1.0);
      d.sample = [c, w, h, dim](const Point& x) {
        Real v = h * bump_profile((x.x() - c) / w);
        if (dim == 2) v *= bump_profile((x.y() - c) / w);
        return v;
      };
      d.support_radius = std::abs(c) + w;
      break;
    }
    case 3: {
      const Real v = p.get("u0_value", 0.8);
      require_range("u0_value", v, 0.0, 1.0);
      d.sample = [v](const Point&) { return v; };
      d.support_radius = kInf;
      break;
    }
    case 4:
      d.sample = [](const Point&) { return 0.0; };
      d.support_radius = 0.0;
      break;
    default:
      throw InvalidModel("u0_kind outside documented range [0, 4]");
  }
  d.bind_grid(grid);
  return d;
}

FluxSpec directional_flux(const ParamReader& p, const GridSpec& grid, Fn1 f, Fn1 df, Real lip) {
  if (grid.dimension == 1) return make_flux(1, lip, {f}, {df});
  const Real ratio = p.get("flux_ratio", 0.5);
  require_range("flux_ratio", std::abs(ratio), 0.0, 1.0);
  Fn1 f2 = [f, ratio](Real u) { return ratio * f(u); };
  Fn1 df2 = [df, ratio](Real u) { return ratio * df(u); };
  return make_flux(2, lip * std::sqrt(1.0 + ratio * ratio), {f, f2}, {df, df2});
}

SourceSpec make_ramp_source(const ParamReader& p, const GridSpec& grid, bool entry) {
  if (grid.dimension != 1)
    throw InvalidModel("ramp sources are defined for 1D scenarios only");
  const Real rate = p.get("source_rate", 1.0);
  const Real lo = p.get("ramp_lo", 0.0), hi = p.get("ramp_hi", 0.5);
  require_range("source_rate", rate, 0.0, 100.0);
  if (!(hi > lo)) throw InvalidModel("ramp_hi must exceed ramp_lo");
  RampSource ramp;
  ramp.lo = lo;
  ramp.hi = hi;
  if (entry)
    ramp.h = [rate](Real, Real u) { return rate * (1.0 - u); };
  else
    ramp.h = [rate](Real, Real u) { return -rate * u; };
  ramp.sup_h = rate;
  SourceSpec s;
  s.structure = SourceStructure::indicator_ramp;
  s.ramp = ramp;
  s.kappa = rate * std::max({1.0, hi - lo, 2.0});
  s.chi_profile = [lo, hi](Real x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; };
  auto h = ramp.h;
  auto chi = s.chi_profile;
  s.eval = [chi, h](Real t, const Point& x, Real u) { return chi(x.x()) * h(t, u); };
  return s;
}

}  // namespace

ModelSpec builtin_model(const std::string& name, const Params& params, const GridSpec& grid) {
  grid.validate();
  ParamReader p{params, {}};
  ModelSpec m;
  m.name = name;

  auto greenshields_flux = [&] {
    return directional_flux(
        p, grid, [](Real u) { return u * (1.0 - u); }, [](Real u) { return 1.0 - 2.0 * u; }, 1.0);
  };
  auto quadratic_diffusion = [] {
    DiffusionSpec d;
    d.A = [](Real u) { return 0.5 * u * u; };
    d.a = [](Real u) { return u; };
    d.lipschitz = 1.0;
    return d;
  };

  if (name == "greenshields_lwr") {
    m.flux = greenshields_flux();
    m.diffusion = quadratic_diffusion();
    m.initial = make_datum(p, grid, 0);
  } else if (name == "burgers") {
    m.flux = directional_flux(
        p, grid, [](Real u) { return 0.5 * u * u; }, [](Real u) { return u; }, 1.0);
    DiffusionSpec d;
    d.A = [](Real u) { return u; };
    d.a = [](Real) { return 1.0; };
    d.lipschitz = 1.0;
    m.diffusion = d;
    m.initial = make_datum(p, grid, 0);
  } else if (name == "heat") {
    m.flux.dimension = grid.dimension;
    DiffusionSpec d;
    d.A = [](Real u) { return u; };
    d.a = [](Real) { return 1.0; };
    d.lipschitz = 1.0;
    m.diffusion = d;
    m.initial = make_datum(p, grid, 2);
  } else if (name == "porous_medium") {
    m.flux.dimension = grid.dimension;
    DiffusionSpec d;
    d.A = [](Real u) { return u * u; };
    d.a = [](Real u) { return 2.0 * u; };
    d.lipschitz = 2.0;
    m.diffusion = d;
    m.initial = make_datum(p, grid, 0);
  } else if (name == "lwr_entry" || name == "lwr_exit") {
    m.flux = greenshields_flux();
    m.diffusion = quadratic_diffusion();
    m.source = make_ramp_source(p, grid, name == "lwr_entry");
    m.initial = make_datum(p, grid, name == "lwr_entry" ? 4 : 3);
  } else if (name == "custom_table") {
    if (grid.dimension != 1) throw InvalidModel("custom_table is a 1D scenario");
    m.flux = read_table_flux();
    m.diffusion = quadratic_diffusion();
    m.initial = make_datum(p, grid, 0);
  } else {
    throw InvalidModel("unknown scenario '" + name + "'");
  }

  p.finish(name);
  m.hypothesis_report = validate_hypotheses(m);
  return m;
}

}  // namespace visclim
