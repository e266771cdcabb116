#include "wlab/catalog.hpp"

#include <sstream>

#include "wlab/moebius.hpp"
#include "wlab/quadrature.hpp"

namespace wlab {

namespace {

// ---------------------------------------------------------------------------
// Real spherical harmonics as Cartesian harmonic polynomials (orthonormal on
// the unit sphere). Restricted to |n| = 1 they agree with the usual Y_lm, and
// chain-rule derivatives through the polynomial are exact.
// ---------------------------------------------------------------------------
struct Poly {
  struct Term {
    double c;
    int i, j, k;
  };
  std::vector<Term> terms;

  template <class T>
  T eval(const T& x, const T& y, const T& z) const {
    auto powi = [](const T& b, int e) {
      T r(1.0);
      for (int q = 0; q < e; ++q) r = r * b;
      return r;
    };
    T s(0.0);
    for (const auto& t : terms) s = s + t.c * (powi(x, t.i) * powi(y, t.j) * powi(z, t.k));
    return s;
  }
};

Poly harmonic_poly(int l, int m) {
  const double q = 1.0 / std::sqrt(pi);
  auto P = [](std::initializer_list<Poly::Term> ts) { return Poly{ts}; };
  switch (l) {
    case 0:
      if (m == 0) return P({{0.5 * q, 0, 0, 0}});
      break;
    case 1: {
      const double c = std::sqrt(3.0) / 2 * q;
      if (m == -1) return P({{c, 0, 1, 0}});
      if (m == 0) return P({{c, 0, 0, 1}});
      if (m == 1) return P({{c, 1, 0, 0}});
      break;
    }
    case 2: {
      const double c15 = 0.5 * std::sqrt(15.0) * q;
      const double c5 = 0.25 * std::sqrt(5.0) * q;
      if (m == -2) return P({{c15, 1, 1, 0}});
      if (m == -1) return P({{c15, 0, 1, 1}});
      if (m == 0) return P({{2 * c5, 0, 0, 2}, {-c5, 2, 0, 0}, {-c5, 0, 2, 0}});
      if (m == 1) return P({{c15, 1, 0, 1}});
      if (m == 2) return P({{0.5 * c15, 2, 0, 0}, {-0.5 * c15, 0, 2, 0}});
      break;
    }
    case 3: {
      const double c35 = 0.25 * std::sqrt(35.0 / 2.0) * q;
      const double c105 = 0.5 * std::sqrt(105.0) * q;
      const double c21 = 0.25 * std::sqrt(21.0 / 2.0) * q;
      const double c7 = 0.25 * std::sqrt(7.0) * q;
      if (m == -3) return P({{3 * c35, 2, 1, 0}, {-c35, 0, 3, 0}});
      if (m == -2) return P({{c105, 1, 1, 1}});
      if (m == -1) return P({{4 * c21, 0, 1, 2}, {-c21, 2, 1, 0}, {-c21, 0, 3, 0}});
      if (m == 0) return P({{2 * c7, 0, 0, 3}, {-3 * c7, 2, 0, 1}, {-3 * c7, 0, 2, 1}});
      if (m == 1) return P({{4 * c21, 1, 0, 2}, {-c21, 3, 0, 0}, {-c21, 1, 2, 0}});
      if (m == 2) return P({{0.5 * c105, 2, 0, 1}, {-0.5 * c105, 0, 2, 1}});
      if (m == 3) return P({{c35, 3, 0, 0}, {-3 * c35, 1, 2, 0}});
      break;
    }
  }
  throw config_error("spherical harmonic (l,m) out of the supported range: l <= 3, |m| <= l");
}

// ---------------------------------------------------------------------------
// Jet maps
// ---------------------------------------------------------------------------

Jet2 pack(int n, const D2* comps) {
  Jet2 j;
  j.position = Vec(n);
  j.d1[0] = Vec(n);
  j.d1[1] = Vec(n);
  for (int k = 0; k < 3; ++k) j.d2[k] = Vec(n);
  for (int i = 0; i < n; ++i) set_jet_component(j, i, comps[i]);
  return j;
}

// Stereographic unit vector of the z-chart.
void stereographic_n(const D2& X, const D2& Y, D2* n) {
  const D2 s = X * X + Y * Y;
  const D2 den = recip(s + 1.0);
  n[0] = 2.0 * X * den;
  n[1] = 2.0 * Y * den;
  n[2] = (s - 1.0) * den;
}

struct SphereMap final : JetMap {
  double r;
  explicit SphereMap(double radius) : r(radius) {}
  int ambient_dim() const override { return 3; }
  Jet2 jet(const Vec2& p) const override {
    const D2 X = D2::var_x(p[0]), Y = D2::var_y(p[1]);
    D2 n[3];
    stereographic_n(X, Y, n);
    D2 f[3] = {r * n[0], r * n[1], r * n[2]};
    return pack(3, f);
  }
};

struct PerturbedSphereMap final : JetMap {
  double eps;
  Poly Y_lm;
  PerturbedSphereMap(double e, int l, int m) : eps(e), Y_lm(harmonic_poly(l, m)) {}
  int ambient_dim() const override { return 3; }
  Jet2 jet(const Vec2& p) const override {
    const D2 X = D2::var_x(p[0]), Y = D2::var_y(p[1]);
    D2 n[3];
    stereographic_n(X, Y, n);
    const D2 amp = 1.0 + eps * Y_lm.eval(n[0], n[1], n[2]);
    D2 f[3] = {amp * n[0], amp * n[1], amp * n[2]};
    return pack(3, f);
  }
};

struct CatenoidMap final : JetMap {
  int ambient_dim() const override { return 3; }
  Jet2 jet(const Vec2& p) const override {
    const D2 V = D2::var_x(p[0]), Th = D2::var_y(p[1]);
    const D2 ch = cosh(V);
    D2 f[3] = {ch * cos(Th), ch * sin(Th), V};
    return pack(3, f);
  }
};

struct PerturbedCatenoidMap final : JetMap {
  double eps;
  explicit PerturbedCatenoidMap(double e) : eps(e) {}
  int ambient_dim() const override { return 3; }
  Jet2 jet(const Vec2& p) const override {
    const D2 V = D2::var_x(p[0]), Th = D2::var_y(p[1]);
    const D2 ch = cosh(V), sh = sinh(V), c = cos(Th), s = sin(Th);
    const D2 inv_ch = recip(ch);
    const D2 amp = eps * inv_ch * cos(2.0 * Th);  // decays like e^{-|v|}: ends keep their structure
    D2 f[3] = {ch * c + amp * (c * inv_ch), ch * s + amp * (s * inv_ch),
               V + amp * (-sh * inv_ch)};
    return pack(3, f);
  }
};

struct EnneperMap final : JetMap {
  int ambient_dim() const override { return 3; }
  Jet2 jet(const Vec2& p) const override {
    const D2 X = D2::var_x(p[0]), Y = D2::var_y(p[1]);
    D2 f[3] = {X - X * X * X / 3.0 + X * Y * Y, -Y + Y * Y * Y / 3.0 - X * X * Y, X * X - Y * Y};
    return pack(3, f);
  }
};

struct ChenGraphMap final : JetMap {
  double c;
  explicit ChenGraphMap(double cc) : c(cc) {}
  int ambient_dim() const override { return 4; }
  Jet2 jet(const Vec2& p) const override {
    const D2 X = D2::var_x(p[0]), Y = D2::var_y(p[1]);
    D2 f[4] = {X, Y, c * (X * X - Y * Y), 2.0 * c * X * Y};
    return pack(4, f);
  }
};

struct CliffordMap final : JetMap {
  int ambient_dim() const override { return 4; }
  Jet2 jet(const Vec2& p) const override {
    const double s = 1.0 / std::sqrt(2.0);
    const D2 A = D2::var_x(p[0]), B = D2::var_y(p[1]);
    D2 f[4] = {s * cos(A), s * sin(A), s * cos(B), s * sin(B)};
    return pack(4, f);
  }
};

// ---------------------------------------------------------------------------

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string format_params(const std::map<std::string, double>& p) {
  std::ostringstream os;
  for (const auto& [k, v] : p) os << "," << k << "=" << v;
  return os.str();
}

Immersion base_surface(const std::string& id, const std::map<std::string, double>& params) {
  Immersion f;
  f.euler_char = 2;

  if (id == "sphere" || id == "perturbed_sphere") {
    const double r = get_param(params, "r", 1.0);
    if (!(r > 0)) throw config_error("sphere: radius must be positive");
    const double T = 15.0;  // log-radius half-width; polar caps ~ e^{-2T}
    f.domain = ParamDomain::punctured_plane(std::exp(-T), std::exp(T));
    if (id == "sphere") {
      f.map = std::make_shared<SphereMap>(r);
      f.params = {{"r", r}};
    } else {
      const double eps = get_param(params, "eps", 0.05);
      const int l = int(get_param(params, "l", 2));
      const int m = int(get_param(params, "m", 0));
      if (!(std::abs(eps) < 0.3)) throw config_error("perturbed_sphere: |eps| < 0.3 required");
      f.map = std::make_shared<PerturbedSphereMap>(eps, l, m);
      f.conformal_chart = false;
      f.params = {{"eps", eps}, {"l", double(l)}, {"m", double(m)}};
    }
    f.edge_decays = {{0, 0, 2.0, true}, {0, 1, 2.0, true}};
    f.caps = {{0, 0, f.map->jet(Vec2(0, 0)).position, 0}, {0, 1, Vec(3), 0}};
    // limit at z = infinity: the antipode of the chart origin
    Vec north(3);
    if (id == "sphere") {
      north << 0, 0, r;
    } else {
      const double eps = f.params["eps"];
      const double amp = 1 + eps * sph_harmonic(int(f.params["l"]), int(f.params["m"]), 0, 0, 1);
      north << 0, 0, amp;
    }
    f.caps[1].position = north;
    f.label = id + format_params(f.params);
    return f;
  }

  if (id == "catenoid" || id == "perturbed_catenoid") {
    const double V = get_param(params, "V", 20.0);
    if (!(V >= 5)) throw config_error("catenoid: truncation V >= 5 required");
    f.domain = ParamDomain::periodic_strip(Interval{-V, V}, 2 * pi);
    if (id == "catenoid") {
      f.map = std::make_shared<CatenoidMap>();
      f.params = {{"V", V}};
    } else {
      const double eps = get_param(params, "eps", 0.05);
      if (!(std::abs(eps) < 0.3)) throw config_error("perturbed_catenoid: |eps| < 0.3 required");
      f.map = std::make_shared<PerturbedCatenoidMap>(eps);
      f.conformal_chart = false;
      f.params = {{"V", V}, {"eps", eps}};
    }
    MarkedPoint lower, upper;
    lower.kind = upper.kind = MarkedPoint::Kind::end;
    lower.where = MarkedPoint::Where::axis0_minus_inf;
    upper.where = MarkedPoint::Where::axis0_plus_inf;
    lower.order = upper.order = 0;
    f.marked_points = {lower, upper};
    f.edge_decays = {{0, 0, 2.0, false}, {0, 1, 2.0, false}};
    f.label = id + format_params(f.params);
    return f;
  }

  if (id == "enneper") {
    const double R = get_param(params, "R", 1000.0);
    if (!(R >= 5)) throw config_error("enneper: truncation R >= 5 required");
    f.domain = ParamDomain::punctured_plane(std::exp(-14.0), R);
    f.map = std::make_shared<EnneperMap>();
    f.params = {{"R", R}};
    MarkedPoint end;
    end.kind = MarkedPoint::Kind::end;
    end.where = MarkedPoint::Where::plane_infinity;
    end.order = 2;  // multiplicity-three end
    f.marked_points = {end};
    f.edge_decays = {{0, 0, 2.0, true}, {0, 1, 2.0, false}};
    f.caps = {{0, 0, f.map->jet(Vec2(0, 0)).position, 0}};
    f.label = "enneper" + format_params(f.params);
    return f;
  }

  if (id == "chen_graph") {
    const double c = get_param(params, "c", 1.0);
    const double R = get_param(params, "R", 1000.0);
    if (!(std::abs(c) > 0)) throw config_error("chen_graph: |c| > 0 required");
    if (!(R >= 5)) throw config_error("chen_graph: truncation R >= 5 required");
    f.domain = ParamDomain::punctured_plane(std::exp(-14.0), R);
    f.map = std::make_shared<ChenGraphMap>(c);
    f.params = {{"c", c}, {"R", R}};
    MarkedPoint end;
    end.kind = MarkedPoint::Kind::end;
    end.where = MarkedPoint::Where::plane_infinity;
    end.order = 1;  // multiplicity-two end
    f.marked_points = {end};
    f.edge_decays = {{0, 0, 2.0, true}, {0, 1, 2.0, false}};
    f.caps = {{0, 0, f.map->jet(Vec2(0, 0)).position, 0}};
    f.label = "chen_graph" + format_params(f.params);
    return f;
  }

  if (id == "clifford_torus") {
    f.domain = ParamDomain::periodic_strip(Interval{0, 2 * pi}, 2 * pi);
    f.domain.periodic[0] = true;  // both axes periodic
    f.map = std::make_shared<CliffordMap>();
    f.euler_char = 0;
    f.label = "clifford_torus";
    return f;
  }

  throw config_error("unknown catalog identifier: " + id);
}

Vec default_center(const std::string& base_id, int ambient_dim) {
  Vec c(ambient_dim);
  if (base_id == "catenoid" || base_id == "perturbed_catenoid") {
    c << 0, 0, 0;  // axis point: distance 1 from the neck
  } else if (base_id == "enneper") {
    c << 0, 0, 1;
  } else if (base_id == "chen_graph") {
    c << 0, 0, 0, 1;
  } else if (base_id == "clifford_torus") {
    c << 0, 0, 0, 2;
  } else {
    c.setZero();
    c[2] = 3;  // spheres: exterior point
  }
  return c;
}

}  // namespace

double sph_harmonic(int l, int m, double x, double y, double z) {
  return harmonic_poly(l, m).eval<double>(x, y, z);
}

std::vector<std::string> catalog_ids() {
  return {"sphere",        "perturbed_sphere",  "catenoid",        "perturbed_catenoid",
          "enneper",       "chen_graph",        "clifford_torus",  "inverted_sphere",
          "inverted_catenoid", "inverted_enneper", "inverted_chen_graph",
          "inverted_perturbed_catenoid", "inverted_clifford_torus"};
}

Immersion make_catalog_surface(const CatalogSpec& spec) {
  const std::string& id = spec.surface;
  if (id.rfind("inverted_", 0) == 0) {
    const std::string base_id = id.substr(9);
    Immersion base = base_surface(base_id, spec.params);
    Vec center = spec.center ? *spec.center : default_center(base_id, base.ambient_dim());
    if (center.size() != base.ambient_dim())
      throw config_error("inversion center dimension mismatch");
    Immersion inv = pushforward(base, MoebiusTransform::inversion(center), true);
    inv.label = id + format_params(base.params);
    return inv;
  }
  return base_surface(id, spec.params);
}

Immersion make_catalog_surface(const std::string& id,
                               const std::map<std::string, double>& params) {
  CatalogSpec spec;
  spec.surface = id;
  spec.params = params;
  return make_catalog_surface(spec);
}

}  // namespace wlab
