#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wlab/immersion.hpp"

namespace wlab {

/// Catalog of exactly parameterized model surfaces. Chart conventions:
///   sphere(r)              stereographic plane (z = 0 at the south pole),
///                          log-polar sampling
///   perturbed_sphere       f = (1 + eps Y_lm(n)) r n over the sphere chart
///   catenoid(V)            (v, theta) in [-V,V] x [0,2pi),
///                          f = (cosh v cos th, cosh v sin th, v)
///   perturbed_catenoid     catenoid + eps sech(v) cos(2 theta) * unit normal
///   enneper(R)             cubic Weierstrass polynomial chart, |z| <= R
///   chen_graph(c, R)       graph of w = c z^2 in C^2 = R^4, |z| <= R
///   clifford_torus         flat (1/sqrt2)(cos a, sin a, cos b, sin b) in R^4
///   inverted_<base>        pushforward of <base> under I_{x0}; default
///                          centers per family, overridable
struct CatalogSpec {
  std::string surface;
  std::map<std::string, double> params;
  std::optional<Vec> center;  // inverted variants only
};

Immersion make_catalog_surface(const CatalogSpec& spec);
Immersion make_catalog_surface(const std::string& id,
                               const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_ids();

/// Real orthonormal spherical harmonic Y_lm as a Cartesian harmonic
/// polynomial evaluated at a unit vector; l <= 3.
double sph_harmonic(int l, int m, double x, double y, double z);

}  // namespace wlab
