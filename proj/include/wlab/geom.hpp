#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlab {

inline constexpr double pi = std::numbers::pi;

// Ambient vectors/matrices. Dimension is 3 or 4 at runtime; the fixed
// capacity keeps them off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Cplx = std::complex<double>;

struct Error : std::runtime_error {
  enum class Code { domain, config, numerical };
  Code code;
  Error(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

inline Error domain_error(const std::string& m) { return Error(Error::Code::domain, m); }
inline Error config_error(const std::string& m) { return Error(Error::Code::config, m); }
inline Error numerical_error(const std::string& m) { return Error(Error::Code::numerical, m); }

/// Pairwise (cascade) summation: deterministic and accurate independent of
/// accumulation chunking.
inline double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  return pairwise_sum(x.first(n / 2)) + pairwise_sum(x.subspan(n / 2));
}

// ---------------------------------------------------------------------------
// Second-order forward-mode scalar on two chart variables.
//
// Chart maps are written once in D2 arithmetic and every first and second
// partial comes out of the chain rule exactly; no finite differencing
// anywhere in the jet pipeline.
// ---------------------------------------------------------------------------
struct D2 {
  double v = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;

  D2() = default;
  D2(double value) : v(value) {}
  D2(double value, double gx, double gy, double hxx, double hxy, double hyy)
      : v(value), dx(gx), dy(gy), dxx(hxx), dxy(hxy), dyy(hyy) {}

  static D2 var_x(double value) { return D2(value, 1, 0, 0, 0, 0); }
  static D2 var_y(double value) { return D2(value, 0, 1, 0, 0, 0); }
};

inline D2 operator+(const D2& a, const D2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
inline D2 operator-(const D2& a, const D2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
inline D2 operator-(const D2& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }
inline D2 operator*(const D2& a, const D2& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + 2 * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + 2 * a.dy * b.dy + a.v * b.dyy};
}
inline D2 operator*(double s, const D2& a) { return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy}; }
inline D2 operator*(const D2& a, double s) { return s * a; }
inline D2 operator+(const D2& a, double s) { D2 r = a; r.v += s; return r; }
inline D2 operator+(double s, const D2& a) { return a + s; }
inline D2 operator-(const D2& a, double s) { return a + (-s); }
inline D2 operator-(double s, const D2& a) { return (-a) + s; }

/// Compose with a scalar function g given g(a.v), g'(a.v), g''(a.v).
inline D2 d2_compose(const D2& a, double g, double gp, double gpp) {
  return {g,
          gp * a.dx,
          gp * a.dy,
          gpp * a.dx * a.dx + gp * a.dxx,
          gpp * a.dx * a.dy + gp * a.dxy,
          gpp * a.dy * a.dy + gp * a.dyy};
}

inline D2 recip(const D2& a) {
  const double iv = 1.0 / a.v;
  return d2_compose(a, iv, -iv * iv, 2 * iv * iv * iv);
}
inline D2 operator/(const D2& a, const D2& b) { return a * recip(b); }
inline D2 operator/(const D2& a, double s) { return a * (1.0 / s); }
inline D2 operator/(double s, const D2& a) { return s * recip(a); }

inline D2 sqrt(const D2& a) {
  const double r = std::sqrt(a.v);
  return d2_compose(a, r, 0.5 / r, -0.25 / (r * a.v));
}
inline D2 exp(const D2& a) {
  const double e = std::exp(a.v);
  return d2_compose(a, e, e, e);
}
inline D2 log(const D2& a) { return d2_compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline D2 sin(const D2& a) { return d2_compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline D2 cos(const D2& a) { return d2_compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline D2 sinh(const D2& a) { return d2_compose(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
inline D2 cosh(const D2& a) { return d2_compose(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
inline D2 sech(const D2& a) {
  const double c = std::cosh(a.v), s = std::sinh(a.v);
  // (1/cosh)'' = (2 sinh^2 - cosh^2)/cosh^3
  return d2_compose(a, 1 / c, -s / (c * c), (2 * s * s - c * c) / (c * c * c));
}

// ---------------------------------------------------------------------------
// 2-jet of a chart-to-chart map (u(x,y), v(x,y)); used to compose immersions
// with reparameterizations and sampling charts.
// ---------------------------------------------------------------------------
struct ChartJet {
  Vec2 value;
  Mat2 d1;                    // column k = (u_k, v_k)
  Vec2 d2[3];                 // second partials: (..)_{11}, (..)_{12}, (..)_{22}
};

inline ChartJet chart_jet_from(const D2& u, const D2& v) {
  ChartJet j;
  j.value = Vec2(u.v, v.v);
  j.d1 << u.dx, u.dy, v.dx, v.dy;
  j.d2[0] = Vec2(u.dxx, v.dxx);
  j.d2[1] = Vec2(u.dxy, v.dxy);
  j.d2[2] = Vec2(u.dyy, v.dyy);
  return j;
}

/// 2-jet of a holomorphic map at z given phi(z), phi'(z), phi''(z).
inline ChartJet chart_jet_holomorphic(Cplx phi, Cplx dphi, Cplx ddphi) {
  ChartJet j;
  j.value = Vec2(phi.real(), phi.imag());
  // Cauchy-Riemann: u_x = Re phi', u_y = -Im phi', v_x = Im phi', v_y = Re phi'.
  j.d1 << dphi.real(), -dphi.imag(), dphi.imag(), dphi.real();
  j.d2[0] = Vec2(ddphi.real(), ddphi.imag());
  j.d2[1] = Vec2(-ddphi.imag(), ddphi.real());
  j.d2[2] = Vec2(-ddphi.real(), -ddphi.imag());
  return j;
}

// ---------------------------------------------------------------------------
// Small deterministic RNG (splitmix64 core). Reproducibility of seeded
// experiments is part of the CLI contract, so we avoid std::random's
// implementation-defined distributions.
// ---------------------------------------------------------------------------
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0,1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    // Box-Muller; one value per call keeps the stream simple.
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * pi * u2);
  }
  Vec direction(int n) {
    Vec d(n);
    double norm2 = 0;
    do {
      for (int i = 0; i < n; ++i) d[i] = normal();
      norm2 = d.squaredNorm();
    } while (norm2 < 1e-12);
    return d / std::sqrt(norm2);
  }

 private:
  std::uint64_t state_;
};

/// Orthogonal matrix from a skew parameter vector (n=3: Rodrigues, n=4: Cayley).
Mat rotation_from_params(int n, std::span<const double> params);
/// Number of skew parameters for dimension n (3 -> 3, 4 -> 6).
inline int rotation_param_count(int n) { return n * (n - 1) / 2; }

}  // namespace wlab
