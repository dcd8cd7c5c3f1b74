#ifndef NLSLAB_NUMERICS_HPP
#define NLSLAB_NUMERICS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nlslab {

// Composite quadrature of uniformly sampled values with spacing h.
// Simpson on even panel counts, with a 3/8 closing rule when the panel
// count is odd.  Fourth-order accurate.
double integrate_uniform(std::span<const double> f, double h);

// Cubic (4-point Lagrange) interpolation on a uniform grid x_i = i*h,
// i = 0..n-1.  `parity` controls the extension across x=0: +1 even,
// -1 odd.  Beyond the last node the value is 0.
double interp_uniform(std::span<const double> f, double h, double x,
                      int parity = +1);

// Derivative of the cubic interpolant at x (same conventions).
double interp_uniform_deriv(std::span<const double> f, double h, double x,
                            int parity = +1);

// Least squares line y ~ a + b*x.
struct LineFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;  // root mean square residual
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Sixth-order centered first/second derivative at node i of uniformly
// sampled values; `parity` gives the extension across i=0, and nodes
// past the right end are clamped to zero (valid for decaying tails).
double fd6_first(std::span<const double> f, double h, int i, int parity);
double fd6_second(std::span<const double> f, double h, int i, int parity);

// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 at the ends.
double smoothstep5(double t);
double smoothstep5_deriv(double t);
double smoothstep5_d2(double t);
double smoothstep5_d3(double t);
double smoothstep5_d4(double t);

// FNV-1a 64-bit checksum of a byte buffer.
std::uint64_t fnv1a64(const void* data, std::size_t n);

// Deterministic xorshift-based generator for reproducible property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace nlslab

#endif
