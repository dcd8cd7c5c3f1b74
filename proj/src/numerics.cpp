#include "nlslab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "nlslab/errors.hpp"

namespace nlslab {

const char* status_name(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::invalid_argument: return "invalid_argument";
    case Status::no_convergence: return "no_convergence";
    case Status::singular_system: return "singular_system";
    case Status::shape_mismatch: return "shape_mismatch";
    case Status::boundary_mass: return "boundary_mass";
    case Status::resolution_exceeded: return "resolution_exceeded";
    case Status::drift_exceeded: return "drift_exceeded";
    case Status::non_finite: return "non_finite";
    case Status::not_blowing_up: return "not_blowing_up";
    case Status::insufficient_data: return "insufficient_data";
    case Status::degenerate_centers: return "degenerate_centers";
    case Status::config_invalid: return "config_invalid";
    case Status::io_error: return "io_error";
    case Status::internal: return "internal";
  }
  return "unknown";
}

double integrate_uniform(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  std::size_t m = n;
  double head = 0.0;
  std::size_t off = 0;
  if ((n - 1) % 2 != 0) {
    // 3/8 rule on the first three panels, Simpson on the rest
    head = 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    off = 3;
    m = n - 3;
  }
  double s = f[off] + f[off + m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i)
    s += (i % 2 == 1 ? 4.0 : 2.0) * f[off + i];
  return head + h / 3.0 * s;
}

namespace {
double sample(std::span<const double> f, long i, int parity) {
  const long n = static_cast<long>(f.size());
  if (i < 0) return parity * f[static_cast<std::size_t>(-i)];
  if (i >= n) return 0.0;
  return f[static_cast<std::size_t>(i)];
}
}  // namespace

namespace {
// quintic Lagrange window: nodes i-2 .. i+3 around the cell of x
constexpr int kOff[6] = {-2, -1, 0, 1, 2, 3};
}  // namespace

double interp_uniform(std::span<const double> f, double h, double x,
                      int parity) {
  if (x < 0) return parity * interp_uniform(f, h, -x, parity);
  const long n = static_cast<long>(f.size());
  const double u = x / h;
  long i = static_cast<long>(std::floor(u));
  if (i >= n - 1) return 0.0;
  const double t = u - i;
  double acc = 0.0;
  for (int j = 0; j < 6; ++j) {
    double w = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m == j) continue;
      w *= (t - kOff[m]) / (kOff[j] - kOff[m]);
    }
    acc += w * sample(f, i + kOff[j], parity);
  }
  return acc;
}

double interp_uniform_deriv(std::span<const double> f, double h, double x,
                            int parity) {
  if (x < 0) return parity == +1 ? -interp_uniform_deriv(f, h, -x, parity)
                                 : interp_uniform_deriv(f, h, -x, parity);
  const long n = static_cast<long>(f.size());
  const double u = x / h;
  long i = static_cast<long>(std::floor(u));
  if (i >= n - 1) return 0.0;
  const double t = u - i;
  double acc = 0.0;
  for (int j = 0; j < 6; ++j) {
    double denom = 1.0;
    for (int m = 0; m < 6; ++m)
      if (m != j) denom *= kOff[j] - kOff[m];
    double dsum = 0.0;
    for (int k = 0; k < 6; ++k) {
      if (k == j) continue;
      double prod = 1.0;
      for (int m = 0; m < 6; ++m) {
        if (m == j || m == k) continue;
        prod *= t - kOff[m];
      }
      dsum += prod;
    }
    acc += dsum / denom * sample(f, i + kOff[j], parity);
  }
  return acc / h;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    fail(Status::insufficient_data, "fit_line needs >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) fail(Status::singular_system, "degenerate abscissae in fit_line");
  LineFit out;
  out.b = (n * sxy - sx * sy) / det;
  out.a = (sy - out.b * sx) / n;
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - out.a - out.b * x[i];
    acc += r * r;
  }
  out.rms = std::sqrt(acc / n);
  return out;
}

double fd6_first(std::span<const double> f, double h, int i, int parity) {
  static const double c[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  double s = 0.0;
  for (int m = 1; m <= 3; ++m)
    s += c[m - 1] * (sample(f, i + m, parity) - sample(f, i - m, parity));
  return s / h;
}

double fd6_second(std::span<const double> f, double h, int i, int parity) {
  static const double c0 = -49.0 / 18.0;
  static const double c[3] = {3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  double s = c0 * sample(f, i, parity);
  for (int m = 1; m <= 3; ++m)
    s += c[m - 1] * (sample(f, i + m, parity) + sample(f, i - m, parity));
  return s / (h * h);
}

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double smoothstep5_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

double smoothstep5_d3(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * (6.0 * t * t - 6.0 * t + 1.0);
}

double smoothstep5_d4(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 360.0 * (2.0 * t - 1.0);
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t Rng::next_u64() {
  std::uint64_t x = state_;
  x ^= x << 13;
  x ^= x >> 7;
  x ^= x << 17;
  state_ = x;
  return x;
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace nlslab
