#include "nlslab/field_ops.hpp"

#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

double mass(const Field& u) {
  double s = 0.0;
  for (const auto& v : u.values) s += std::norm(v);
  return s * u.grid.cell();
}

double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

double grad_l2_sq(const Field& u) {
  // Parseval: integral |grad u|^2 = (cell/N) * sum |k|^2 |u_hat|^2
  auto hat = fft::spectrum(u);
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  double s = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    const double k0 = g.wavenumber(0, i0);
    for (int i1 = 0; i1 < n1; ++i1) {
      double k2 = k0 * k0;
      if (g.d == 2) {
        const double k1 = g.wavenumber(1, i1);
        k2 += k1 * k1;
      }
      s += k2 * std::norm(hat[static_cast<std::size_t>(i0) * n1 + i1]);
    }
  }
  return s * g.cell() / static_cast<double>(g.size());
}

double lp_norm_pow(const Field& u, double p) {
  double s = 0.0;
  for (const auto& v : u.values) s += std::pow(std::abs(v), p);
  return s * u.grid.cell();
}

double energy(const Field& u) {
  const int d = u.grid.d;
  const double p = 2.0 + 4.0 / d;
  return 0.5 * grad_l2_sq(u) - (d / (2.0 * d + 4.0)) * lp_norm_pow(u, p);
}

std::array<Field, 2> gradient(const Field& u) {
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  auto hat = fft::spectrum(u);
  std::array<Field, 2> out{Field(g, u.time), Field(g, u.time)};
  for (int axis = 0; axis < g.d; ++axis) {
    std::vector<cplx> work(hat.size());
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
        const double k = g.wavenumber(axis, axis == 0 ? i0 : i1);
        work[id] = cplx(0.0, k) * hat[id];
      }
    }
    fft::inverse(work, g);
    out[axis].values = std::move(work);
  }
  return out;
}

std::array<double, 2> momentum(const Field& u) {
  auto gr = gradient(u);
  std::array<double, 2> mom = {0.0, 0.0};
  for (int axis = 0; axis < u.grid.d; ++axis) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      s += std::imag(gr[axis].values[i] * std::conj(u.values[i]));
    mom[axis] = s * u.grid.cell();
  }
  return mom;
}

cplx inner(const Field& a, const Field& b) {
  require_same_grid(a, b);
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += a.values[i] * std::conj(b.values[i]);
  return s * a.grid.cell();
}

double l2_distance(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.grid.cell());
}

double h1_distance(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field diff(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    diff.values[i] = a.values[i] - b.values[i];
  return std::sqrt(mass(diff) + grad_l2_sq(diff));
}

double boundary_mass_fraction(const Field& u) {
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  double outer = 0.0, total = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      double r = std::abs(g.coord(0, i0));
      if (g.d == 2) r = std::max(r, std::abs(g.coord(1, i1)));
      const double m = std::norm(u.values[u.idx(i0, i1)]);
      total += m;
      if (r > 0.25 * g.box[0]) outer += m;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

void require_interior_mass(const Field& u, double tol) {
  const double frac = boundary_mass_fraction(u);
  if (frac > tol)
    fail(Status::boundary_mass,
         "relative mass beyond |x| = box/4 is " + format_double(frac));
}

SigmaNorm sigma_norm(const Field& u) {
  require_interior_mass(u);
  SigmaNorm out;
  out.h1 = std::sqrt(mass(u) + grad_l2_sq(u));
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  double s = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      double r2 = g.coord(0, i0) * g.coord(0, i0);
      if (g.d == 2) r2 += g.coord(1, i1) * g.coord(1, i1);
      s += r2 * std::norm(u.values[u.idx(i0, i1)]);
    }
  }
  out.weighted = std::sqrt(s * g.cell());
  out.total = out.h1 + out.weighted;
  return out;
}

double sigma_distance(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field diff(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    diff.values[i] = a.values[i] - b.values[i];
  return sigma_norm(diff).total;
}

cplx nonlinearity(cplx z, int d) {
  const double a = std::abs(z);
  if (a == 0.0) return cplx(0.0, 0.0);
  return std::pow(a, 4.0 / d) * z;
}

cplx nonlinearity_fprime(cplx U, cplx R, int d) {
  const double a = std::abs(U);
  if (a == 0.0) return cplx(0.0, 0.0);
  const double p = 4.0 / d;
  return (1.0 + 2.0 / d) * std::pow(a, p) * R +
         (2.0 / d) * std::pow(a, p - 2.0) * U * U * std::conj(R);
}

NonlinearityLayers nonlinearity_layers(const Field& U, const Field& R) {
  require_same_grid(U, R);
  const int d = U.grid.d;
  NonlinearityLayers out{Field(U.grid, U.time), Field(U.grid, U.time),
                         Field(U.grid, U.time)};
  for (std::size_t i = 0; i < U.values.size(); ++i) {
    const cplx u = U.values[i];
    const cplx r = R.values[i];
    const cplx fu = nonlinearity(u, d);
    const cplx fp = nonlinearity_fprime(u, r, d);
    out.f_u.values[i] = fu;
    out.fprime_r.values[i] = fp;
    out.fsecond_r2.values[i] = nonlinearity(u + r, d) - fu - fp;
  }
  return out;
}

double gagliardo_nirenberg_ratio(const Field& u, double p) {
  if (p < 2.0) fail(Status::invalid_argument, "exponent p must be >= 2");
  const double m = mass(u);
  if (m == 0.0) fail(Status::invalid_argument, "zero field in GN ratio");
  if (p == 2.0) return 1.0;
  const double s = u.grid.d * (0.5 - 1.0 / p);
  const double lp = std::pow(lp_norm_pow(u, p), 1.0 / p);
  const double l2 = std::sqrt(m);
  const double g2 = std::sqrt(grad_l2_sq(u));
  return lp / (std::pow(l2, 1.0 - s) * std::pow(g2, s));
}

}  // namespace nlslab
