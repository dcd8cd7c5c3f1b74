#include "nlslab/profiles.hpp"

#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

namespace {

void check_bubble_index(const ProfileSpec& spec, int k) {
  if (k < 0 || k >= spec.K ||
      spec.K != static_cast<int>(spec.bubbles.size()))
    fail(Status::invalid_argument, "bubble index out of range");
}

void check_scale(double lambda, const Grid& g) {
  if (!(lambda > 0))
    fail(Status::invalid_argument, "bubble scale must be positive");
  if (lambda < 8.0 * g.h(0))
    fail(Status::resolution_exceeded,
         "bubble scale " + format_double(lambda) + " below 8h = " +
             format_double(8.0 * g.h(0)));
}

}  // namespace

Field make_W(const GroundState& gs, const ProfileSpec& spec, int k, double t,
             const Grid& grid) {
  check_bubble_index(spec, k);
  const auto& b = spec.bubbles[k];
  check_scale(b.omega, grid);
  const int d = grid.d;
  const int n1 = d == 2 ? grid.n[1] : 1;
  const double v2 = b.center[0] * b.center[0] + b.center[1] * b.center[1];
  const double amp = std::pow(b.omega, -0.5 * d);
  Field out(grid, t);
  for (int i0 = 0; i0 < grid.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double x0 = grid.coord(0, i0);
      const double x1 = d == 2 ? grid.coord(1, i1) : 0.0;
      const double y0 = (x0 - b.center[0] * t) / b.omega;
      const double y1 = (x1 - b.center[1] * t) / b.omega;
      const double r = std::sqrt(y0 * y0 + y1 * y1);
      const double phase = 0.5 * (b.center[0] * x0 + b.center[1] * x1) -
                           0.25 * v2 * t + t / (b.omega * b.omega) +
                           b.vartheta;
      out.values[out.idx(i0, i1)] =
          amp * gs.Q(r) * std::polar(1.0, phase);
    }
  }
  return out;
}

Field make_S(const GroundState& gs, const ProfileSpec& spec, int k, double t,
             const Grid& grid) {
  check_bubble_index(spec, k);
  const auto& b = spec.bubbles[k];
  const double tau = spec.T - t;
  if (!(tau > 0)) fail(Status::invalid_argument, "make_S requires t < T");
  const double lambda = b.omega * tau;
  check_scale(lambda, grid);
  const int d = grid.d;
  const int n1 = d == 2 ? grid.n[1] : 1;
  const double amp = std::pow(lambda, -0.5 * d);
  Field out(grid, t);
  for (int i0 = 0; i0 < grid.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double z0 = grid.coord(0, i0) - b.center[0];
      const double z1 = d == 2 ? grid.coord(1, i1) - b.center[1] : 0.0;
      const double r2 = z0 * z0 + z1 * z1;
      const double phase = -0.25 * r2 / tau +
                           1.0 / (b.omega * b.omega * tau) + b.vartheta;
      out.values[out.idx(i0, i1)] =
          amp * gs.Q(std::sqrt(r2) / lambda) * std::polar(1.0, phase);
    }
  }
  return out;
}

namespace {
Field sum_profiles(const GroundState& gs, const ProfileSpec& spec, double t,
                   const Grid& grid, bool soliton) {
  Field out(grid, t);
  for (int k = 0; k < spec.K; ++k) {
    Field w = soliton ? make_W(gs, spec, k, t, grid)
                      : make_S(gs, spec, k, t, grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += w.values[i];
  }
  return out;
}
}  // namespace

Field make_W_sum(const GroundState& gs, const ProfileSpec& spec, double t,
                 const Grid& grid) {
  return sum_profiles(gs, spec, t, grid, true);
}

Field make_S_sum(const GroundState& gs, const ProfileSpec& spec, double t,
                 const Grid& grid) {
  return sum_profiles(gs, spec, t, grid, false);
}

Field make_U_bubble(const GroundState& gs, const ModParams::Bubble& b,
                    const Grid& grid) {
  check_scale(b.lambda, grid);
  const int d = grid.d;
  const int n1 = d == 2 ? grid.n[1] : 1;
  const double amp = std::pow(b.lambda, -0.5 * d);
  Field out(grid);
  for (int i0 = 0; i0 < grid.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double y0 = (grid.coord(0, i0) - b.alpha[0]) / b.lambda;
      const double y1 =
          d == 2 ? (grid.coord(1, i1) - b.alpha[1]) / b.lambda : 0.0;
      const double y2 = y0 * y0 + y1 * y1;
      const double phase = b.beta[0] * y0 + b.beta[1] * y1 -
                           0.25 * b.gamma * y2 + b.theta;
      out.values[out.idx(i0, i1)] =
          amp * gs.Q(std::sqrt(y2)) * std::polar(1.0, phase);
    }
  }
  return out;
}

Field make_U(const GroundState& gs, const ModParams& p, const Grid& grid) {
  Field out(grid, p.t);
  for (const auto& b : p.bubbles) {
    Field u = make_U_bubble(gs, b, grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += u.values[i];
  }
  return out;
}

ModParams pseudo_conformal_params(const ProfileSpec& spec, double t) {
  const double tau = spec.T - t;
  if (!(tau > 0)) fail(Status::invalid_argument, "need t < T");
  ModParams p;
  p.t = t;
  for (const auto& b : spec.bubbles) {
    ModParams::Bubble m;
    m.lambda = b.omega * tau;
    m.alpha = b.center;
    m.beta = {0.0, 0.0};
    m.gamma = b.omega * b.omega * tau;
    m.theta = 1.0 / (b.omega * b.omega * tau) + b.vartheta;
    p.bubbles.push_back(m);
  }
  return p;
}

Field resample_affine(const Field& u, const Grid& target,
                      std::array<double, 2> a, std::array<double, 2> b) {
  const Grid& src = u.grid;
  if (src.d != target.d) fail(Status::shape_mismatch, "dimension mismatch");
  // evaluation points must stay in the source box
  for (int axis = 0; axis < src.d; ++axis) {
    const double x0 = target.origin[axis];
    const double x1 = target.coord(axis, target.n[axis] - 1);
    const double e0 = a[axis] * x0 + b[axis];
    const double e1 = a[axis] * x1 + b[axis];
    const double lo = std::min(e0, e1), hi = std::max(e0, e1);
    if (lo < src.origin[axis] - src.h(axis) ||
        hi > src.origin[axis] + src.box[axis])
      fail(Status::resolution_exceeded,
           "resampled points leave the source box");
  }

  auto hat = fft::spectrum(u);
  const double invN = 1.0 / static_cast<double>(src.size());

  // per-axis semidiscrete Fourier evaluation matrices
  auto axis_weights = [&](int axis) {
    const int ns = src.n[axis];
    const int nt = target.n[axis];
    std::vector<cplx> w(static_cast<std::size_t>(nt) * ns);
    for (int m = 0; m < nt; ++m) {
      const double xi =
          a[axis] * target.coord(axis, m) + b[axis] - src.origin[axis];
      for (int j = 0; j < ns; ++j) {
        const double k = src.wavenumber(axis, j);
        if (j == ns / 2)
          w[static_cast<std::size_t>(m) * ns + j] = std::cos(k * xi);
        else
          w[static_cast<std::size_t>(m) * ns + j] = std::polar(1.0, k * xi);
      }
    }
    return w;
  };

  Field out(target, u.time);
  if (src.d == 1) {
    auto w = axis_weights(0);
    for (int m = 0; m < target.n[0]; ++m) {
      cplx s(0.0, 0.0);
      for (int j = 0; j < src.n[0]; ++j)
        s += w[static_cast<std::size_t>(m) * src.n[0] + j] * hat[j];
      out.values[m] = s * invN;
    }
    return out;
  }

  const int ns0 = src.n[0], ns1 = src.n[1];
  const int nt0 = target.n[0], nt1 = target.n[1];
  auto w0 = axis_weights(0);
  auto w1 = axis_weights(1);
  // contract axis 0: partial[m0][j1]
  std::vector<cplx> partial(static_cast<std::size_t>(nt0) * ns1);
  for (int m0 = 0; m0 < nt0; ++m0) {
    for (int j1 = 0; j1 < ns1; ++j1) {
      cplx s(0.0, 0.0);
      for (int j0 = 0; j0 < ns0; ++j0)
        s += w0[static_cast<std::size_t>(m0) * ns0 + j0] *
             hat[static_cast<std::size_t>(j0) * ns1 + j1];
      partial[static_cast<std::size_t>(m0) * ns1 + j1] = s;
    }
  }
  for (int m0 = 0; m0 < nt0; ++m0) {
    for (int m1 = 0; m1 < nt1; ++m1) {
      cplx s(0.0, 0.0);
      for (int j1 = 0; j1 < ns1; ++j1)
        s += w1[static_cast<std::size_t>(m1) * ns1 + j1] *
             partial[static_cast<std::size_t>(m0) * ns1 + j1];
      out.values[out.idx(m0, m1)] = s * invN;
    }
  }
  return out;
}

Field symmetry_transform(const Field& u_snapshot, const SymmetryParams& p,
                         double t, const Grid& target) {
  if (!(p.lambda0 > 0)) fail(Status::invalid_argument, "lambda0 must be positive");
  const double s = (t - p.t0) / (p.lambda0 * p.lambda0);
  if (std::abs(u_snapshot.time - s) > 1e-9 * std::max(1.0, std::abs(s)))
    fail(Status::invalid_argument,
         "input snapshot time does not match (t - t0)/lambda0^2");
  const int d = target.d;
  std::array<double, 2> a = {1.0 / p.lambda0, 1.0 / p.lambda0};
  std::array<double, 2> b = {0.0, 0.0};
  for (int axis = 0; axis < d; ++axis)
    b[axis] = -p.x0[axis] / p.lambda0 - p.beta0[axis] * (t - p.t0) / p.lambda0;
  Field out = resample_affine(u_snapshot, target, a, b);
  const double amp = std::pow(p.lambda0, -0.5 * d);
  const double b2 = p.beta0[0] * p.beta0[0] + p.beta0[1] * p.beta0[1];
  const int n1 = d == 2 ? target.n[1] : 1;
  for (int i0 = 0; i0 < target.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double x0 = target.coord(0, i0) - p.x0[0];
      const double x1 = d == 2 ? target.coord(1, i1) - p.x0[1] : 0.0;
      const double phase = 0.5 * (p.beta0[0] * x0 + p.beta0[1] * x1) -
                           0.25 * b2 * (t - p.t0) + p.theta0;
      out.values[out.idx(i0, i1)] *= amp * std::polar(1.0, phase);
    }
  }
  out.time = t;
  return out;
}

Field pseudo_conformal(const Field& u_snapshot, double T, double t,
                       const Grid& target) {
  const double tau = T - t;
  if (!(tau > 0)) fail(Status::invalid_argument, "need t < T");
  const double s = 1.0 / tau;
  if (std::abs(u_snapshot.time - s) > 1e-9 * std::max(1.0, std::abs(s)))
    fail(Status::invalid_argument,
         "input snapshot time does not match 1/(T-t)");
  const int d = target.d;
  Field out = resample_affine(u_snapshot, target, {1.0 / tau, 1.0 / tau},
                              {0.0, 0.0});
  const double amp = std::pow(tau, -0.5 * d);
  const int n1 = d == 2 ? target.n[1] : 1;
  for (int i0 = 0; i0 < target.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      double r2 = target.coord(0, i0) * target.coord(0, i0);
      if (d == 2) r2 += target.coord(1, i1) * target.coord(1, i1);
      out.values[out.idx(i0, i1)] *=
          amp * std::polar(1.0, -0.25 * r2 / tau);
    }
  }
  out.time = t;
  return out;
}

Field pseudo_conformal_inverse(const Field& v_snapshot, double T,
                               const Grid& target) {
  const double t = v_snapshot.time;
  const double tau = T - t;
  if (!(tau > 0)) fail(Status::invalid_argument, "snapshot must be at t < T");
  const int d = target.d;
  // strip the conformal phase first so the resampled field is smooth
  Field stripped = v_snapshot;
  {
    const Grid& g = v_snapshot.grid;
    const int n1 = d == 2 ? g.n[1] : 1;
    for (int i0 = 0; i0 < g.n[0]; ++i0)
      for (int i1 = 0; i1 < n1; ++i1) {
        double r2 = g.coord(0, i0) * g.coord(0, i0);
        if (d == 2) r2 += g.coord(1, i1) * g.coord(1, i1);
        stripped.values[stripped.idx(i0, i1)] *=
            std::polar(1.0, 0.25 * r2 / tau);
      }
  }
  Field out = resample_affine(stripped, target, {tau, tau}, {0.0, 0.0});
  const double amp = std::pow(tau, 0.5 * d);
  for (auto& v : out.values) v *= amp;
  out.time = 1.0 / tau;
  return out;
}

}  // namespace nlslab
