#include "nlslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/field_ops.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

namespace {

// quintic Hermite on [0,1] from endpoint values/derivatives
void hermite5(double v0, double d0, double a0, double v1, double d1,
              double a1, double* c) {
  c[0] = v0;
  c[1] = d0;
  c[2] = 0.5 * a0;
  const double A1 = v1 - v0 - d0 - 0.5 * a0;
  const double A2 = d1 - d0 - a0;
  const double A3 = a1 - a0;
  c[3] = 10.0 * A1 - 4.0 * A2 + 0.5 * A3;
  c[4] = -15.0 * A1 + 7.0 * A2 - A3;
  c[5] = 6.0 * A1 - 3.0 * A2 + 0.5 * A3;
}

double polyval(const double* c, int n, double t) {
  double v = 0.0;
  for (int i = n - 1; i >= 0; --i) v = v * t + c[i];
  return v;
}

}  // namespace

CutoffFamily::CutoffFamily(double A) : A_(A) {
  if (!(A > 0)) fail(Status::invalid_argument, "cutoff scale A must be positive");
  const double e2 = std::exp(-2.0);
  const double dm = (2.0 - e2) / 2.0 - 1.0;  // m(2) - m(1)
  const double mp2 = (3.0 * e2 - 2.0) / 4.0; // m'(2)
  a_ = (-dm + mp2 / 5.0) / (1.0 / 6.0 - 1.0 / 5.0);
  b_ = -mp2 - a_;
  const double t = 1.0;
  psi_at_2_ = 0.5 + t + 0.5 * t * t - (b_ / 30.0) * std::pow(t, 6) -
              (a_ / 42.0 + b_ / 35.0) * std::pow(t, 7) -
              (a_ / 48.0) * std::pow(t, 8);
}

double CutoffFamily::psi_p(double r) const {
  if (r <= 1.0) return r;
  if (r >= 2.0) return 2.0 - std::exp(-r);
  const double t = r - 1.0;
  const double t5 = t * t * t * t * t;
  const double m = 1.0 - (a_ / 6.0) * t5 * t - (b_ / 5.0) * t5;
  return r * m;
}

double CutoffFamily::psi_pp(double r) const {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return std::exp(-r);
  const double t = r - 1.0;
  const double t4 = t * t * t * t;
  const double m = 1.0 - (a_ / 6.0) * t4 * t * t - (b_ / 5.0) * t4 * t;
  const double mp = -(a_ * t4 * t + b_ * t4);
  return m + r * mp;
}

double CutoffFamily::psi_ppp(double r) const {
  if (r <= 1.0) return 0.0;
  if (r >= 2.0) return -std::exp(-r);
  const double t = r - 1.0;
  const double t3 = t * t * t;
  const double mp = -(a_ * t3 * t * t + b_ * t3 * t);
  const double mpp = -(5.0 * a_ * t3 * t + 4.0 * b_ * t3);
  return 2.0 * mp + r * mpp;
}

double CutoffFamily::psi(double r) const {
  if (r <= 1.0) return 0.5 * r * r;
  if (r <= 2.0) {
    const double t = r - 1.0;
    return 0.5 + t + 0.5 * t * t - (b_ / 30.0) * std::pow(t, 6) -
           (a_ / 42.0 + b_ / 35.0) * std::pow(t, 7) -
           (a_ / 48.0) * std::pow(t, 8);
  }
  return psi_at_2_ + 2.0 * (r - 2.0) + std::exp(-r) - std::exp(-2.0);
}

double CutoffFamily::phiA(double r) const {
  const double s = r / A_;
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return std::exp(-s);
  // exp(quintic Hermite of log phi): log 1 = 0 at s=1, log = -s at s=2
  static thread_local double c[6];
  static thread_local bool init = false;
  if (!init) {
    hermite5(0.0, 0.0, 0.0, -2.0, -1.0, 0.0, c);
    init = true;
  }
  return std::exp(polyval(c, 6, s - 1.0));
}

double CutoffFamily::varphi_profile(double r) const {
  if (r >= 2.0) return 0.0;
  const double m = r <= 1.0 ? 1.0 : 1.0 - smoothstep5(r - 1.0);
  return r * r * m;
}

double CutoffFamily::varphiA(double r) const {
  return A_ * A_ * varphi_profile(r / A_);
}

std::vector<double> morawetz_terms(const Decomposition& dec,
                                   const CutoffFamily& cut,
                                   const Localization& loc) {
  const Field& R = dec.remainder;
  const Grid& g = R.grid;
  const int d = g.d;
  const int n1 = d == 2 ? g.n[1] : 1;
  auto gr = gradient(R);
  const int K = static_cast<int>(dec.params.bubbles.size());
  std::vector<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    const auto& b = dec.params.bubbles[k];
    double s = 0.0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
        const double z0 = (g.coord(0, i0) - b.alpha[0]) / b.lambda;
        const double z1 =
            d == 2 ? (g.coord(1, i1) - b.alpha[1]) / b.lambda : 0.0;
        const double r = std::sqrt(z0 * z0 + z1 * z1);
        if (r < 1e-14) continue;
        const double gc = cut.grad_chiA(r) / r;  // (grad chi_A)(z) = gc * z
        cplx dot = gc * z0 * gr[0].values[id];
        if (d == 2) dot += gc * z1 * gr[1].values[id];
        s += std::imag(dot * std::conj(R.values[id])) * loc.phi[k][id];
      }
    }
    out[k] = s * g.cell();
  }
  return out;
}

double localized_virial(const Decomposition& dec, const CutoffFamily& cut,
                        const GroundState& gs, const Localization& loc) {
  auto mor = morawetz_terms(dec, cut, loc);
  double out = 0.0;
  for (std::size_t k = 0; k < mor.size(); ++k) {
    const auto& b = dec.params.bubbles[k];
    out += 0.5 * mor[k] - b.gamma / (4.0 * b.lambda) * gs.constants().xQ2;
  }
  return out;
}

double modified_localized_virial(const Decomposition& dec,
                                 const CutoffFamily& cut,
                                 const GroundState& gs,
                                 const Localization& loc) {
  auto mor = morawetz_terms(dec, cut, loc);
  double out = 0.0;
  for (std::size_t k = 0; k < mor.size(); ++k) {
    const auto& b = dec.params.bubbles[k];
    const double gl = b.gamma / b.lambda;
    out += 0.5 * gl * mor[k] - 0.125 * gl * gl * gs.constants().xQ2;
  }
  return out;
}

double generalized_energy(const Decomposition& dec, const CutoffFamily& cut,
                          const GroundState& gs, const Localization& loc) {
  const Field& R = dec.remainder;
  const Grid& g = R.grid;
  const int d = g.d;
  const double pexp = 2.0 + 4.0 / d;
  const double fcoef = d / (2.0 * d + 4.0);
  Field U = make_U(gs, dec.params, g);

  double quad = 0.5 * grad_l2_sq(R);
  const int K = static_cast<int>(dec.params.bubbles.size());
  double loc_mass = 0.0;
  for (int k = 0; k < K; ++k) {
    const double il2 = 1.0 / (dec.params.bubbles[k].lambda *
                              dec.params.bubbles[k].lambda);
    double s = 0.0;
    for (std::size_t i = 0; i < R.values.size(); ++i)
      s += std::norm(R.values[i]) * loc.phi[k][i];
    loc_mass += 0.5 * il2 * s * g.cell();
  }

  double pot = 0.0;
  for (std::size_t i = 0; i < R.values.size(); ++i) {
    const cplx u = U.values[i];
    const cplx r = R.values[i];
    const double F_ur = fcoef * std::pow(std::abs(u + r), pexp);
    const double F_u = fcoef * std::pow(std::abs(u), pexp);
    pot += F_ur - F_u -
           std::real(nonlinearity(u, d) * std::conj(r));
  }
  pot *= g.cell();

  auto mor = morawetz_terms(dec, cut, loc);
  double morsum = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& b = dec.params.bubbles[k];
    morsum += b.gamma / (2.0 * b.lambda) * mor[k];
  }
  return quad + loc_mass - pot + morsum;
}

double interior_virial(const Decomposition& dec,
                       const std::vector<std::array<double, 2>>& centers,
                       double sigma, const Localization& loc) {
  const Field& R = dec.remainder;
  const Grid& g = R.grid;
  const int d = g.d;
  const int n1 = d == 2 ? g.n[1] : 1;
  auto gr = gradient(R);
  // psi'(r) = r for r <= 2 sigma, reaches a plateau with zero slope at
  // 3 sigma, constant after; grad chi(x) = psi'(|x|) x/|x|
  auto psi_p = [&](double r) {
    if (r <= 2.0 * sigma) return r;
    if (r >= 3.0 * sigma) return 2.5 * sigma;
    const double t = (r - 2.0 * sigma) / sigma;
    return 2.0 * sigma + sigma * (t - 0.5 * t * t);
  };
  double out = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    double s = 0.0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
        const double z0 = g.coord(0, i0) - centers[k][0];
        const double z1 = d == 2 ? g.coord(1, i1) - centers[k][1] : 0.0;
        const double r = std::sqrt(z0 * z0 + z1 * z1);
        if (r < 1e-14) continue;
        const double gc = psi_p(r) / r;
        cplx dot = gc * z0 * gr[0].values[id];
        if (d == 2) dot += gc * z1 * gr[1].values[id];
        s += std::imag(dot * std::conj(R.values[id])) * loc.phi[k][id];
      }
    }
    out += s * g.cell();
  }
  return out;
}

SolitonVirial soliton_virial(const Field& z, const CutoffFamily& cut) {
  require_interior_mass(z);
  const Grid& g = z.grid;
  const int d = g.d;
  const int n1 = d == 2 ? g.n[1] : 1;
  auto gr = gradient(z);
  SolitonVirial out;
  double I = 0.0, MA = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
      const double x0 = g.coord(0, i0);
      const double x1 = d == 2 ? g.coord(1, i1) : 0.0;
      cplx dot = x0 * gr[0].values[id];
      if (d == 2) dot += x1 * gr[1].values[id];
      I += std::imag(dot * std::conj(z.values[id]));
      const double r = std::sqrt(x0 * x0 + x1 * x1);
      MA += cut.varphiA(r) * std::norm(z.values[id]);
    }
  }
  out.I = I * g.cell();
  out.MA = MA * g.cell();
  return out;
}

double energy_quantization_check(const Field& v, const ProfileSpec& spec,
                                 const GroundState& gs) {
  double target = 0.0;
  for (const auto& b : spec.bubbles)
    target += b.omega * b.omega / 8.0 * gs.constants().xQ2;
  return energy(v) - target;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& series,
                 RateModel model, double T) {
  std::vector<double> xs, ys;
  double lo = 1e300, hi = -1e300;
  for (const auto& [t, v] : series) {
    const double iv = model == RateModel::power_of_t ? t : T - t;
    if (!(iv > 0) || !(std::abs(v) > 0)) continue;
    lo = std::min(lo, iv);
    hi = std::max(hi, iv);
    switch (model) {
      case RateModel::power_T_minus_t:
        xs.push_back(std::log(iv));
        ys.push_back(std::log(std::abs(v)));
        break;
      case RateModel::exp_inverse_T_minus_t:
        xs.push_back(1.0 / iv);
        ys.push_back(std::log(std::abs(v)));
        break;
      case RateModel::power_of_t:
        xs.push_back(std::log(iv));
        ys.push_back(std::log(std::abs(v)));
        break;
    }
  }
  if (xs.size() < 8 || hi / lo < 10.0)
    fail(Status::insufficient_data,
         "rate fit needs >= 8 points spanning at least one decade");
  const LineFit f = fit_line(xs, ys);
  RateFit out;
  out.model = model;
  out.log_amplitude = f.a;
  out.exponent = model == RateModel::exp_inverse_T_minus_t ? -f.b : f.b;
  out.residual = f.rms;
  out.window_lo = lo;
  out.window_hi = hi;
  return out;
}

DoubleAverage double_average(
    const std::vector<std::pair<double, double>>& series, double T) {
  const int N = static_cast<int>(series.size());
  if (N < 4) fail(Status::insufficient_data, "double_average needs >= 4 samples");
  for (int i = 1; i < N; ++i)
    if (!(series[i].first > series[i - 1].first))
      fail(Status::invalid_argument, "time samples must increase");
  if (!(series.back().first < T))
    fail(Status::invalid_argument, "samples must precede T");

  DoubleAverage out;
  double wmax = 0.0;
  for (const auto& [t, w] : series) wmax = std::max(wmax, std::abs(w));
  if (wmax == 0.0) {
    for (const auto& [t, w] : series) out.values.emplace_back(t, 0.0);
    return out;
  }

  // fitted power tail w ~ c (T-r)^p over the final third
  double p = 0.0, c = series.back().second;
  {
    std::vector<std::pair<double, double>> tailpts(
        series.begin() + 2 * N / 3, series.end());
    std::vector<double> xs, ys;
    for (const auto& [t, w] : tailpts)
      if (w > 0) {
        xs.push_back(std::log(T - t));
        ys.push_back(std::log(w));
      }
    if (xs.size() >= 3) {
      const LineFit f = fit_line(xs, ys);
      if (f.b > -0.99) {  // integrable tail
        p = f.b;
        c = std::exp(f.a);
      } else {
        p = 0.0;
        c = std::max(0.0, series.back().second);
      }
    }
  }
  const double tau_last = T - series.back().first;
  const double tail_G = c * std::pow(tau_last, p + 1.0) / (p + 1.0);
  const double tail_outer = c * std::pow(tau_last, p + 1.0) /
                            ((p + 1.0) * (p + 1.0));

  // inner integral G(s) = int_s^T w dr at the sample points
  std::vector<double> G(N);
  G[N - 1] = tail_G;
  for (int i = N - 2; i >= 0; --i) {
    const double dt = series[i + 1].first - series[i].first;
    G[i] = G[i + 1] + 0.5 * dt * (series[i].second + series[i + 1].second);
  }
  // outer integrand H(s) = G(s) / (T - s)
  std::vector<double> H(N);
  for (int i = 0; i < N; ++i) H[i] = G[i] / (T - series[i].first);

  for (int i = 0; i < N; ++i) {
    double acc = tail_outer;
    for (int j = N - 2; j >= i; --j) {
      const double dt = series[j + 1].first - series[j].first;
      acc += 0.5 * dt * (H[j] + H[j + 1]);
    }
    out.values.emplace_back(series[i].first,
                            acc / (T - series[i].first));
  }
  const double full = out.values.front().second;
  if (full != 0.0)
    out.tail_fraction =
        tail_outer / ((T - series.front().first) * full);
  out.tail_flagged = out.tail_fraction > 0.1;
  return out;
}

}  // namespace nlslab
