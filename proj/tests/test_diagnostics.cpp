#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlslab/diagnostics.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/field_ops.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace nlslab;

namespace {

const GroundState& gs1() {
  static GroundState gs = GroundState::compute(1);
  return gs;
}

ProfileSpec two_bubble_spec() {
  ProfileSpec s;
  s.frame = ProfileSpec::Frame::blowup;
  s.K = 2;
  s.T = 1.0;
  s.bubbles = {{1.0, {-5.0, 0.0}, 0.2}, {0.9, {5.0, 0.0}, -0.4}};
  return s;
}

std::vector<std::array<double, 2>> centers_of(const ProfileSpec& s) {
  std::vector<std::array<double, 2>> out;
  for (const auto& b : s.bubbles) out.push_back(b.center);
  return out;
}

Decomposition exact_decomposition(const ProfileSpec& spec, double t,
                                  const Grid& g, const Localization& loc) {
  Field v = make_S_sum(gs1(), spec, t, g);
  return decompose(v, pseudo_conformal_params(spec, t), spec, gs1(), loc);
}

Decomposition perturbed_decomposition(const ProfileSpec& spec, double t,
                                      const Grid& g, const Localization& loc,
                                      double eps, Rng& rng) {
  Field v = make_S_sum(gs1(), spec, t, g);
  ModParams guess = pseudo_conformal_params(spec, t);
  for (std::size_t k = 0; k < guess.bubbles.size(); ++k) {
    Field pert = synthetic::null_free_perturbation(
        gs1(), guess.bubbles[k], g, rng);
    for (std::size_t i = 0; i < v.values.size(); ++i)
      v.values[i] += eps * pert.values[i];
  }
  return decompose(v, guess, spec, gs1(), loc);
}

}  // namespace

TEST_CASE("cutoff family satisfies the psi constraints on a fine grid") {
  CutoffFamily cut(10.0);
  double min_pp = 1e300, min_diff = 1e300, max_ratio = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double r = 5.0 * i / 10000.0;
    const double pp = cut.psi_pp(r);
    min_pp = std::min(min_pp, pp);
    min_diff = std::min(min_diff, cut.psi_p(r) / r - pp);
    max_ratio = std::max(max_ratio, std::abs(cut.psi_ppp(r) / pp));
  }
  CHECK(min_pp > 0.0);
  CHECK(min_diff >= -1e-14);
  CHECK(max_ratio < 40.0);

  // grad chi_A(x) = x inside |x| <= A
  for (double r : {0.5, 3.0, 9.99})
    CHECK(cut.grad_chiA(r) == doctest::Approx(r).epsilon(1e-14));

  // exponential plateau cutoff
  CHECK(cut.phiA(5.0) == 1.0);
  CHECK(cut.phiA(25.0) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
  double max_log_slope = 0.0;
  for (int i = 1; i < 4000; ++i) {
    const double r = 40.0 * i / 4000.0;
    const double h = 1e-4;
    const double slope = (std::log(cut.phiA(r + h)) -
                          std::log(cut.phiA(std::max(0.0, r - h)))) /
                         (2 * h);
    max_log_slope = std::max(max_log_slope, std::abs(slope));
  }
  CHECK(max_log_slope < 1.0);  // |grad phi / phi| <= C with C ~ 1/A scale

  // compact quadratic cutoff: w <= r^2, quadratic core, compact support
  CHECK(cut.varphi_profile(0.5) == 0.25);
  CHECK(cut.varphi_profile(2.5) == 0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double r = 2.5 * i / 4000.0;
    const double w = cut.varphi_profile(r);
    CHECK(w <= r * r + 1e-15);
    const double h = 1e-5;
    const double wp = (cut.varphi_profile(r + h) -
                       cut.varphi_profile(std::max(0.0, r - h))) /
                      (2 * h);
    if (w > 1e-12) CHECK(wp * wp / w < 64.0);
  }
}

TEST_CASE("localized virial on exact data is the gamma/lambda constant") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  const ProfileSpec spec = two_bubble_spec();
  Localization loc = build_localization(centers_of(spec), g);
  CutoffFamily cut(10.0);
  double expected = 0.0;
  for (const auto& b : spec.bubbles)
    expected -= b.omega / 4.0 * gs1().constants().xQ2;
  for (double t : {0.4, 0.6}) {
    Decomposition dec = exact_decomposition(spec, t, g, loc);
    CHECK(std::abs(localized_virial(dec, cut, gs1(), loc) - expected) <
          1e-9);
  }
}

TEST_CASE("localized virial bound and vanishing morawetz part") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  Rng rng(7);
  const ProfileSpec spec = two_bubble_spec();
  Localization loc = build_localization(centers_of(spec), g);
  CutoffFamily cut(10.0);
  Decomposition dec = perturbed_decomposition(spec, 0.5, g, loc, 1e-3, rng);
  const Field& R = dec.remainder;
  const double bound_arg =
      std::sqrt(grad_l2_sq(R)) * l2_norm(R) +
      std::abs(dec.params.bubbles[0].gamma / dec.params.bubbles[0].lambda) +
      std::abs(dec.params.bubbles[1].gamma / dec.params.bubbles[1].lambda);
  const double L = localized_virial(dec, cut, gs1(), loc);
  CHECK(std::abs(L) <= (cut.A() + gs1().constants().xQ2) * bound_arg);

  // purely real remainder on a real-phase configuration
  Decomposition real_dec;
  real_dec.params.t = 0.0;
  real_dec.params.bubbles = {{1.0, {-5.0, 0.0}, {0.0, 0.0}, 0.0, 0.0},
                             {1.0, {5.0, 0.0}, {0.0, 0.0}, 0.0, 0.0}};
  real_dec.remainder = Field(g);
  for (int i = 0; i < g.n[0]; ++i)
    real_dec.remainder.values[i] =
        std::exp(-0.2 * g.coord(0, i) * g.coord(0, i));
  auto mor = morawetz_terms(real_dec, cut, loc);
  CHECK(std::abs(mor[0]) < 1e-14);
  CHECK(std::abs(mor[1]) < 1e-14);
}

TEST_CASE("modified localized virial: constant on exact data, k=1 algebra") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  const ProfileSpec spec = two_bubble_spec();
  Localization loc = build_localization(centers_of(spec), g);
  CutoffFamily cut(10.0);
  Decomposition dec = exact_decomposition(spec, 0.5, g, loc);
  double expected = 0.0;
  for (const auto& b : spec.bubbles)
    expected -= b.omega * b.omega / 8.0 * gs1().constants().xQ2;
  CHECK(std::abs(modified_localized_virial(dec, cut, gs1(), loc) -
                 expected) < 1e-9);

  // K=1 identity: Ltilde = (gamma/lambda) L + gamma^2/(8 lambda^2) ||xQ||^2
  Rng rng(11);
  ProfileSpec one;
  one.frame = ProfileSpec::Frame::blowup;
  one.K = 1;
  one.T = 1.0;
  one.bubbles = {{1.0, {0.0, 0.0}, 0.0}};
  Localization loc1 = build_localization(centers_of(one), g);
  Decomposition d1 = perturbed_decomposition(one, 0.5, g, loc1, 1e-3, rng);
  const double gl = d1.params.bubbles[0].gamma / d1.params.bubbles[0].lambda;
  const double lhs = modified_localized_virial(d1, cut, gs1(), loc1);
  const double rhs = gl * localized_virial(d1, cut, gs1(), loc1) +
                     gl * gl / 8.0 * gs1().constants().xQ2;
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("generalized energy: zero remainder, quadratic scaling") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  const ProfileSpec spec = two_bubble_spec();
  Localization loc = build_localization(centers_of(spec), g);
  CutoffFamily cut(10.0);
  Decomposition dec = exact_decomposition(spec, 0.5, g, loc);
  CHECK(std::abs(generalized_energy(dec, cut, gs1(), loc)) < 1e-9);

  // scale the injected remainder: I(eps R)/eps^2 converges as eps -> 0
  Rng rng(13);
  Field base = make_S_sum(gs1(), spec, 0.5, g);
  ModParams params = pseudo_conformal_params(spec, 0.5);
  Field pert = synthetic::null_free_perturbation(
      gs1(), params.bubbles[0], g, rng);
  std::vector<double> q;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    Field v = base;
    for (std::size_t i = 0; i < v.values.size(); ++i)
      v.values[i] += eps * pert.values[i];
    Decomposition d = decompose(v, params, spec, gs1(), loc);
    q.push_back(generalized_energy(d, cut, gs1(), loc) / (eps * eps));
  }
  CHECK(std::abs(q[2] - q[1]) < 0.2 * std::abs(q[1] - q[0]) + 1e-12);
  CHECK(q[2] > 0.0);  // quadratic coercivity on null-free remainders

  // quadratic dominance: I >= c D^2/(T-t)^2 with a positive extracted c
  const double tau = spec.T - 0.5;
  Field v = base;
  for (std::size_t i = 0; i < v.values.size(); ++i)
    v.values[i] += 1e-4 * pert.values[i];
  Decomposition d = decompose(v, params, spec, gs1(), loc);
  auto sc = remainder_scalars(d, spec, spec.T);
  const double c_extracted = generalized_energy(d, cut, gs1(), loc) /
                             (sc.D * sc.D / (tau * tau));
  CHECK(c_extracted > 0.0);
}

TEST_CASE("interior virial: zero remainder and parity zero") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  const ProfileSpec spec = two_bubble_spec();
  Localization loc = build_localization(centers_of(spec), g);
  Decomposition dec = exact_decomposition(spec, 0.5, g, loc);
  CHECK(std::abs(interior_virial(dec, centers_of(spec), loc.sigma, loc)) <
        1e-10);

  // radial real remainder, single centered bubble
  ProfileSpec one;
  one.frame = ProfileSpec::Frame::blowup;
  one.K = 1;
  one.T = 1.0;
  one.bubbles = {{1.0, {0.0, 0.0}, 0.0}};
  Localization loc1 = build_localization(centers_of(one), g);
  Decomposition d1;
  d1.params.t = 0.0;
  d1.params.bubbles = {{0.5, {0.0, 0.0}, {0.0, 0.0}, 0.25, 0.0}};
  d1.remainder = Field(g);
  for (int i = 0; i < g.n[0]; ++i)
    d1.remainder.values[i] =
        std::exp(-0.3 * g.coord(0, i) * g.coord(0, i));
  CHECK(std::abs(interior_virial(d1, centers_of(one), 1.0, loc1)) <
        1e-15);

  // |L| <= C ||grad R|| ||R|| with the cutoff plateau constant
  Rng rng(19);
  Decomposition dp = perturbed_decomposition(spec, 0.5, g, loc, 1e-3, rng);
  const double iv = interior_virial(dp, centers_of(spec), loc.sigma, loc);
  const double gate = 2.5 * loc.sigma *
                      std::sqrt(grad_l2_sq(dp.remainder)) *
                      l2_norm(dp.remainder);
  CHECK(std::abs(iv) <= gate);
}

TEST_CASE("soliton virial: zero field and M_A convergence") {
  const Grid g = Grid::line(1024, 40.0, -20.0);
  CutoffFamily cut(10.0);
  SolitonVirial sv0 = soliton_virial(Field(g), cut);
  CHECK(sv0.I == 0.0);
  CHECK(sv0.MA == 0.0);

  Field z(g);
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coord(0, i);
    z.values[i] = cplx(std::exp(-x * x), 0.3 * std::exp(-(x - 1) * (x - 1)));
  }
  double xz2 = 0.0;
  for (int i = 0; i < g.n[0]; ++i)
    xz2 += g.coord(0, i) * g.coord(0, i) * std::norm(z.values[i]);
  xz2 *= g.cell();
  double prev = 0.0;
  for (double A : {2.0, 4.0, 8.0, 16.0}) {
    CutoffFamily ca(A);
    const double ma = soliton_virial(z, ca).MA;
    CHECK(ma >= prev);
    CHECK(ma <= xz2 + 1e-12);
    prev = ma;
  }
  CHECK(std::abs(prev - xz2) < 1e-8);
}

TEST_CASE("energy quantization on exact bubble sums") {
  const Grid g = Grid::line(2048, 64.0, -32.0);
  for (int K = 1; K <= 3; ++K) {
    ProfileSpec spec;
    spec.frame = ProfileSpec::Frame::blowup;
    spec.K = K;
    spec.T = 1.0;
    for (int k = 0; k < K; ++k)
      spec.bubbles.push_back(
          {0.8 + 0.2 * k, {-12.0 + 12.0 * k, 0.0}, 0.3 * k});
    Field v = make_S_sum(gs1(), spec, 0.6, g);
    CHECK(std::abs(energy_quantization_check(v, spec, gs1())) < 1e-6);
  }

  // additivity against a far-away bump
  ProfileSpec one;
  one.frame = ProfileSpec::Frame::blowup;
  one.K = 1;
  one.T = 1.0;
  one.bubbles = {{1.0, {-12.0, 0.0}, 0.0}};
  Field v = make_S(gs1(), one, 0, 0.6, g);
  Field bump(g);
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coord(0, i) - 15.0;
    bump.values[i] = 0.05 * std::exp(-x * x);
  }
  const double e_bump = energy(bump);
  for (std::size_t i = 0; i < v.values.size(); ++i)
    v.values[i] += bump.values[i];
  CHECK(std::abs(energy_quantization_check(v, one, gs1()) - e_bump) < 1e-8);
}

TEST_CASE("rate fits recover synthetic laws") {
  const double T = 1.0;
  std::vector<std::pair<double, double>> pow2, expd, grad;
  for (int i = 0; i < 40; ++i) {
    const double tau = 0.5 * std::pow(10.0, -1.3 * i / 39.0);
    pow2.emplace_back(T - tau, tau * tau);
    expd.emplace_back(T - tau, std::exp(-0.5 / tau));
    const auto& c = gs1().constants();
    grad.emplace_back(T - tau,
                      std::sqrt(c.gradQ2 / (tau * tau) + 0.25 * c.xQ2));
  }
  RateFit f1 = fit_rate(pow2, RateModel::power_T_minus_t, T);
  CHECK(std::abs(f1.exponent - 2.0) < 0.01);
  RateFit f2 = fit_rate(expd, RateModel::exp_inverse_T_minus_t, T);
  CHECK(std::abs(f2.exponent - 0.5) < 0.01);
  RateFit f3 = fit_rate(grad, RateModel::power_T_minus_t, T);
  CHECK(std::abs(f3.exponent + 1.0) < 0.02);

  std::vector<std::pair<double, double>> t_series;
  for (int i = 0; i < 20; ++i) {
    const double t = 2.0 * std::pow(10.0, 1.2 * i / 19.0);
    t_series.emplace_back(t, 3.0 / (t * t * std::sqrt(t)));
  }
  RateFit f4 = fit_rate(t_series, RateModel::power_of_t);
  CHECK(std::abs(f4.exponent + 2.5) < 0.01);

  std::vector<std::pair<double, double>> narrow = {
      {0.1, 1}, {0.2, 1}, {0.3, 1}, {0.4, 1},
      {0.5, 1}, {0.6, 1}, {0.7, 1}, {0.8, 1}};
  CHECK_THROWS_AS((void)fit_rate(narrow, RateModel::power_T_minus_t, T),
                  Error);
}

TEST_CASE("double average: constant, power law, zero") {
  const double T = 1.0;
  std::vector<std::pair<double, double>> flat, pw, zero;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.002 * i;
    flat.emplace_back(t, 3.25);
    pw.emplace_back(t, std::pow(T - t, 0.7));
    zero.emplace_back(t, 0.0);
  }
  auto fa = double_average(flat, T);
  for (const auto& [t, v] : fa.values)
    CHECK(std::abs(v - 3.25) < 1e-6 * 3.25);

  auto pa = double_average(pw, T);
  for (std::size_t i = 0; i < pa.values.size(); i += 40) {
    const auto& [t, v] = pa.values[i];
    const double exact = std::pow(T - t, 0.7) / (1.7 * 1.7);
    CHECK(std::abs(v - exact) < 1e-3 * exact);
  }

  auto za = double_average(zero, T);
  for (const auto& [t, v] : za.values) CHECK(v == 0.0);
}
