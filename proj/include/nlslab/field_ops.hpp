#ifndef NLSLAB_FIELD_OPS_HPP
#define NLSLAB_FIELD_OPS_HPP

#include <array>
#include <tuple>

#include "nlslab/grid.hpp"

namespace nlslab {

// Conserved functionals, rectangle rule on the periodic grid.
double mass(const Field& u);
double energy(const Field& u);
std::array<double, 2> momentum(const Field& u);

double l2_norm(const Field& u);
double grad_l2_sq(const Field& u);  // ||grad u||_{L2}^2, spectral
double lp_norm_pow(const Field& u, double p);  // integral of |u|^p
double l2_distance(const Field& a, const Field& b);
double h1_distance(const Field& a, const Field& b);

cplx inner(const Field& a, const Field& b);  // integral of a * conj(b)

// Gradient components as fields (spectral differentiation).
std::array<Field, 2> gradient(const Field& u);

// Fraction of mass in the region |x - center|_inf > box/4 (unwrapped
// coordinates).  Used as the BoundaryMass guard for |x|-weighted
// quantities on the periodic box.
double boundary_mass_fraction(const Field& u);
void require_interior_mass(const Field& u, double tol = 1e-6);

struct SigmaNorm {
  double h1 = 0.0;      // (||u||^2 + ||grad u||^2)^{1/2}
  double weighted = 0.0;  // ||x u||_{L2}
  double total = 0.0;   // h1 + weighted
};
SigmaNorm sigma_norm(const Field& u);
double sigma_distance(const Field& a, const Field& b);

// Power nonlinearity f(z) = |z|^{4/d} z and its Taylor layers.
// The second layer is the exact remainder f(U+R) - f(U) - f'(U).R.
struct NonlinearityLayers {
  Field f_u;
  Field fprime_r;
  Field fsecond_r2;
};
NonlinearityLayers nonlinearity_layers(const Field& U, const Field& R);

cplx nonlinearity(cplx z, int d);
cplx nonlinearity_fprime(cplx U, cplx R, int d);

// ||u||_{L^p} / (||u||_{L2}^{1-s} ||grad u||_{L2}^{s}), s = d(1/2 - 1/p).
double gagliardo_nirenberg_ratio(const Field& u, double p);

}  // namespace nlslab

#endif
