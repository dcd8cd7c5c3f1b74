#ifndef NLSLAB_FFT_HPP
#define NLSLAB_FFT_HPP

#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab::fft {

// Unnormalized forward / normalized inverse complex transforms on the
// grid layout of Field.  Plans are cached per shape and reused.
void forward(std::vector<cplx>& data, const Grid& g);
void inverse(std::vector<cplx>& data, const Grid& g);  // divides by N

std::vector<cplx> spectrum(const Field& u);  // forward copy

}  // namespace nlslab::fft

#endif
