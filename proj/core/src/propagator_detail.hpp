#pragma once

// Internals shared between the propagator and the fidelity kernels: cached
// trig tables and the sine-synthesis kernel behind amplitude_row/propagate.

#include <memory>
#include <vector>

#include "spinchain/chain.hpp"

namespace spinchain::detail {

// sin(q_m * s) for m = 1..n, q_m = pi*m/(n+1). Arguments are reduced in
// exact integer arithmetic to [0, pi/2] before evaluation, so the lattice
// sine identities (mirror, parity) hold at the double level, not just to
// truncation error. Cached per (n, s); safe for concurrent readers.
std::shared_ptr<const std::vector<double>> sine_table(int n, int s);

// cos(q_m) for m = 1..n, antisymmetric about the band center by
// construction: c_{n+1-m} = -c_m exactly, and c = 0 exactly at m = (n+1)/2.
std::shared_ptr<const std::vector<double>> cosine_table(int n);

// x_j = (2/(n+1)) sum_{m=1}^{n} g_m sin(q_m j) for j = 1..n. Type-I fast
// sine transform above a small-n threshold, direct summation below.
std::vector<Complex> sine_synthesis(int n, const std::vector<Complex>& g);

// cos(jt * c_m) and sin(jt * c_m) for m = 1..n, where c is the cosine table.
// The band-center antisymmetry of c is mirrored exactly, halving the libm
// work and keeping the parity cancellations bit-exact.
void phase_table(int n, double jt, std::vector<double>& cos_out,
                 std::vector<double>& sin_out);

// w_j = sum_s alpha_s f_{s,j}(t): the spectral weights of all senders are
// merged first, so the whole superposition costs one synthesis.
std::vector<Complex> row_superposition(const ChainSpec& chain,
                                       const std::vector<SiteAmplitude>& amps,
                                       double t);

}  // namespace spinchain::detail
