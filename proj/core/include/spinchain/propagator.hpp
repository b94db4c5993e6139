#pragma once

#include <vector>

#include "spinchain/chain.hpp"

namespace spinchain {

enum class ParityClass { PurelyReal, PurelyImaginary };

/// Field-free transition amplitude f~_{s,j}(t) collapsed to its single
/// surviving component: purely real when s and j share parity, purely
/// imaginary otherwise. `value` holds that component; the discarded one is
/// checked against 1e-10 before being dropped.
struct ReducedAmplitude {
  ParityClass parity_class = ParityClass::PurelyReal;
  double value = 0.0;
  int s = 0;
  int j = 0;
  double time = 0.0;
};

/// Transition amplitude f_{s,j}(t) = (2/(N+1)) sum_m sin(q_m s) sin(q_m j)
/// exp(-i E_m t). Direct mode sum; O(N) per point.
Complex amplitude(const ChainSpec& chain, int s, int j, double t);

/// f~_{s,j}(t) with f_{s,j}(t) = exp(-2iht) f~_{s,j}(t). Throws
/// numerical_error if the component that must vanish exceeds 1e-10.
ReducedAmplitude reduced_amplitude(const ChainSpec& chain, int s, int j,
                                   double t);

/// One full propagator row [f_{s,1}(t), ..., f_{s,N}(t)]. Uses a type-I fast
/// sine transform (the j-dependence is exactly a DST) above a small-N
/// threshold, direct summation below it; O(N log N).
std::vector<Complex> amplitude_row(const ChainSpec& chain, int s, double t);

/// Evolves an encoding to time t: w_j(t) = sum_s alpha_s f_{s,j}(t), vacuum
/// amplitude carried through unchanged. Checks unitarity to 1e-10.
PropagatedState propagate(const ChainSpec& chain, const EncodingState& enc,
                          double t);

/// Independent verification path: numerically diagonalizes the N x N
/// single-excitation block (tridiagonal, diagonal 2h, off-diagonal -J) and
/// applies exp(-iHt). Shares nothing with the closed-form mode sum. Guarded
/// to N <= 4096.
PropagatedState dense_oracle(const ChainSpec& chain, const EncodingState& enc,
                             double t);

}  // namespace spinchain
