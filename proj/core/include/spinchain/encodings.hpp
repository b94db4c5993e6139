#pragma once

#include <functional>

#include <Eigen/Core>

#include "spinchain/chain.hpp"

namespace spinchain {

/// Bloch parameters of an encoded qubit spanned by the vacuum and Psi_k:
/// theta in [0, pi], phi in [0, 2pi).
struct XiParameters {
  double theta = 0.0;
  double phi = 0.0;
  int k = 1;
};

/// Psi_k: amplitudes (-1)^m / sqrt(k) on the odd sites 2m+1, m = 0..k-1.
/// Spans the first r = 2k-1 sites. Requires 2k-1 <= N.
EncodingState make_psi_k(const ChainSpec& chain, int k);

/// xi_k = cos(theta/2)|vac> + e^{i phi} sin(theta/2)|Psi_k>.
EncodingState make_xi_k(const ChainSpec& chain, const XiParameters& params);

/// Sender-to-receiver block of the propagator in the single-excitation
/// sector: K(b-1, a-1) = f_{a, N-r+b}(t) for a, b = 1..r. For any encoding
/// vector v over sites 1..r the capture probability is |K v|^2.
Eigen::MatrixXcd transfer_block(const ChainSpec& chain, int r, double t);

/// Top singular triplet of the transfer block. top_singular_value is the
/// post-decoding fidelity F_r = sqrt(C_B(t)).
struct OptimalEncodingResult {
  int region_size = 0;
  double time = 0.0;
  double top_singular_value = 0.0;
  Eigen::VectorXcd encoding;  // unit norm, sites 1..r
  double spectral_gap = 0.0;  // sigma_1 - sigma_2 (sigma_1 itself when r = 1)
};

/// Full SVD of the r x r transfer block. The returned right singular vector
/// has its largest-magnitude component rotated real and positive. When the
/// top singular value is degenerate (gap < 1e-10) the vector in the top
/// subspace closest to Psi_{(r+1)/2} (odd r) or to the uniform vector
/// (even r) is returned, so results stay reproducible.
OptimalEncodingResult optimal_encoding(const ChainSpec& chain, int r,
                                       double t);

/// |Phi_r - Psi|: rotates the optimal vector's global phase to maximize the
/// real part of its overlap with psi, then takes the Euclidean norm of the
/// difference of the two length-r amplitude vectors. psi must be supported
/// on sites 1..r with no vacuum component.
double encoding_distance(const OptimalEncodingResult& opt,
                         const EncodingState& psi);

EncodingState to_encoding_state(const OptimalEncodingResult& opt, int n_sites);

/// Peak-scan objective: t -> sigma_1(transfer_block(chain, r, t)), the
/// post-decoding fidelity F_r(t). The r^2 trig weight tables are built once,
/// so each call costs O(r^2 N) plus a small SVD instead of r transform
/// batches. Report final numbers through optimal_encoding.
std::function<double(double)> transfer_fidelity_objective(
    const ChainSpec& chain, int r);

}  // namespace spinchain
