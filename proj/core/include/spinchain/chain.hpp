#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "spinchain/errors.hpp"

namespace spinchain {

using Complex = std::complex<double>;

/// Uniform linear XY chain with a global z-field: N sites, nearest-neighbor
/// exchange J > 0, field h. Energies carry hbar = 1; times are in units of
/// hbar/J (tables assume J = 1).
struct ChainSpec {
  int n_sites = 1;
  double coupling = 1.0;
  double field = 0.0;
};

/// Validates and builds a ChainSpec. Rejects n_sites < 1, non-positive or
/// non-finite coupling, and non-finite field.
ChainSpec make_chain(int n_sites, double coupling, double field);

/// Single-excitation mode data of a chain:
///   wavenumbers q_m = pi*m/(N+1), energies E_m = 2h - 2J*cos(q_m), m = 1..N.
/// Pure function of the ChainSpec; rebuilding gives bit-identical arrays.
struct ModeTable {
  std::vector<double> wavenumbers;
  std::vector<double> energies;
};

ModeTable make_mode_table(const ChainSpec& chain);

struct SiteAmplitude {
  int site = 0;  // 1-based
  Complex value;
};

/// State in the vacuum + single-excitation sector: a vacuum amplitude plus a
/// sparse, site-sorted list of excitation amplitudes. region_size is the
/// largest occupied site (0 for the pure vacuum).
struct EncodingState {
  Complex vacuum_amplitude;
  std::vector<SiteAmplitude> excitation_amplitudes;
  int region_size = 0;
};

/// Validates sites (1..n_sites, no duplicates), drops exact zeros, sorts by
/// site, and renormalizes when the norm is within 1e-6 of unity; errors
/// otherwise. Post: |alpha0|^2 + sum |alpha_j|^2 = 1 within 1e-12.
EncodingState make_encoding(int n_sites, Complex vacuum_amplitude,
                            std::vector<SiteAmplitude> amplitudes);

double norm_squared(const EncodingState& enc);

/// Fully propagated state: vacuum amplitude plus a dense amplitude w_j for
/// every site j = 1..N (stored at index j-1).
struct PropagatedState {
  Complex vacuum_amplitude;
  std::vector<Complex> site_amplitudes;
  double time = 0.0;
};

// Encoding file schema, consumed and produced by the CLI:
//   {"n": N, "alpha0": [re, im], "amps": [{"site": j, "re": x, "im": y}, ...]}
// amps sorted by site; numbers written with 17 significant digits.
std::string encoding_to_json(const EncodingState& enc, int n_sites);

/// Parses the schema above; the state is re-validated through make_encoding.
/// Returns the state together with the chain length it was written for.
std::pair<EncodingState, int> encoding_from_json(const std::string& text);

}  // namespace spinchain
