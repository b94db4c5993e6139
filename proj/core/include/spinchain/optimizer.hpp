#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spinchain/fidelity.hpp"

namespace spinchain {

struct PeakResult {
  double t0 = 0.0;
  double fidelity = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double coarse_step = 0.0;
  double refined_tolerance = 0.0;
};

struct FindPeakOptions {
  double coarse_step = 0.1;
  double time_tolerance = 1e-3;
  int workers = 1;  // parallelism of the coarse scan; result is independent
};

/// Window-global peak search: coarse scan at coarse_step over the whole
/// window, then golden-section refinement of the winning bracket (two coarse
/// neighbors on each side) down to time_tolerance. Ties within 1e-9 in value
/// resolve to the smallest t. The returned value never falls below the best
/// coarse sample.
PeakResult find_peak(const std::function<double(double)>& objective,
                     double t_lo, double t_hi,
                     const FindPeakOptions& options = {});

/// Large-N search over [0, N]: a focused 0.45N..0.60N scan at coarse_step
/// (arrival peaks sit near t ~ N/2) refined as in find_peak, validated
/// against a coarse full-window scan at full_window_step. If the full scan
/// finds anything better, the search falls back to the full window at
/// coarse_step, so the result always dominates the documented coarse scan.
PeakResult find_peak_enveloped(const std::function<double(double)>& objective,
                               int n_sites,
                               const FindPeakOptions& options = {},
                               double full_window_step = 1.0);

struct FieldOptimum {
  double h_star = 0.0;   // smallest non-negative optimal field
  double period = 0.0;   // pi/t; fidelity is periodic in h with this period
  double attains = 0.0;  // max over h of Re[e^{2iht} L]
};

/// Field maximizing the xi_k field term: h* = ((-arg L) mod 2pi) / (2t),
/// reduced to [0, pi/t). Degenerate L = 0 gives h* = 0 with attains 0; at
/// t = 0 the field cannot rotate the phase, so h* = 0 with attains Re L.
FieldOptimum optimal_field(const FieldDecomposition& decomp);

enum class ZeroFieldBehavior { MaxAtZeroField, MinAtZeroField, Indeterminate };

/// Parity rule for isolated chains (odd N): with k even the field term is
/// maximized at h = 0 iff N = 3 + 4m; with k odd iff N = 1 + 4m'. Even N
/// (imaginary L) is Indeterminate.
ZeroFieldBehavior h0_parity_prediction(int n_sites, int k);

/// Raised when a sweep objective throws; carries the grid index and nests
/// the original exception.
class sweep_error : public std::runtime_error {
 public:
  sweep_error(std::size_t grid_index, const std::string& what)
      : std::runtime_error(what), grid_index_(grid_index) {}
  std::size_t grid_index() const { return grid_index_; }

 private:
  std::size_t grid_index_;
};

namespace detail {
// Runs fn(0..count-1) on `workers` threads. Exceptions are collected and the
// one at the smallest failing index is rethrown nested inside a sweep_error.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);
}  // namespace detail

/// Evaluates an objective at every grid point, in parallel, with output
/// ordered by grid index regardless of worker count. Objective errors
/// propagate with their grid coordinate attached.
template <typename Result, typename Fn>
std::vector<Result> sweep(std::size_t grid_size, Fn&& objective,
                          int workers = 1) {
  std::vector<Result> results(grid_size);
  detail::parallel_for(grid_size, workers,
                       [&](std::size_t i) { results[i] = objective(i); });
  return results;
}

}  // namespace spinchain
