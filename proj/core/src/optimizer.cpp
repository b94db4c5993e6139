#include "spinchain/optimizer.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace spinchain {

namespace detail {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        std::throw_with_nested(
            sweep_error(i, "sweep: objective failed at grid index " +
                               std::to_string(i)));
      }
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  const int spawned = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  pool.reserve(spawned);
  for (int w = 0; w < spawned; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (...) {
      std::throw_with_nested(
          sweep_error(failed_index,
                      "sweep: objective failed at grid index " +
                          std::to_string(failed_index)));
    }
  }
}

}  // namespace detail

namespace {

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

// Golden-section maximization on [lo, hi]; assumes the bracket holds a
// single local peak. Returns the best point ever evaluated.
Sample golden_section(const std::function<double(double)>& objective,
                      double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  Sample best = f1 >= f2 ? Sample{x1, f1} : Sample{x2, f2};
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
      if (f2 > best.value) best = {x2, f2};
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
      if (f1 > best.value) best = {x1, f1};
    }
  }
  return best;
}

}  // namespace

PeakResult find_peak(const std::function<double(double)>& objective,
                     double t_lo, double t_hi,
                     const FindPeakOptions& options) {
  if (!(t_lo < t_hi)) {
    throw std::invalid_argument("find_peak: empty window");
  }
  if (!(options.coarse_step > 0.0)) {
    throw std::invalid_argument("find_peak: coarse_step must be positive");
  }

  const double span = t_hi - t_lo;
  const std::size_t intervals =
      static_cast<std::size_t>(std::floor(span / options.coarse_step));
  std::vector<double> grid;
  grid.reserve(intervals + 2);
  for (std::size_t i = 0; i <= intervals; ++i) {
    grid.push_back(t_lo + static_cast<double>(i) * options.coarse_step);
  }
  if (grid.back() < t_hi) grid.push_back(t_hi);

  const std::vector<double> values = sweep<double>(
      grid.size(), [&](std::size_t i) { return objective(grid[i]); },
      options.workers);

  double best_value = values[0];
  for (double v : values) best_value = std::max(best_value, v);
  // Ties within 1e-9 resolve to the smallest time.
  std::size_t best = 0;
  while (values[best] < best_value - 1e-9) ++best;

  Sample coarse_best{grid[best], values[best]};
  const double bracket_lo =
      std::max(t_lo, coarse_best.t - 2.0 * options.coarse_step);
  const double bracket_hi =
      std::min(t_hi, coarse_best.t + 2.0 * options.coarse_step);
  Sample refined = coarse_best;
  if (bracket_hi - bracket_lo > options.time_tolerance) {
    const Sample golden = golden_section(objective, bracket_lo, bracket_hi,
                                         options.time_tolerance);
    if (golden.value > refined.value) refined = golden;
  }

  return PeakResult{refined.t,          refined.value,
                    t_lo,              t_hi,
                    options.coarse_step, options.time_tolerance};
}

PeakResult find_peak_enveloped(const std::function<double(double)>& objective,
                               int n_sites, const FindPeakOptions& options,
                               double full_window_step) {
  if (n_sites < 1) {
    throw std::invalid_argument("find_peak_enveloped: n_sites must be >= 1");
  }
  const double window_hi = static_cast<double>(n_sites);

  // Documented coarse full-window scan the focused result must dominate.
  FindPeakOptions coarse_options = options;
  coarse_options.coarse_step = full_window_step;
  // A tolerance wider than the refinement bracket suppresses the golden
  // pass: this stage is scan-only.
  coarse_options.time_tolerance = 5.0 * full_window_step;
  const PeakResult coarse = find_peak(objective, 0.0, window_hi,
                                      coarse_options);

  const double focus_lo = 0.45 * window_hi;
  const double focus_hi = 0.60 * window_hi;
  PeakResult focused = find_peak(objective, focus_lo, focus_hi, options);

  if (coarse.fidelity > focused.fidelity + 1e-12) {
    // Arrival peak fell outside the envelope; fall back to the full window.
    focused = find_peak(objective, 0.0, window_hi, options);
  }
  focused.window_lo = 0.0;
  focused.window_hi = window_hi;
  return focused;
}

FieldOptimum optimal_field(const FieldDecomposition& decomp) {
  const double t = decomp.time;
  const double abs_l = std::abs(decomp.L);
  if (t <= 0.0) {
    // The field enters only through exp(2iht); at t = 0 it cannot rotate L.
    return FieldOptimum{0.0, std::numeric_limits<double>::infinity(),
                        decomp.L.real()};
  }
  const double period = std::acos(-1.0) / t;
  if (abs_l == 0.0) {
    return FieldOptimum{0.0, period, 0.0};
  }
  const double arg_l = std::atan2(decomp.L.imag(), decomp.L.real());
  double h_star = std::fmod(-arg_l / (2.0 * t), period);
  if (h_star < 0.0) h_star += period;
  if (h_star >= period) h_star = 0.0;
  return FieldOptimum{h_star, period, abs_l};
}

ZeroFieldBehavior h0_parity_prediction(int n_sites, int k) {
  if (n_sites % 2 == 0) return ZeroFieldBehavior::Indeterminate;
  if (k % 2 == 0) {
    return (n_sites % 4 == 3) ? ZeroFieldBehavior::MaxAtZeroField
                              : ZeroFieldBehavior::MinAtZeroField;
  }
  return (n_sites % 4 == 1) ? ZeroFieldBehavior::MaxAtZeroField
                            : ZeroFieldBehavior::MinAtZeroField;
}

}  // namespace spinchain
