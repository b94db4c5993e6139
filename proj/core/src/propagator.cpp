#include "spinchain/propagator.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>
#include <fftw3.h>

#include "propagator_detail.hpp"

namespace spinchain {

namespace detail {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Below this the O(n^2) direct synthesis beats transform setup.
constexpr int kTransformThreshold = 32;

// sin(pi * r / (n+1)) with r reduced exactly modulo the period. Reduction
// lands in [0, (n+1)/2] so libm only ever sees arguments in [0, pi/2].
double lattice_sine(std::int64_t r, int n) {
  const std::int64_t period = 2LL * (n + 1);
  r %= period;
  if (r < 0) r += period;
  double sign = 1.0;
  if (r > n) {  // sin(pi + x) = -sin(x)
    r -= n + 1;
    sign = -1.0;
  }
  if (2 * r > n + 1) r = (n + 1) - r;  // sin(pi - x) = sin(x)
  if (r == 0) return 0.0;
  return sign * std::sin(kPi * static_cast<double>(r) / (n + 1));
}

struct TableCaches {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>>
      sines;
  std::unordered_map<int, std::shared_ptr<const std::vector<double>>> cosines;
};

TableCaches& caches() {
  static TableCaches c;
  return c;
}

// Bound the caches: sweeps over many chain lengths would otherwise pin an
// unbounded set of length-N tables.
constexpr std::size_t kMaxCachedTables = 256;

}  // namespace

std::shared_ptr<const std::vector<double>> sine_table(int n, int s) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(s);
  auto& c = caches();
  {
    std::lock_guard<std::mutex> lock(c.mutex);
    auto it = c.sines.find(key);
    if (it != c.sines.end()) return it->second;
  }
  auto table = std::make_shared<std::vector<double>>(n);
  for (int m = 1; m <= n; ++m) {
    (*table)[m - 1] = lattice_sine(static_cast<std::int64_t>(m) * s, n);
  }
  std::lock_guard<std::mutex> lock(c.mutex);
  if (c.sines.size() >= kMaxCachedTables) c.sines.clear();
  return c.sines.try_emplace(key, std::move(table)).first->second;
}

std::shared_ptr<const std::vector<double>> cosine_table(int n) {
  auto& c = caches();
  {
    std::lock_guard<std::mutex> lock(c.mutex);
    auto it = c.cosines.find(n);
    if (it != c.cosines.end()) return it->second;
  }
  auto table = std::make_shared<std::vector<double>>(n);
  for (int m = 1; 2 * m <= n; ++m) {
    (*table)[m - 1] = std::cos(kPi * m / (n + 1));
    (*table)[n - m] = -(*table)[m - 1];
  }
  if (n % 2 == 1) (*table)[(n - 1) / 2] = 0.0;
  std::lock_guard<std::mutex> lock(c.mutex);
  if (c.cosines.size() >= kMaxCachedTables) c.cosines.clear();
  return c.cosines.try_emplace(n, std::move(table)).first->second;
}

namespace {

// FFTW RODFT00 plans per length. Plan creation is serialized (the planner is
// not thread-safe); execution through fftw_execute_r2r on caller-owned
// buffers is. FFTW_UNALIGNED keeps new-array execution valid for plain
// std::vector storage.
fftw_plan dst_plan(int n) {
  static std::mutex mutex;
  static std::unordered_map<int, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> in(n), out(n);
  fftw_plan plan = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(n, plan);
  return plan;
}

}  // namespace

void phase_table(int n, double jt, std::vector<double>& cos_out,
                 std::vector<double>& sin_out) {
  const auto cosines = cosine_table(n);
  cos_out.resize(n);
  sin_out.resize(n);
  for (int m = 1; 2 * m <= n; ++m) {
    const double angle = jt * (*cosines)[m - 1];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    cos_out[m - 1] = c;
    sin_out[m - 1] = s;
    cos_out[n - m] = c;    // cos is even in the mirrored angle
    sin_out[n - m] = -s;   // sin is odd
  }
  if (n % 2 == 1) {
    cos_out[(n - 1) / 2] = 1.0;
    sin_out[(n - 1) / 2] = 0.0;
  }
}

std::vector<Complex> sine_synthesis(int n, const std::vector<Complex>& g) {
  std::vector<Complex> x(n);
  const double scale = 2.0 / (n + 1);
  if (n < kTransformThreshold) {
    for (int j = 1; j <= n; ++j) {
      Complex acc = 0.0;
      for (int m = 1; m <= n; ++m) {
        acc += g[m - 1] * lattice_sine(static_cast<std::int64_t>(m) * j, n);
      }
      x[j - 1] = scale * acc;
    }
    return x;
  }
  fftw_plan plan = dst_plan(n);
  std::vector<double> in(n), out(n);
  // RODFT00 supplies the factor 2 in Y_k = 2 sum_j X_j sin(...).
  for (int m = 0; m < n; ++m) in[m] = g[m].real();
  fftw_execute_r2r(plan, in.data(), out.data());
  for (int j = 0; j < n; ++j) x[j].real(out[j] / (n + 1));
  for (int m = 0; m < n; ++m) in[m] = g[m].imag();
  fftw_execute_r2r(plan, in.data(), out.data());
  for (int j = 0; j < n; ++j) x[j].imag(out[j] / (n + 1));
  return x;
}

std::vector<Complex> row_superposition(const ChainSpec& chain,
                                       const std::vector<SiteAmplitude>& amps,
                                       double t) {
  const int n = chain.n_sites;
  // Merged spectral weights: A_m = sum_s alpha_s sin(q_m s).
  std::vector<Complex> g(n, Complex{});
  for (const auto& a : amps) {
    const auto sines = sine_table(n, a.site);
    for (int m = 0; m < n; ++m) g[m] += a.value * (*sines)[m];
  }
  // e^{-i E_m t} = e^{-2iht} e^{2iJt cos(q_m)}; the field factor is a global
  // phase and is applied after synthesis.
  std::vector<double> pc, ps;
  phase_table(n, 2.0 * chain.coupling * t, pc, ps);
  for (int m = 0; m < n; ++m) g[m] *= Complex{pc[m], ps[m]};
  std::vector<Complex> w = sine_synthesis(n, g);
  if (chain.field != 0.0) {
    const double ht = -2.0 * chain.field * t;
    const Complex field_phase{std::cos(ht), std::sin(ht)};
    for (auto& v : w) v *= field_phase;
  }
  return w;
}

}  // namespace detail

namespace {

void check_site(const ChainSpec& chain, int site, const char* what) {
  if (site < 1 || site > chain.n_sites) {
    std::ostringstream msg;
    msg << what << ": site " << site << " out of range 1.."
        << chain.n_sites;
    throw std::invalid_argument(msg.str());
  }
}

void check_time(double t, const char* what) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": time must be finite");
  }
}

// Field-free amplitude f~_{s,j}(t) by direct mode summation.
Complex reduced_point(const ChainSpec& chain, int s, int j, double t) {
  const int n = chain.n_sites;
  const auto sines_s = detail::sine_table(n, s);
  const auto sines_j = detail::sine_table(n, j);
  std::vector<double> pc, ps;
  detail::phase_table(n, 2.0 * chain.coupling * t, pc, ps);
  double re = 0.0, im = 0.0;
  for (int m = 0; m < n; ++m) {
    const double weight = (*sines_s)[m] * (*sines_j)[m];
    re += weight * pc[m];
    im += weight * ps[m];
  }
  const double scale = 2.0 / (n + 1);
  return Complex{scale * re, scale * im};
}

Complex field_phase(const ChainSpec& chain, double t) {
  if (chain.field == 0.0) return Complex{1.0, 0.0};
  const double ht = -2.0 * chain.field * t;
  return Complex{std::cos(ht), std::sin(ht)};
}

void check_unitarity(const PropagatedState& state, const char* what) {
  double sum = std::norm(state.vacuum_amplitude);
  for (const auto& w : state.site_amplitudes) sum += std::norm(w);
  if (std::abs(sum - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << what << ": propagated norm^2 = " << sum
        << " deviates from 1 beyond 1e-10";
    throw numerical_error(msg.str());
  }
}

void check_encoding_for_chain(const ChainSpec& chain, const EncodingState& enc,
                              const char* what) {
  if (enc.region_size > chain.n_sites) {
    std::ostringstream msg;
    msg << what << ": encoding occupies site " << enc.region_size
        << " beyond chain length " << chain.n_sites;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Complex amplitude(const ChainSpec& chain, int s, int j, double t) {
  check_site(chain, s, "amplitude");
  check_site(chain, j, "amplitude");
  check_time(t, "amplitude");
  return field_phase(chain, t) * reduced_point(chain, s, j, t);
}

ReducedAmplitude reduced_amplitude(const ChainSpec& chain, int s, int j,
                                   double t) {
  check_site(chain, s, "reduced_amplitude");
  check_site(chain, j, "reduced_amplitude");
  check_time(t, "reduced_amplitude");
  const Complex value = reduced_point(chain, s, j, t);
  const bool equal_parity = (s % 2) == (j % 2);
  const double kept = equal_parity ? value.real() : value.imag();
  const double discarded = equal_parity ? value.imag() : value.real();
  if (std::abs(discarded) >= 1e-10) {
    std::ostringstream msg;
    msg << "reduced_amplitude: component that must vanish by parity is "
        << discarded << " for N=" << chain.n_sites << " s=" << s << " j=" << j
        << " t=" << t;
    throw numerical_error(msg.str());
  }
  return ReducedAmplitude{
      equal_parity ? ParityClass::PurelyReal : ParityClass::PurelyImaginary,
      kept, s, j, t};
}

std::vector<Complex> amplitude_row(const ChainSpec& chain, int s, double t) {
  check_site(chain, s, "amplitude_row");
  check_time(t, "amplitude_row");
  const int n = chain.n_sites;
  const auto sines = detail::sine_table(n, s);
  std::vector<double> pc, ps;
  detail::phase_table(n, 2.0 * chain.coupling * t, pc, ps);
  std::vector<Complex> g(n);
  for (int m = 0; m < n; ++m) {
    g[m] = (*sines)[m] * Complex{pc[m], ps[m]};
  }
  std::vector<Complex> row = detail::sine_synthesis(n, g);
  const Complex phase = field_phase(chain, t);
  if (phase != Complex{1.0, 0.0}) {
    for (auto& v : row) v *= phase;
  }
  return row;
}

PropagatedState propagate(const ChainSpec& chain, const EncodingState& enc,
                          double t) {
  check_time(t, "propagate");
  check_encoding_for_chain(chain, enc, "propagate");
  PropagatedState state;
  state.vacuum_amplitude = enc.vacuum_amplitude;
  state.time = t;
  state.site_amplitudes =
      detail::row_superposition(chain, enc.excitation_amplitudes, t);
  check_unitarity(state, "propagate");
  return state;
}

PropagatedState dense_oracle(const ChainSpec& chain, const EncodingState& enc,
                             double t) {
  constexpr int kMaxDenseSites = 4096;
  const int n = chain.n_sites;
  if (n > kMaxDenseSites) {
    throw std::invalid_argument(
        "dense_oracle: N = " + std::to_string(n) + " exceeds the dense guard " +
        std::to_string(kMaxDenseSites));
  }
  check_time(t, "dense_oracle");
  check_encoding_for_chain(chain, enc, "dense_oracle");

  // Single-excitation block relative to the zero-energy vacuum: uniform
  // diagonal 2h, hopping -J. Its spectrum is E_m = 2h - 2J cos(q_m).
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    block(i, i) = 2.0 * chain.field;
    if (i + 1 < n) {
      block(i, i + 1) = -chain.coupling;
      block(i + 1, i) = -chain.coupling;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("dense_oracle: eigendecomposition failed");
  }
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const Eigen::VectorXd& energies = solver.eigenvalues();

  Eigen::VectorXcd input = Eigen::VectorXcd::Zero(n);
  for (const auto& a : enc.excitation_amplitudes) input(a.site - 1) = a.value;

  Eigen::VectorXcd modal = vectors.transpose() * input;
  for (int m = 0; m < n; ++m) {
    const double angle = -energies(m) * t;
    modal(m) *= Complex{std::cos(angle), std::sin(angle)};
  }
  Eigen::VectorXcd evolved = vectors * modal;

  PropagatedState state;
  state.vacuum_amplitude = enc.vacuum_amplitude;
  state.time = t;
  state.site_amplitudes.assign(evolved.data(), evolved.data() + n);
  check_unitarity(state, "dense_oracle");
  return state;
}

}  // namespace spinchain
