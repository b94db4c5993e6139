#include "spinchain/encodings.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/SVD>

#include "propagator_detail.hpp"
#include "spinchain/propagator.hpp"

namespace spinchain {

namespace {

void check_region(const ChainSpec& chain, int k, const char* what) {
  if (k < 1) {
    throw std::invalid_argument(std::string(what) + ": k must be >= 1, got " +
                                std::to_string(k));
  }
  if (2 * k - 1 > chain.n_sites) {
    std::ostringstream msg;
    msg << what << ": chain too short, k = " << k << " needs " << 2 * k - 1
        << " sites but N = " << chain.n_sites;
    throw std::invalid_argument(msg.str());
  }
}

// Psi_{(r+1)/2} amplitudes over sites 1..r for odd r, the uniform vector
// otherwise. Used to pick a reproducible representative in a degenerate top
// singular subspace.
Eigen::VectorXcd degenerate_reference(int r) {
  Eigen::VectorXcd ref = Eigen::VectorXcd::Zero(r);
  if (r % 2 == 1) {
    const int k = (r + 1) / 2;
    const double amp = 1.0 / std::sqrt(static_cast<double>(k));
    for (int m = 0; m < k; ++m) ref(2 * m) = (m % 2 == 0) ? amp : -amp;
  } else {
    ref.setConstant(1.0 / std::sqrt(static_cast<double>(r)));
  }
  return ref;
}

// Rotate the global phase so the largest-magnitude component is real and
// positive (ties resolve to the lowest site).
void fix_phase(Eigen::VectorXcd& v) {
  int best = 0;
  double best_mag = std::abs(v(0));
  for (int i = 1; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag) {
      best = i;
      best_mag = mag;
    }
  }
  if (best_mag == 0.0) return;
  v *= std::conj(v(best)) / best_mag;
}

}  // namespace

EncodingState make_psi_k(const ChainSpec& chain, int k) {
  check_region(chain, k, "make_psi_k");
  const double amp = 1.0 / std::sqrt(static_cast<double>(k));
  std::vector<SiteAmplitude> amps;
  amps.reserve(k);
  for (int m = 0; m < k; ++m) {
    amps.push_back({2 * m + 1, Complex{(m % 2 == 0) ? amp : -amp, 0.0}});
  }
  return make_encoding(chain.n_sites, Complex{}, std::move(amps));
}

EncodingState make_xi_k(const ChainSpec& chain, const XiParameters& params) {
  check_region(chain, params.k, "make_xi_k");
  const double pi = std::acos(-1.0);
  if (!(params.theta >= 0.0 && params.theta <= pi)) {
    throw std::invalid_argument("make_xi_k: theta must lie in [0, pi]");
  }
  if (!(params.phi >= 0.0 && params.phi < 2.0 * pi)) {
    throw std::invalid_argument("make_xi_k: phi must lie in [0, 2*pi)");
  }
  const Complex vacuum{std::cos(params.theta / 2.0), 0.0};
  const Complex excitation_factor =
      std::sin(params.theta / 2.0) *
      Complex{std::cos(params.phi), std::sin(params.phi)};
  const EncodingState psi = make_psi_k(chain, params.k);
  std::vector<SiteAmplitude> amps;
  amps.reserve(psi.excitation_amplitudes.size());
  for (const auto& a : psi.excitation_amplitudes) {
    amps.push_back({a.site, excitation_factor * a.value});
  }
  return make_encoding(chain.n_sites, vacuum, std::move(amps));
}

Eigen::MatrixXcd transfer_block(const ChainSpec& chain, int r, double t) {
  if (r < 1 || r > chain.n_sites) {
    throw std::invalid_argument("transfer_block: r = " + std::to_string(r) +
                                " out of range 1.." +
                                std::to_string(chain.n_sites));
  }
  const int n = chain.n_sites;
  Eigen::MatrixXcd block(r, r);
  for (int a = 1; a <= r; ++a) {
    const std::vector<Complex> row = amplitude_row(chain, a, t);
    for (int b = 1; b <= r; ++b) {
      block(b - 1, a - 1) = row[n - r + b - 1];
    }
  }
  return block;
}

OptimalEncodingResult optimal_encoding(const ChainSpec& chain, int r,
                                       double t) {
  const Eigen::MatrixXcd block = transfer_block(chain, r, t);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  OptimalEncodingResult result;
  result.region_size = r;
  result.time = t;
  result.top_singular_value = sigma(0);
  result.spectral_gap = (r > 1) ? sigma(0) - sigma(1) : sigma(0);

  constexpr double kDegenerateGap = 1e-10;
  if (r > 1 && result.spectral_gap < kDegenerateGap) {
    // Project the reference state onto the degenerate top subspace.
    const Eigen::VectorXcd ref = degenerate_reference(r);
    Eigen::VectorXcd projected = Eigen::VectorXcd::Zero(r);
    for (int i = 0; i < r && sigma(0) - sigma(i) < kDegenerateGap; ++i) {
      const Eigen::VectorXcd column = svd.matrixV().col(i);
      projected += column.dot(ref) * column;
    }
    if (projected.norm() > 1e-12) {
      result.encoding = projected / projected.norm();
    } else {
      result.encoding = svd.matrixV().col(0);
    }
  } else {
    result.encoding = svd.matrixV().col(0);
  }
  fix_phase(result.encoding);
  return result;
}

double encoding_distance(const OptimalEncodingResult& opt,
                         const EncodingState& psi) {
  const int r = opt.region_size;
  if (std::abs(psi.vacuum_amplitude) > 1e-12) {
    throw std::invalid_argument(
        "encoding_distance: psi must have no vacuum component");
  }
  if (psi.region_size > r) {
    std::ostringstream msg;
    msg << "encoding_distance: psi occupies site " << psi.region_size
        << " outside 1.." << r;
    throw std::invalid_argument(msg.str());
  }
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(r);
  for (const auto& a : psi.excitation_amplitudes) target(a.site - 1) = a.value;

  Complex overlap = opt.encoding.dot(target);  // sum conj(opt_i) psi_i
  Eigen::VectorXcd aligned = opt.encoding;
  if (std::abs(overlap) > 0.0) aligned *= overlap / std::abs(overlap);
  return (aligned - target).norm();
}

EncodingState to_encoding_state(const OptimalEncodingResult& opt,
                                int n_sites) {
  std::vector<SiteAmplitude> amps;
  for (int i = 0; i < opt.encoding.size(); ++i) {
    if (opt.encoding(i) != Complex{}) {
      amps.push_back({i + 1, opt.encoding(i)});
    }
  }
  return make_encoding(n_sites, Complex{}, std::move(amps));
}

std::function<double(double)> transfer_fidelity_objective(
    const ChainSpec& chain, int r) {
  if (r < 1 || r > chain.n_sites) {
    throw std::invalid_argument("transfer_fidelity_objective: r = " +
                                std::to_string(r) + " out of range 1.." +
                                std::to_string(chain.n_sites));
  }
  const int n = chain.n_sites;

  // Precomputed weights would cost r^2 N doubles; for very large blocks fall
  // back to the batched-row evaluation instead.
  if (static_cast<long long>(r) * r * n > 40'000'000LL) {
    const ChainSpec big_chain = chain;
    return [big_chain, r](double t) {
      return optimal_encoding(big_chain, r, t).top_singular_value;
    };
  }

  // W_{ba}[m] = sin(q_m a) sin(q_m (n-r+b)); the block entry is
  // K_{ba}(t) = (2/(N+1)) sum_m W_{ba}[m] e^{i theta_m} (up to the global
  // field phase, which does not move singular values).
  auto weights =
      std::make_shared<std::vector<std::vector<double>>>(r * r);
  for (int a = 1; a <= r; ++a) {
    const auto sender = detail::sine_table(n, a);
    for (int b = 1; b <= r; ++b) {
      const auto receiver = detail::sine_table(n, n - r + b);
      auto& w = (*weights)[(b - 1) * r + (a - 1)];
      w.resize(n);
      for (int m = 0; m < n; ++m) w[m] = (*sender)[m] * (*receiver)[m];
    }
  }
  const double coupling = chain.coupling;
  return [n, r, coupling, weights](double t) {
    std::vector<double> pc, ps;
    detail::phase_table(n, 2.0 * coupling * t, pc, ps);
    Eigen::MatrixXcd block(r, r);
    const double scale = 2.0 / (n + 1);
    for (int b = 0; b < r; ++b) {
      for (int a = 0; a < r; ++a) {
        const auto& w = (*weights)[b * r + a];
        double re = 0.0, im = 0.0;
        for (int m = 0; m < n; ++m) {
          re += w[m] * pc[m];
          im += w[m] * ps[m];
        }
        block(b, a) = Complex{scale * re, scale * im};
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
    return svd.singularValues()(0);
  };
}

}  // namespace spinchain
