#include "spinchain/fidelity.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "pairwise.hpp"
#include "propagator_detail.hpp"
#include "spinchain/optimizer.hpp"
#include "spinchain/propagator.hpp"

namespace spinchain {

namespace {

void check_k(const ChainSpec& chain, int k, const char* what) {
  if (k < 1) {
    throw std::invalid_argument(std::string(what) + ": k must be >= 1");
  }
  if (2 * k - 1 > chain.n_sites) {
    std::ostringstream msg;
    msg << what << ": chain too short for k = " << k
        << " (N = " << chain.n_sites << ")";
    throw std::invalid_argument(msg.str());
  }
}

double clamp_unit(double f) {
  // Guard the sqrt against -1e-17-style underflow only; genuine violations
  // of F <= 1 are left visible for the property tests.
  return f < 0.0 ? 0.0 : f;
}

// Simpson weights over `count` nodes (count odd) on [0, pi], applied to
// F_max(theta) sin(theta) / 2. Node values are supplied by `value`.
double simpson_average(int count,
                       const std::function<double(double)>& value) {
  const double pi = std::acos(-1.0);
  const double step = pi / (count - 1);
  std::vector<double> terms(count);
  for (int i = 0; i < count; ++i) {
    const double theta = i * step;
    double weight = (i == 0 || i == count - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    terms[i] = weight * value(theta) * std::sin(theta);
  }
  const double integral = detail::pairwise_sum(terms) * step / 3.0;
  return 0.5 * integral;
}

}  // namespace

FieldDecomposition field_decomposition(const ChainSpec& chain, int k,
                                       double t) {
  check_k(chain, k, "field_decomposition");
  const int n = chain.n_sites;
  // C_nu is built from the field-free amplitudes; rows are batched at h = 0.
  const ChainSpec bare{n, chain.coupling, 0.0};
  std::vector<Complex> c(n, Complex{});
  for (int p = 0; p < k; ++p) {
    const std::vector<Complex> row = amplitude_row(bare, 2 * p + 1, t);
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    for (int nu = 0; nu < n; ++nu) c[nu] += sign * row[nu];
  }
  Complex big_l{};
  for (int m = 1; m <= k; ++m) {
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    big_l += sign * std::conj(c[n + 2 * (m - k) - 1]);
  }
  big_l /= static_cast<double>(k);

  // Appendix parity: L is real for odd N, imaginary for even N.
  const double leak = (n % 2 == 1) ? std::abs(big_l.imag())
                                   : std::abs(big_l.real());
  if (leak >= 1e-9) {
    std::ostringstream msg;
    msg << "field_decomposition: L = (" << big_l.real() << ", "
        << big_l.imag() << ") violates the parity structure for N = " << n;
    throw numerical_error(msg.str());
  }
  return FieldDecomposition{big_l, std::move(c), k, t, n};
}

double head_capture_sum(const FieldDecomposition& decomp) {
  const int head = decomp.n_sites + 1 - 2 * decomp.k;
  std::vector<double> terms(head > 0 ? head : 0);
  for (int m = 0; m < head; ++m) terms[m] = std::norm(decomp.C[m]);
  return detail::pairwise_sum(terms);
}

FidelityReport fidelity_direct(const ChainSpec& chain,
                               const EncodingState& enc, double t) {
  const int r = enc.region_size;
  if (r == 0) {
    // The vacuum is a zero-energy eigenstate; it transfers perfectly.
    return FidelityReport{t, 1.0, Variant::CanonicalEq6, std::nullopt};
  }
  const PropagatedState state = propagate(chain, enc, t);
  const int n = chain.n_sites;

  Complex g = std::norm(enc.vacuum_amplitude);
  for (const auto& a : enc.excitation_amplitudes) {
    g += a.value * std::conj(state.site_amplitudes[n - r + a.site - 1]);
  }
  double tail = 0.0;
  if (enc.vacuum_amplitude != Complex{}) {
    std::vector<double> terms(n - r);
    for (int i = 0; i < n - r; ++i) {
      terms[i] = std::norm(state.site_amplitudes[i]);
    }
    tail = std::norm(enc.vacuum_amplitude) * detail::pairwise_sum(terms);
  }
  const double fidelity = std::sqrt(clamp_unit(std::norm(g) + tail));
  return FidelityReport{t, fidelity, Variant::CanonicalEq6, std::nullopt};
}

double fidelity_xi_from(const FieldDecomposition& decomp, double theta,
                        double h, Variant variant) {
  const double s = head_capture_sum(decomp);
  const double half = theta / 2.0;
  const double cos2 = std::cos(half) * std::cos(half);
  const double sin2 = std::sin(half) * std::sin(half);
  const double sin_theta_sq = std::sin(theta) * std::sin(theta);
  const double tail_weight = (variant == Variant::PrintedEq8)
                                 ? 1.0 / (2.0 * decomp.k)
                                 : 1.0 / (4.0 * decomp.k);
  const double f2 = cos2 * cos2 + fidelity_field_term(decomp, theta, h) +
                    sin_theta_sq * tail_weight * s +
                    sin2 * sin2 * std::norm(decomp.L);
  return std::sqrt(clamp_unit(f2));
}

FidelityReport fidelity_xi(const ChainSpec& chain, const XiParameters& params,
                           double t, Variant variant) {
  check_k(chain, params.k, "fidelity_xi");
  if (variant == Variant::CanonicalEq6) {
    return fidelity_direct(chain, make_xi_k(chain, params), t);
  }
  const FieldDecomposition decomp = field_decomposition(chain, params.k, t);
  FidelityReport report{
      t, fidelity_xi_from(decomp, params.theta, chain.field,
                          Variant::PrintedEq8),
      Variant::PrintedEq8, std::nullopt};
  report.components =
      FidelityComponents{std::abs(decomp.L), head_capture_sum(decomp),
                         params.theta, params.phi, chain.field};
  return report;
}

double fidelity_field_term(const FieldDecomposition& decomp, double theta,
                           double h) {
  const double sin_theta = std::sin(theta);
  const double angle = 2.0 * h * decomp.time;
  return 0.5 * sin_theta * sin_theta *
         (std::cos(angle) * decomp.L.real() -
          std::sin(angle) * decomp.L.imag());
}

namespace {

double xi_max_closed_form(double abs_l, double head_sum, int k, double theta,
                          Variant variant) {
  const double half = theta / 2.0;
  const double cos2 = std::cos(half) * std::cos(half);
  const double sin2 = std::sin(half) * std::sin(half);
  const double sin_theta_sq = std::sin(theta) * std::sin(theta);
  const double tail_weight = (variant == Variant::PrintedEq8)
                                 ? 1.0 / (2.0 * k)
                                 : 1.0 / (4.0 * k);
  const double f2 = cos2 * cos2 + 0.5 * sin_theta_sq * abs_l +
                    sin_theta_sq * tail_weight * head_sum +
                    sin2 * sin2 * abs_l * abs_l;
  return std::sqrt(clamp_unit(f2));
}

}  // namespace

double fidelity_xi_max_from(const FieldDecomposition& decomp, double theta,
                            Variant variant) {
  return xi_max_closed_form(std::abs(decomp.L), head_capture_sum(decomp),
                            decomp.k, theta, variant);
}

double fidelity_xi_max(const ChainSpec& chain, int k, double theta, double t,
                       Variant variant) {
  check_k(chain, k, "fidelity_xi_max");
  const FieldDecomposition decomp = field_decomposition(chain, k, t);
  if (variant == Variant::PrintedEq8) {
    return fidelity_xi_max_from(decomp, theta, Variant::PrintedEq8);
  }
  // Ground truth route: evaluate the overlap fidelity at the optimal field.
  const FieldOptimum best = optimal_field(decomp);
  const ChainSpec tuned{chain.n_sites, chain.coupling, best.h_star};
  return fidelity_direct(tuned, make_xi_k(chain, XiParameters{theta, 0.0, k}),
                         t)
      .fidelity;
}

double fidelity_xi_avg_from(const FieldDecomposition& decomp,
                            Variant variant) {
  constexpr int kFineNodes = 4097;
  constexpr int kCoarseNodes = 2049;
  const double abs_l = std::abs(decomp.L);
  const double head_sum = head_capture_sum(decomp);
  const auto value = [&](double theta) {
    return xi_max_closed_form(abs_l, head_sum, decomp.k, theta, variant);
  };
  const double fine = simpson_average(kFineNodes, value);
  const double coarse = simpson_average(kCoarseNodes, value);
  const double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-30);
  if (rel >= 1e-8) {
    std::ostringstream msg;
    msg << "fidelity_xi_avg: quadrature not converged, relative change "
        << rel;
    throw numerical_error(msg.str());
  }
  return fine;
}

double fidelity_xi_avg(const ChainSpec& chain, int k, double t,
                       Variant variant) {
  check_k(chain, k, "fidelity_xi_avg");
  return fidelity_xi_avg_from(field_decomposition(chain, k, t), variant);
}

std::function<double(double)> psi_fidelity_objective(const ChainSpec& chain,
                                                     int k) {
  check_k(chain, k, "psi_fidelity_objective");
  const int n = chain.n_sites;
  const double coupling = chain.coupling;

  // Merge all senders once: B_m = sum_p (-1)^p sin(q_m (2p+1)).
  std::vector<double> merged(n, 0.0);
  for (int p = 0; p < k; ++p) {
    const auto sines = detail::sine_table(n, 2 * p + 1);
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m < n; ++m) merged[m] += sign * (*sines)[m];
  }
  // One weight vector per receiver-window site nu = N + 2(mp - k):
  // W[m] = B_m sin(q_m nu), so C_nu(t) = (2/(N+1)) sum_m W[m] e^{i theta_m}.
  auto weights = std::make_shared<std::vector<std::vector<double>>>(k);
  for (int mp = 1; mp <= k; ++mp) {
    const int nu = n + 2 * (mp - k);
    const auto sines = detail::sine_table(n, nu);
    auto& w = (*weights)[mp - 1];
    w.resize(n);
    for (int m = 0; m < n; ++m) w[m] = merged[m] * (*sines)[m];
  }

  return [n, coupling, k, weights](double t) {
    std::vector<double> pc, ps;
    detail::phase_table(n, 2.0 * coupling * t, pc, ps);
    Complex big_l{};
    for (int mp = 1; mp <= k; ++mp) {
      const auto& w = (*weights)[mp - 1];
      double re = 0.0, im = 0.0;
      for (int m = 0; m < n; ++m) {
        re += w[m] * pc[m];
        im += w[m] * ps[m];
      }
      const double sign = (mp % 2 == 1) ? 1.0 : -1.0;
      big_l += sign * Complex{re, -im};  // conj(C_nu), scale applied below
    }
    big_l *= 2.0 / ((n + 1) * static_cast<double>(k));
    return std::abs(big_l);
  };
}

}  // namespace spinchain
