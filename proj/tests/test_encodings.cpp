#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "spinchain/encodings.hpp"
#include "spinchain/propagator.hpp"
#include "test_support.hpp"

using namespace spinchain;

namespace {

double cdist(Complex a, Complex b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("psi_k instantiation") {
  const ChainSpec chain = make_chain(100, 1.0, 0.0);

  const EncodingState psi2 = make_psi_k(chain, 2);
  REQUIRE(psi2.excitation_amplitudes.size() == 2);
  CHECK(psi2.region_size == 3);
  CHECK(psi2.excitation_amplitudes[0].site == 1);
  CHECK(psi2.excitation_amplitudes[1].site == 3);
  CHECK(psi2.excitation_amplitudes[0].value.real() ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(psi2.excitation_amplitudes[1].value.real() ==
        doctest::Approx(-1.0 / std::sqrt(2.0)));

  const EncodingState psi1 = make_psi_k(make_chain(10, 1.0, 0.0), 1);
  REQUIRE(psi1.excitation_amplitudes.size() == 1);
  CHECK(psi1.excitation_amplitudes[0].site == 1);
  CHECK(psi1.excitation_amplitudes[0].value == Complex{1.0, 0.0});

  const EncodingState psi3 = make_psi_k(chain, 3);
  REQUIRE(psi3.excitation_amplitudes.size() == 3);
  const double amp = 1.0 / std::sqrt(3.0);
  CHECK(psi3.excitation_amplitudes[0].value.real() == doctest::Approx(amp));
  CHECK(psi3.excitation_amplitudes[1].value.real() == doctest::Approx(-amp));
  CHECK(psi3.excitation_amplitudes[2].value.real() == doctest::Approx(amp));
  CHECK(psi3.excitation_amplitudes[2].site == 5);
}

TEST_CASE("psi_k support sits on odd sites and is normalized") {
  for (int k = 1; k <= 8; ++k) {
    const EncodingState psi = make_psi_k(make_chain(31, 1.0, 0.0), k);
    CHECK(std::abs(norm_squared(psi) - 1.0) < 1e-12);
    CHECK(psi.region_size == 2 * k - 1);
    for (const auto& a : psi.excitation_amplitudes) CHECK(a.site % 2 == 1);
  }
}

TEST_CASE("psi_k rejects short chains") {
  CHECK_THROWS_AS(make_psi_k(make_chain(4, 1.0, 0.0), 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_psi_k(make_chain(4, 1.0, 0.0), 0),
                  std::invalid_argument);
}

TEST_CASE("xi_k limits") {
  const ChainSpec chain = make_chain(100, 1.0, 0.0);
  const double pi = std::acos(-1.0);

  // theta = 0: pure vacuum
  const EncodingState vac = make_xi_k(chain, {0.0, 1.3, 2});
  CHECK(vac.region_size == 0);
  CHECK(vac.vacuum_amplitude == Complex{1.0, 0.0});

  // theta = pi: Psi_k up to a ~1e-17 vacuum leak from cos(pi/2)
  const EncodingState psi_like = make_xi_k(chain, {pi, 0.0, 2});
  const EncodingState psi2 = make_psi_k(chain, 2);
  CHECK(std::abs(psi_like.vacuum_amplitude) < 1e-12);
  REQUIRE(psi_like.excitation_amplitudes.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(cdist(psi_like.excitation_amplitudes[i].value,
                psi2.excitation_amplitudes[i].value) < 1e-12);
  }

  // theta = pi/2: equal superposition
  const EncodingState mid = make_xi_k(chain, {pi / 2, 0.0, 2});
  CHECK(mid.vacuum_amplitude.real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(mid.excitation_amplitudes[0].value.real() == doctest::Approx(0.5));
  CHECK(mid.excitation_amplitudes[1].value.real() == doctest::Approx(-0.5));
}

TEST_CASE("xi_k carries the phase factor") {
  const ChainSpec chain = make_chain(10, 1.0, 0.0);
  const double pi = std::acos(-1.0);
  const EncodingState enc = make_xi_k(chain, {pi / 3, pi / 4, 2});
  const Complex expected = std::sin(pi / 6) *
                           Complex{std::cos(pi / 4), std::sin(pi / 4)} /
                           std::sqrt(2.0);
  CHECK(cdist(enc.excitation_amplitudes[0].value, expected) < 1e-12);
}

TEST_CASE("xi_k validates parameter ranges") {
  const ChainSpec chain = make_chain(10, 1.0, 0.0);
  const double pi = std::acos(-1.0);
  CHECK_THROWS_AS(make_xi_k(chain, {-0.1, 0.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_xi_k(chain, {pi + 0.1, 0.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_xi_k(chain, {1.0, -0.1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_xi_k(chain, {1.0, 2 * pi, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_xi_k(chain, {1.0, 0.0, 6}), std::invalid_argument);
}

TEST_CASE("transfer block is the identity when sender meets receiver") {
  const Eigen::MatrixXcd block = transfer_block(make_chain(4, 1.0, 0.0), 4, 0.0);
  CHECK((block - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("transfer block entries come from the propagator") {
  const ChainSpec chain = make_chain(4, 1.0, 0.3);
  const Eigen::MatrixXcd block = transfer_block(chain, 2, 1.1);
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      CHECK(cdist(block(b - 1, a - 1), amplitude(chain, a, 4 - 2 + b, 1.1)) <
            1e-12);
    }
  }
  CHECK_THROWS_AS(transfer_block(chain, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(transfer_block(chain, 5, 1.0), std::invalid_argument);
}

TEST_CASE("transfer block singular values ignore the field") {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = testsupport::uniform_int(4, 24);
    const int r = testsupport::uniform_int(1, n / 2);
    const double t = testsupport::uniform(0.0, 2.0 * n);
    const double h = testsupport::uniform(-1.0, 1.0);
    const double bare =
        optimal_encoding(make_chain(n, 1.0, 0.0), r, t).top_singular_value;
    const double dressed =
        optimal_encoding(make_chain(n, 1.0, h), r, t).top_singular_value;
    CHECK(std::abs(bare - dressed) < 1e-10);
  }
}

TEST_CASE("transfer block singular values lie in [0, 1] and sum below r") {
  for (int trial = 0; trial < 15; ++trial) {
    const int n = testsupport::uniform_int(3, 30);
    const int r = testsupport::uniform_int(1, n);
    const double t = testsupport::uniform(0.0, 2.0 * n);
    const Eigen::MatrixXcd block = transfer_block(make_chain(n, 1.0, 0.0), r, t);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
    double sum_sq = 0.0;
    for (int i = 0; i < r; ++i) {
      CHECK(svd.singularValues()(i) >= -1e-12);
      CHECK(svd.singularValues()(i) <= 1.0 + 1e-10);
      sum_sq += svd.singularValues()(i) * svd.singularValues()(i);
    }
    CHECK(sum_sq <= r + 1e-9);
  }
}

TEST_CASE("optimal encoding at the degenerate identity block") {
  const OptimalEncodingResult res =
      optimal_encoding(make_chain(3, 1.0, 0.0), 3, 0.0);
  CHECK(res.top_singular_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.spectral_gap < 1e-10);
  CHECK(std::abs(res.encoding.norm() - 1.0) < 1e-12);
  // the degenerate representative follows Psi_2 for odd r
  const EncodingState psi2 = make_psi_k(make_chain(3, 1.0, 0.0), 2);
  CHECK(encoding_distance(res, psi2) < 1e-9);
}

TEST_CASE("optimal encoding beats a brute-force grid") {
  // Grid oracle over normalized complex 2-vectors (cos a, e^{i p} sin a).
  const ChainSpec chain = make_chain(4, 1.0, 0.0);
  const double t = 0.9;
  const Eigen::MatrixXcd block = transfer_block(chain, 2, t);
  const double pi = std::acos(-1.0);
  double best = 0.0;
  const int steps = 1500;
  for (int ia = 0; ia <= steps; ++ia) {
    const double a = 0.5 * pi * ia / steps;
    for (int ip = 0; ip < steps; ++ip) {
      const double p = 2.0 * pi * ip / steps;
      Eigen::Vector2cd v;
      v << Complex{std::cos(a), 0.0},
          std::sin(a) * Complex{std::cos(p), std::sin(p)};
      best = std::max(best, (block * v).norm());
    }
  }
  const OptimalEncodingResult res = optimal_encoding(chain, 2, t);
  CHECK(res.top_singular_value >= best - 1e-12);
  CHECK(res.top_singular_value <= best + 1e-4);
}

TEST_CASE("optimal encoding dominates the psi states") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testsupport::uniform_int(5, 40);
    const int k = testsupport::uniform_int(1, 3);
    const int r = 2 * k - 1;
    if (r > n) continue;
    const double t = testsupport::uniform(0.0, 1.5 * n);
    const ChainSpec chain = make_chain(n, 1.0, 0.0);
    const Eigen::MatrixXcd block = transfer_block(chain, r, t);
    const EncodingState psi = make_psi_k(chain, k);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(r);
    for (const auto& a : psi.excitation_amplitudes) v(a.site - 1) = a.value;
    const double psi_capture = (block * v).norm();
    const OptimalEncodingResult res = optimal_encoding(chain, r, t);
    CHECK(res.top_singular_value >= psi_capture - 1e-10);
  }
}

TEST_CASE("optimal encoding is deterministic") {
  const ChainSpec chain = make_chain(20, 1.0, 0.0);
  const OptimalEncodingResult a = optimal_encoding(chain, 5, 9.7);
  const OptimalEncodingResult b = optimal_encoding(chain, 5, 9.7);
  CHECK(a.top_singular_value == b.top_singular_value);
  CHECK(a.spectral_gap == b.spectral_gap);
  for (int i = 0; i < 5; ++i) CHECK(a.encoding(i) == b.encoding(i));
}

TEST_CASE("optimal encoding phase convention") {
  const OptimalEncodingResult res =
      optimal_encoding(make_chain(30, 1.0, 0.0), 5, 14.8);
  int largest = 0;
  for (int i = 1; i < 5; ++i) {
    if (std::abs(res.encoding(i)) > std::abs(res.encoding(largest)))
      largest = i;
  }
  CHECK(res.encoding(largest).real() > 0.0);
  CHECK(std::abs(res.encoding(largest).imag()) < 1e-12);
}

TEST_CASE("encoding distance basics") {
  const ChainSpec chain = make_chain(30, 1.0, 0.0);
  const OptimalEncodingResult res = optimal_encoding(chain, 3, 15.1);

  // distance to the state built from the optimal vector itself is zero,
  // even through an arbitrary global phase
  std::vector<SiteAmplitude> amps;
  const Complex twist{std::cos(0.83), std::sin(0.83)};
  for (int i = 0; i < 3; ++i) amps.push_back({i + 1, twist * res.encoding(i)});
  const EncodingState same = make_encoding(30, Complex{}, amps);
  CHECK(encoding_distance(res, same) < 1e-12);

  // orthogonal states sit at sqrt(2)
  OptimalEncodingResult unit;
  unit.region_size = 2;
  unit.encoding = Eigen::VectorXcd::Zero(2);
  unit.encoding(0) = 1.0;
  const EncodingState other =
      make_encoding(30, Complex{}, {{2, Complex{1.0, 0.0}}});
  CHECK(encoding_distance(unit, other) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // support outside 1..r is rejected
  const EncodingState outside =
      make_encoding(30, Complex{}, {{7, Complex{1.0, 0.0}}});
  CHECK_THROWS_AS(encoding_distance(res, outside), std::invalid_argument);
}

TEST_CASE("transfer objective matches optimal_encoding") {
  const ChainSpec chain = make_chain(60, 1.0, 0.0);
  auto objective = transfer_fidelity_objective(chain, 3);
  for (double t : {0.0, 7.3, 29.9, 55.0}) {
    CHECK(std::abs(objective(t) -
                   optimal_encoding(chain, 3, t).top_singular_value) < 1e-12);
  }
}

TEST_CASE("to_encoding_state round-trips the optimal vector") {
  const ChainSpec chain = make_chain(24, 1.0, 0.0);
  const OptimalEncodingResult res = optimal_encoding(chain, 5, 11.2);
  const EncodingState enc = to_encoding_state(res, 24);
  CHECK(std::abs(norm_squared(enc) - 1.0) < 1e-12);
  CHECK(enc.region_size <= 5);
  CHECK(encoding_distance(res, enc) < 1e-12);
}
