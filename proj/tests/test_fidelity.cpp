#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinchain/fidelity.hpp"
#include "spinchain/optimizer.hpp"
#include "spinchain/propagator.hpp"
#include "test_support.hpp"

using namespace spinchain;

TEST_CASE("fidelity is 1 when the sender region covers the chain at t = 0") {
  const ChainSpec chain = make_chain(6, 1.0, 0.2);
  for (int trial = 0; trial < 10; ++trial) {
    EncodingState enc = testsupport::random_encoding(6, 6);
    if (enc.region_size < 6) continue;
    CHECK(fidelity_direct(chain, enc, 0.0).fidelity ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the vacuum transfers perfectly at any time") {
  const ChainSpec chain = make_chain(9, 1.0, 0.7);
  const EncodingState vac = make_encoding(9, Complex{1.0, 0.0}, {});
  for (double t : {0.0, 3.3, 17.0}) {
    CHECK(fidelity_direct(chain, vac, t).fidelity == 1.0);
  }
}

TEST_CASE("published arrival fidelities at N = 100") {
  const ChainSpec chain = make_chain(100, 1.0, 0.0);
  const double f2 = fidelity_direct(chain, make_psi_k(chain, 2), 51.75).fidelity;
  CHECK(std::abs(f2 - 0.83) < 0.005);
  const double f5 = fidelity_direct(chain, make_psi_k(chain, 5), 51.50).fidelity;
  CHECK(std::abs(f5 - 0.93) < 0.005);
}

TEST_CASE("fidelities stay in [0, 1] and ignore the field in the one-excitation sector") {
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testsupport::uniform_int(2, 40);
    const double t = testsupport::uniform(0.0, 2.0 * n);
    const EncodingState enc = testsupport::random_encoding(n, 4, false);
    const double bare =
        fidelity_direct(make_chain(n, 1.0, 0.0), enc, t).fidelity;
    const double dressed =
        fidelity_direct(make_chain(n, 1.0, testsupport::uniform(-1.0, 1.0)),
                        enc, t)
            .fidelity;
    CHECK(bare >= 0.0);
    CHECK(bare <= 1.0 + 1e-12);
    CHECK(std::abs(bare - dressed) < 1e-10);
  }
}

TEST_CASE("field decomposition telescopes to |L| = 1 when the regions meet") {
  for (int k : {1, 2, 3, 5}) {
    const ChainSpec chain = make_chain(2 * k - 1, 1.0, 0.0);
    const FieldDecomposition decomp = field_decomposition(chain, k, 0.0);
    CHECK(std::abs(std::abs(decomp.L) - 1.0) < 1e-12);
    CHECK(head_capture_sum(decomp) == 0.0);
  }
}

TEST_CASE("decomposition matches Table I at the k = 2 arrival") {
  const ChainSpec chain = make_chain(100, 1.0, 0.0);
  const FieldDecomposition decomp = field_decomposition(chain, 2, 51.75);
  CHECK(std::abs(std::abs(decomp.L) - 0.83) < 0.005);
}

TEST_CASE("C_nu agrees with a dense-oracle composition") {
  const ChainSpec chain = make_chain(6, 1.0, 0.0);
  const double t = 1.7;
  const FieldDecomposition decomp = field_decomposition(chain, 2, t);
  const EncodingState e1 = make_encoding(6, Complex{}, {{1, Complex{1, 0}}});
  const EncodingState e3 = make_encoding(6, Complex{}, {{3, Complex{1, 0}}});
  const PropagatedState w1 = dense_oracle(chain, e1, t);
  const PropagatedState w3 = dense_oracle(chain, e3, t);
  for (int nu = 0; nu < 6; ++nu) {
    const Complex expected = w1.site_amplitudes[nu] - w3.site_amplitudes[nu];
    CHECK(std::abs(decomp.C[nu] - expected) < 1e-9);
  }
}

TEST_CASE("L obeys the parity structure") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testsupport::uniform_int(5, 60);
    const int k = testsupport::uniform_int(1, std::min(4, (n + 1) / 2));
    const double t = testsupport::uniform(0.0, 2.0 * n);
    const FieldDecomposition decomp =
        field_decomposition(make_chain(n, 1.0, 0.0), k, t);
    if (n % 2 == 1) {
      CHECK(std::abs(decomp.L.imag()) < 1e-9);
    } else {
      CHECK(std::abs(decomp.L.real()) < 1e-9);
    }
    CHECK(std::abs(decomp.L) <= 1.0 + 1e-9);
  }
}

TEST_CASE("direct fidelity of psi_k equals |L|") {
  for (int trial = 0; trial < 25; ++trial) {
    const int n = testsupport::uniform_int(3, 51);
    const int k = testsupport::uniform_int(1, (n + 1) / 2);
    const double t = testsupport::uniform(0.0, 1.5 * n);
    const ChainSpec chain = make_chain(n, 1.0, testsupport::uniform(-0.4, 0.4));
    const double direct =
        fidelity_direct(chain, make_psi_k(chain, k), t).fidelity;
    const double abs_l =
        std::abs(field_decomposition(chain, k, t).L);
    CHECK(std::abs(direct - abs_l) < 1e-10);
  }
}

TEST_CASE("fast psi objective equals the canonical route") {
  const ChainSpec chain = make_chain(101, 1.0, 0.0);
  auto objective = psi_fidelity_objective(chain, 3);
  const EncodingState psi3 = make_psi_k(chain, 3);
  for (double t : {0.0, 5.0, 26.2, 50.9, 88.8}) {
    CHECK(std::abs(objective(t) -
                   fidelity_direct(chain, psi3, t).fidelity) < 1e-12);
  }
}

TEST_CASE("xi fidelity at the Bloch poles") {
  const ChainSpec chain = make_chain(31, 1.0, 0.15);
  const double pi = std::acos(-1.0);
  const double t = 14.6;
  for (Variant variant : {Variant::CanonicalEq6, Variant::PrintedEq8}) {
    CHECK(fidelity_xi(chain, {0.0, 0.0, 2}, t, variant).fidelity ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double at_pi = fidelity_xi(chain, {pi, 0.0, 2}, t, variant).fidelity;
    const double abs_l = std::abs(field_decomposition(chain, 2, t).L);
    CHECK(std::abs(at_pi - abs_l) < 1e-10);
  }
}

TEST_CASE("xi fidelity is independent of phi") {
  const ChainSpec chain = make_chain(21, 1.0, 0.3);
  const double pi = std::acos(-1.0);
  const double base =
      fidelity_xi(chain, {1.1, 0.0, 2}, 9.7, Variant::CanonicalEq6).fidelity;
  for (double phi : {0.4, 1.9, 3.3, 5.8}) {
    const double f =
        fidelity_xi(chain, {1.1, phi, 2}, 9.7, Variant::CanonicalEq6).fidelity;
    CHECK(std::abs(f - base) < 1e-10);
    (void)pi;
  }
}

TEST_CASE("printed form carries the doubled tail weight") {
  // The two variants differ exactly by sin^2(theta) S / (4k) under the root.
  const ChainSpec chain = make_chain(25, 1.0, 0.1);
  const double theta = 1.3;
  const int k = 2;
  const double t = 11.4;
  const FidelityReport eq8 =
      fidelity_xi(chain, {theta, 0.0, k}, t, Variant::PrintedEq8);
  const FidelityReport eq6 =
      fidelity_xi(chain, {theta, 0.0, k}, t, Variant::CanonicalEq6);
  REQUIRE(eq8.components.has_value());
  const double s = eq8.components->sum_abs2_C_head;
  const double sin_sq = std::sin(theta) * std::sin(theta);
  const double expected_gap = sin_sq * s / (4.0 * k);
  const double gap = eq8.fidelity * eq8.fidelity - eq6.fidelity * eq6.fidelity;
  CHECK(std::abs(gap - expected_gap) < 1e-9);
  CHECK(eq8.fidelity >= eq6.fidelity - 1e-12);
  CHECK(eq8.variant == Variant::PrintedEq8);
  CHECK(eq6.variant == Variant::CanonicalEq6);
}

TEST_CASE("field term closed form") {
  const ChainSpec chain = make_chain(13, 1.0, 0.0);
  const FieldDecomposition decomp = field_decomposition(chain, 2, 6.5);
  // theta = 0 kills the term
  CHECK(fidelity_field_term(decomp, 0.0, 0.37) == 0.0);
  // h = 0, odd N: the term is sin^2(theta)/2 * L (L real)
  const double theta = 0.9;
  const double expected =
      0.5 * std::sin(theta) * std::sin(theta) * decomp.L.real();
  CHECK(fidelity_field_term(decomp, theta, 0.0) ==
        doctest::Approx(expected).epsilon(1e-14));
  // periodic in h with period pi/t
  const double period = std::acos(-1.0) / 6.5;
  CHECK(std::abs(fidelity_field_term(decomp, theta, 0.123) -
                 fidelity_field_term(decomp, theta, 0.123 + period)) < 1e-10);
}

TEST_CASE("xi max fidelity limits and route agreement") {
  const ChainSpec chain = make_chain(41, 1.0, 0.0);
  const double pi = std::acos(-1.0);
  const int k = 3;
  const double t = 20.4;
  for (Variant variant : {Variant::CanonicalEq6, Variant::PrintedEq8}) {
    CHECK(fidelity_xi_max(chain, k, 0.0, t, variant) ==
          doctest::Approx(1.0).epsilon(1e-9));
    const double abs_l = std::abs(field_decomposition(chain, k, t).L);
    CHECK(std::abs(fidelity_xi_max(chain, k, pi, t, variant) - abs_l) < 1e-9);
  }
  // optimal-field route equals the closed form
  const FieldDecomposition decomp = field_decomposition(chain, k, t);
  for (double theta : {0.4, 1.2, 2.2, 2.9}) {
    const double via_field = fidelity_xi_max(chain, k, theta, t,
                                             Variant::CanonicalEq6);
    const double closed =
        fidelity_xi_max_from(decomp, theta, Variant::CanonicalEq6);
    CHECK(std::abs(via_field - closed) < 1e-9);
  }
}

TEST_CASE("xi max dominates every field value") {
  for (int trial = 0; trial < 6; ++trial) {
    const int n = testsupport::uniform_int(7, 41);
    const int k = testsupport::uniform_int(1, 3);
    if (2 * k - 1 > n) continue;
    const double t = testsupport::uniform(0.5, 1.2 * n);
    const double theta = testsupport::uniform(0.1, 3.0);
    const ChainSpec chain = make_chain(n, 1.0, 0.0);
    const FieldDecomposition decomp = field_decomposition(chain, k, t);
    for (Variant variant : {Variant::CanonicalEq6, Variant::PrintedEq8}) {
      const double top = fidelity_xi_max_from(decomp, theta, variant);
      for (int i = 0; i < 10000; ++i) {
        const double h = -1.0 + 2.0 * i / 9999.0;
        const double f =
            fidelity_xi(make_chain(n, 1.0, h), {theta, 0.0, k}, t, variant)
                .fidelity;
        CHECK(f <= top + 1e-12);
      }
    }
  }
}

TEST_CASE("perfect transfer makes the average one") {
  const ChainSpec chain = make_chain(3, 1.0, 0.0);
  CHECK(fidelity_xi_avg(chain, 2, 0.0, Variant::PrintedEq8) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_xi_avg(chain, 2, 0.0, Variant::CanonicalEq6) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Simpson average agrees with a brute trapezoid") {
  const ChainSpec chain = make_chain(7, 1.0, 0.0);
  const int k = 2;
  const double t = 2.9;
  const FieldDecomposition decomp = field_decomposition(chain, k, t);
  for (Variant variant : {Variant::CanonicalEq6, Variant::PrintedEq8}) {
    const long nodes = 1'000'000;
    const double pi = std::acos(-1.0);
    const double step = pi / nodes;
    double acc = 0.0;
    for (long i = 0; i <= nodes; ++i) {
      const double theta = i * step;
      const double weight = (i == 0 || i == nodes) ? 0.5 : 1.0;
      acc += weight * fidelity_xi_max_from(decomp, theta, variant) *
             std::sin(theta);
    }
    const double trapezoid = 0.5 * acc * step;
    CHECK(std::abs(fidelity_xi_avg(chain, k, t, variant) - trapezoid) < 1e-7);
  }
}

TEST_CASE("average grows with the decomposition") {
  FieldDecomposition low;
  low.n_sites = 9;
  low.k = 2;
  low.time = 3.0;
  low.L = Complex{0.3, 0.0};
  low.C.assign(9, Complex{0.2, 0.0});
  FieldDecomposition high = low;
  high.L = Complex{0.45, 0.0};
  high.C.assign(9, Complex{0.3, 0.0});
  for (Variant variant : {Variant::CanonicalEq6, Variant::PrintedEq8}) {
    CHECK(fidelity_xi_avg_from(high, variant) >=
          fidelity_xi_avg_from(low, variant));
  }
}
