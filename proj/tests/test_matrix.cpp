#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <opcone/matrix.hpp>

using namespace opcone;
using cx = std::complex<double>;

namespace {

HVector<> random_hermitian_vec(const SpacePtr& sp, std::mt19937_64& g) {
  std::normal_distribution<double> N(0, 1);
  VecC<> c(sp->dim);
  for (int i = 0; i < sp->dim; ++i) c(i) = cx(N(g), 0);
  return HVector<>{sp, c};
}

// independent oracle: the pairing entry by entry from inner products
MatC<> pairing_oracle(const HMatrix<>& z, const HMatrix<>& w) {
  const int n = z.n, m = w.n;
  MatC<> P(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < m; ++l)
          P(i * m + j, k * m + l) = inner(entry(z, i, k), entry(w, j, l));
  return P;
}

HMatrix<> dominated_max_member(const SpacePtr& sp, int n, std::mt19937_64& g) {
  auto z = zero_hmatrix<double>(sp, n);
  MatC<> S = MatC<>::Zero(n, n);
  for (int f = 0; f < sp->dim; ++f) {
    if (f == sp->unit_index) continue;
    MatC<> A(n, n);
    std::normal_distribution<double> N(0, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = cx(N(g), N(g));
    MatC<> C = (A + A.adjoint()) / 2.0;
    set_coeff(z, f, C);
    S += herm_abs<double>(C);
  }
  MatC<> B(n, n);
  std::normal_distribution<double> N(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = cx(N(g), N(g));
  set_coeff(z, sp->unit_index, MatC<>(S + 0.1 * (B * B.adjoint())));
  return z;
}

double gauge_be_sampled(const HMatrix<>& z, int extra, std::uint64_t seed) {
  const auto& sp = z.space;
  double best = 0;
  auto value = [&](const HMatrix<>& eta) {
    best = std::max(best, op_norm(pairing(z, eta)));
  };
  value(direct_sum(unit_vector<double>(sp), z.n));
  auto z0 = strip_unit(z);
  double n0 = norm_o(z0);
  if (n0 > 1e-12)
    value((1.0 / n0) * z0 + direct_sum(unit_vector<double>(sp), z.n));
  for (int i = 0; i < extra; ++i) {
    auto g = rng_for(seed, static_cast<std::uint64_t>(i));
    int k = 1 + static_cast<int>(g() % 3);
    value(random_o_ball_state<double>(sp, k, g));
  }
  return best;
}

}  // namespace

TEST_CASE("pairing matches the entrywise inner-product table") {
  auto sp = make_space(3);
  auto g = rng_for(11);
  auto z = random_hmatrix<double>(sp, 2, g);
  auto w = random_hmatrix<double>(sp, 3, g);
  MatC<> P = pairing(z, w);
  MatC<> Q = pairing_oracle(z, w);
  CHECK((P - Q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pairing of unit examples") {
  auto sp = make_space(2);
  auto e = unit_vector<double>(sp);
  auto f = basis_vector<double>(sp, 1);

  MatC<> Pe = pairing(embed(e), embed(e));
  REQUIRE(Pe.rows() == 1);
  CHECK(std::abs(Pe(0, 0) - cx(1, 0)) < 1e-15);

  auto fsum = direct_sum(f, 2);
  MatC<> Pf = pairing(fsum, fsum);
  CHECK((Pf - MatC<>::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(norm_o(fsum) == doctest::Approx(1.0));
  CHECK(norm_2(fsum) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("hermitian self-pairing is hermitian yet can be indefinite") {
  auto sp = make_space(2);
  auto g = rng_for(5);
  for (int t = 0; t < 20; ++t) {
    auto z = random_hermitian_hmatrix<double>(sp, 3, g);
    MatC<> P = pairing(z, z);
    CHECK((P - P.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
  // off-diagonal basis element: the pairing is a symmetry with eigenvalue -1
  auto f = basis_vector<double>(sp, 1);
  auto z = zero_hmatrix<double>(sp, 2);
  set_entry(z, 0, 1, f);
  set_entry(z, 1, 0, f);
  CHECK(lambda_min(pairing(z, z)) == doctest::Approx(-1.0));
  // while the entry Gram stays PSD
  CHECK(lambda_min(MatC<>(pairing_gram(z))) >= -1e-12);
}

TEST_CASE("entry Gram realignment is PSD for arbitrary elements") {
  auto sp = make_space(4, 2);
  auto g = rng_for(7);
  for (int t = 0; t < 30; ++t) {
    auto z = random_hmatrix<double>(sp, 3, g);
    double scale = norm_2(z) * norm_2(z);
    CHECK(lambda_min(MatC<>(pairing_gram(z))) >= -1e-10 * (1 + scale));
  }
}

TEST_CASE("the three norms coincide at level 1") {
  auto sp = make_space(3);
  auto g = rng_for(13);
  for (int t = 0; t < 40; ++t) {
    auto v = HVector<>{sp, random_gaussian_c<double>(3, g)};
    auto z = embed(v);
    double n = v.coords.norm();
    CHECK(norm_o(z) == doctest::Approx(n));
    CHECK(norm_2(z) == doctest::Approx(n));
    CHECK(norm_so(z, 4, 1) == doctest::Approx(n));
  }
}

TEST_CASE("unit direct sums pin the norm scale") {
  auto sp = make_space(2);
  for (int n = 1; n <= 4; ++n) {
    auto z = direct_sum(unit_vector<double>(sp), n);
    CHECK(norm_o(z) == doctest::Approx(1.0));
    CHECK(norm_2(z) == doctest::Approx(std::sqrt(double(n))));
    CHECK(norm_so(z, 4, 1) == doctest::Approx(double(n)));
  }
}

TEST_CASE("norm chains hold on random elements") {
  auto g = rng_for(17);
  for (int t = 0; t < 40; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 3));
    int n = 1 + static_cast<int>(g() % 4);
    auto z = (t % 2 == 0) ? random_hmatrix<double>(sp, n, g)
                          : random_hermitian_hmatrix<double>(sp, n, g);
    double o = norm_o(z), two = norm_2(z), so = norm_so(z, 8, t);
    double eps = 1e-9 * (1 + two);
    CHECK(o <= two + eps);
    CHECK(two <= std::sqrt(double(n)) * o + eps);
    CHECK(so >= std::max(o, two) - eps);
    CHECK(so <= std::min(std::sqrt(double(n)) * two, double(n) * o) + eps);
  }
}

TEST_CASE("unitary compressions preserve norms, contractions never expand") {
  auto sp = make_space(3);
  auto g = rng_for(19);
  for (int t = 0; t < 20; ++t) {
    auto z = random_hmatrix<double>(sp, 3, g);
    MatC<> A(3, 3);
    std::normal_distribution<double> N(0, 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = cx(N(g), N(g));
    Eigen::HouseholderQR<MatC<>> qr(A);
    MatC<> U = qr.householderQ();
    auto zu = compress(z, U);
    CHECK(norm_o(zu) == doctest::Approx(norm_o(z)));
    CHECK(norm_2(zu) == doctest::Approx(norm_2(z)));

    MatC<> K = A / (op_norm(A) + 1e-12);  // operator-norm contraction
    auto zk = compress(z, K);
    CHECK(norm_o(zk) <= norm_o(z) * (1 + 1e-9) + 1e-12);
  }
}

TEST_CASE("min membership at level 1 is the cone test") {
  auto sp = make_space(3);
  auto g = rng_for(23);
  for (int t = 0; t < 60; ++t) {
    auto v = random_hermitian_vec(sp, g);
    if (t % 3 == 0) v = v + 2.0 * unit_vector<double>(sp);
    auto verdict = in_min(embed(v));
    bool member = in_cone(v);
    CHECK((verdict.kind == Verdict::Member) == member);
    CHECK((verdict.kind == Verdict::NonMember) == !member);
  }
  CHECK_THROWS_AS(
      in_min(embed(HVector<>{sp, VecC<>::Unit(3, 1) * cx(0, 1)})),
      std::invalid_argument);
}

TEST_CASE("min membership refutes the unit-free direct sum") {
  auto sp = make_space(2);
  auto z = direct_sum(basis_vector<double>(sp, 1), 2);
  auto verdict = in_min(z);
  REQUIRE(verdict.kind == Verdict::NonMember);
  CHECK(verdict.margin == doctest::Approx(-1.0));
  REQUIRE(verdict.witness_beta.has_value());
  // recompute the witness margin from scratch
  const VecC<>& b = *verdict.witness_beta;
  cx we = b.dot(coeff(z, 0) * b);
  cx wf = b.dot(coeff(z, 1) * b);
  CHECK(we.real() - std::abs(wf.real()) == doctest::Approx(verdict.margin));
}

TEST_CASE("min membership is exact on diagonal elements") {
  auto sp = make_space(3);
  auto g = rng_for(29);
  for (int t = 0; t < 20; ++t) {
    auto z = zero_hmatrix<double>(sp, 3);
    bool all_in = true;
    for (int i = 0; i < 3; ++i) {
      auto v = random_hermitian_vec(sp, g);
      if (t % 2 == 0) {
        auto d = decompose(v);
        v = d.zeta0 + (norm(d.zeta0) + 0.1) * unit_vector<double>(sp);
      }
      all_in = all_in && in_cone(v);
      set_entry(z, i, i, v);
    }
    auto verdict = in_min(z);
    if (all_in) {
      CHECK(verdict.kind == Verdict::Member);
    } else {
      CHECK(verdict.kind == Verdict::NonMember);
    }
  }
}

TEST_CASE("state-built elements survive every membership search") {
  auto g = rng_for(31);
  for (int t = 0; t < 15; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 3));
    int n = 1 + static_cast<int>(g() % 3);
    auto z = random_state_built<double>(sp, n, 4, g);
    SearchOptions opt;
    opt.budget = 300;
    CHECK(in_min(z, opt).kind != Verdict::NonMember);
    CHECK(certify_max(z, opt).kind != Verdict::NonMember);
    CHECK(in_quantum_cone(z, QuantumCone::Cu, opt).kind != Verdict::NonMember);
    CHECK(in_quantum_cone(z, QuantumCone::Co, opt).kind != Verdict::NonMember);
  }
}

TEST_CASE("coefficient domination certifies max membership exactly") {
  auto g = rng_for(37);
  for (int t = 0; t < 15; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 3));
    int n = 2 + static_cast<int>(g() % 2);
    auto z = dominated_max_member(sp, n, g);
    auto verdict = certify_max(z);
    REQUIRE(verdict.kind == Verdict::Member);
    REQUIRE(verdict.certificate.has_value());
    const auto& cert = *verdict.certificate;
    CHECK(cert.residual_bound < 1e-8);
    CHECK(certificate_residual(cert, z) < 1e-8);
    for (const auto& term : cert.terms) {
      CHECK(in_cone(term.s));
      CHECK(term.a.cols() == n);
    }
    // max members pass the other searches
    SearchOptions opt;
    opt.budget = 200;
    CHECK(in_min(z, opt).kind != Verdict::NonMember);
    CHECK(in_quantum_cone(z, QuantumCone::Cu, opt).kind != Verdict::NonMember);
  }
}

TEST_CASE("max refutation lifts to a level-1 state") {
  auto sp = make_space(2);
  auto z = direct_sum(basis_vector<double>(sp, 1), 2);
  auto verdict = certify_max(z);
  REQUIRE(verdict.kind == Verdict::NonMember);
  REQUIRE(verdict.witness_state.has_value());
  const auto& s = *verdict.witness_state;
  CHECK(in_cone(s));
  double lm = lambda_min(pairing(z, embed(s)));
  CHECK(lm == doctest::Approx(verdict.margin));
  CHECK(verdict.margin < -1e-6);
}

TEST_CASE("quantum cones reduce to the cone test at level 1") {
  auto sp = make_space(3);
  auto g = rng_for(41);
  for (int t = 0; t < 40; ++t) {
    auto v = random_hermitian_vec(sp, g);
    if (t % 3 == 0) v = v + 2.0 * unit_vector<double>(sp);
    bool member = in_cone(v);
    for (auto q : {QuantumCone::Co, QuantumCone::Cu}) {
      auto verdict = in_quantum_cone(embed(v), q);
      CHECK((verdict.kind == Verdict::Member) == member);
    }
  }
}

TEST_CASE("the l cone at level 1 collapses to the nonnegative unit ray") {
  auto sp = make_space(2);
  auto e = unit_vector<double>(sp);
  auto f = basis_vector<double>(sp, 1);

  CHECK(in_quantum_cone(embed(e), QuantumCone::Cl).kind == Verdict::Member);
  CHECK(in_quantum_cone(embed(2.0 * e), QuantumCone::Cl).kind ==
        Verdict::Member);
  CHECK(in_quantum_cone(embed(zero_vector<double>(sp)), QuantumCone::Cl).kind ==
        Verdict::Member);

  auto vf = in_quantum_cone(embed(f), QuantumCone::Cl);
  CHECK(vf.kind == Verdict::NonMember);

  // f + e lies in the cone but not in the l quantization: a widening row
  // compression drives the unit term below the fixed unit-free norm
  auto vfe = in_quantum_cone(embed(f + e), QuantumCone::Cl);
  REQUIRE(vfe.kind == Verdict::NonMember);
  CHECK(vfe.margin < -1e-3);
  REQUIRE(vfe.witness_a.has_value());
  CHECK(vfe.witness_a->cols() >= 2);
}

TEST_CASE("strong violations refute every quantum cone") {
  auto sp = make_space(2);
  auto z = direct_sum(basis_vector<double>(sp, 1), 2) +
           0.05 * direct_sum(unit_vector<double>(sp), 2);
  SearchOptions opt;
  opt.budget = 400;
  for (auto q : {QuantumCone::Cl, QuantumCone::Co, QuantumCone::Cu}) {
    auto verdict = in_quantum_cone(z, q, opt);
    CHECK(verdict.kind == Verdict::NonMember);
    REQUIRE(verdict.witness_a.has_value());
  }
  CHECK(in_min(z, opt).kind == Verdict::NonMember);
}

TEST_CASE("unit-ball gauge sandwich against the o norm") {
  auto g = rng_for(43);
  for (int t = 0; t < 12; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 2));
    int n = 1 + static_cast<int>(g() % 3);
    auto z = random_hermitian_hmatrix<double>(sp, n, g);
    if (t % 4 == 1) z = strip_unit(z);
    if (t % 4 == 2) z = direct_sum(unit_vector<double>(sp), n);
    double o = norm_o(z);
    if (o < 1e-9) continue;
    double gauge = gauge_be_sampled(z, 6, 1000 + t);
    CHECK(gauge >= o / 10 - 1e-9);
    CHECK(gauge <= 2 * o + 1e-9);
  }
}

TEST_CASE("max certificates pair nonnegatively with min members") {
  auto g = rng_for(47);
  CHECK(duality_check(direct_sum(unit_vector<double>(make_space(2)), 2),
                      direct_sum(unit_vector<double>(make_space(2)), 2)) ==
        doctest::Approx(1.0));
  for (int t = 0; t < 30; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 2));
    int n = 1 + static_cast<int>(g() % 3);
    int m = 1 + static_cast<int>(g() % 3);
    auto z = dominated_max_member(sp, n, g);
    REQUIRE(certify_max(z).kind == Verdict::Member);
    auto w = random_state_built<double>(sp, m, 3, g);
    double scale = 1 + norm_2(z) * norm_2(w);
    CHECK(duality_check(z, w) >= -1e-9 * scale);
  }
}

TEST_CASE("operator-Hilbert cone is self-dual on sampled members") {
  auto g = rng_for(53);
  for (int t = 0; t < 30; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 2));
    auto z = random_o_ball_state<double>(sp, 1 + static_cast<int>(g() % 3), g);
    auto w = random_o_ball_state<double>(sp, 1 + static_cast<int>(g() % 3), g);
    double scale = 1 + norm_2(z) * norm_2(w);
    CHECK(self_duality_check(z, w) >= -1e-9 * scale);
  }
}

TEST_CASE("matrix involution and hermitian detection") {
  auto sp = make_space(3, 1);
  auto g = rng_for(59);
  auto z = random_hmatrix<double>(sp, 3, g);
  CHECK((involute(involute(z)).data - z.data).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(is_hermitian(HMatrix<>{sp, 3, MatC<>((z.data + involute(z).data) / 2.0)}));
  auto h = random_hermitian_hmatrix<double>(sp, 2, g);
  CHECK(is_hermitian(h));
  CHECK_FALSE(is_hermitian(z, 1e-12));
}

TEST_CASE("shape guards") {
  auto sp = make_space(2);
  auto sp2 = make_space(3);
  auto z = zero_hmatrix<double>(sp, 2);
  CHECK_THROWS_AS(pairing(z, zero_hmatrix<double>(sp2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(compress(z, MatC<>(MatC<>::Identity(3, 2))),
                  std::invalid_argument);
}
