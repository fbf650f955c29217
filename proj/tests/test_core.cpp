#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <opcone/core.hpp>

#include <cmath>
#include <complex>

using namespace opcone;
using cx = std::complex<double>;

namespace {

HVector<double> random_vector(const SpacePtr& sp, std::mt19937_64& g) {
  return make_vector<double>(sp, random_gaussian_c<double>(sp->dim, g));
}

HVector<double> random_hermitian(const SpacePtr& sp, std::mt19937_64& g) {
  std::normal_distribution<double> gauss(0, 1);
  VecC<double> c(sp->dim);
  for (int i = 0; i < sp->dim; ++i) c(i) = cx(gauss(g), 0);
  return make_vector<double>(sp, std::move(c));
}

}  // namespace

TEST_CASE("involution fixes the unit and conjugates coordinates") {
  auto sp = make_space(3);
  auto e = unit_vector<double>(sp);
  CHECK((involute(e).coords - e.coords).norm() == doctest::Approx(0.0));

  auto v = zero_vector<double>(sp);
  v.coords(1) = cx(0, 1);
  auto w = involute(v);
  CHECK(w.coords(1) == cx(0, -1));
  CHECK(w.coords(2) == cx(0, 0));
}

TEST_CASE("involution is isometric on inner products") {
  auto sp = make_space(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = rng_for(11, trial);
    auto a = random_vector(sp, g);
    auto b = random_vector(sp, g);
    cx lhs = inner(involute(a), involute(b));
    cx rhs = std::conj(inner(a, b));
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(inner(involute(involute(a)), a) - inner(a, a)) < 1e-12);
  }
}

TEST_CASE("decompose splits off the unit component") {
  auto sp = make_space(3, 0);
  auto e = unit_vector<double>(sp);
  auto de = decompose(e);
  CHECK(norm(de.zeta0) == doctest::Approx(0.0));
  CHECK(de.lambda.real() == doctest::Approx(1.0));

  auto f = basis_vector<double>(sp, 1);
  auto df = decompose(f);
  CHECK(df.lambda == cx(0, 0));
  CHECK((df.zeta0.coords - f.coords).norm() == doctest::Approx(0.0));

  auto v = f + 3.0 * e;
  auto dv = decompose(v);
  CHECK(dv.lambda.real() == doctest::Approx(3.0));
  CHECK(norm(v) * norm(v) == doctest::Approx(10.0));
  CHECK(norm(dv.zeta0) * norm(dv.zeta0) + std::norm(dv.lambda) ==
        doctest::Approx(norm(v) * norm(v)));
}

TEST_CASE("cone membership: unit in, bare basis vectors out") {
  auto sp = make_space(4, 0);
  CHECK(in_cone(unit_vector<double>(sp)));
  for (int i = 1; i < 4; ++i) CHECK_FALSE(in_cone(basis_vector<double>(sp, i)));

  // zeta0 + ||zeta0|| e is always a boundary member
  for (int trial = 0; trial < 100; ++trial) {
    auto g = rng_for(7, trial);
    auto z0 = random_hermitian(sp, g);
    z0.coords(0) = cx(0, 0);
    auto v = z0 + norm(z0) * unit_vector<double>(sp);
    CHECK(in_cone(v));
    // strictly below the boundary fails
    auto w = z0 + (0.999 * norm(z0)) * unit_vector<double>(sp);
    if (norm(z0) > 1e-6) CHECK_FALSE(in_cone(w, 1e-12));
  }
}

TEST_CASE("non-hermitian vectors are never members") {
  auto sp = make_space(2);
  auto v = zero_vector<double>(sp);
  v.coords(0) = cx(5, 0);
  v.coords(1) = cx(0, 0.1);
  CHECK_FALSE(in_cone(v));
}

TEST_CASE("separation: the cone meets its negative only at zero") {
  auto sp = make_space(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = rng_for(3, trial);
    auto v = random_hermitian(sp, g);
    if (in_cone(v) && in_cone(-1.0 * v)) CHECK(norm(v) <= 1e-9);
  }
  auto z = zero_vector<double>(sp);
  CHECK(in_cone(z));
  CHECK(in_cone(-1.0 * z));
}

TEST_CASE("state closure: nonnegative on boundary states iff member") {
  auto sp = make_space(4);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = rng_for(5, trial);
    auto v = random_hermitian(sp, g);
    auto d = decompose(v);
    double n0 = norm(d.zeta0);
    bool nonneg = d.lambda.real() >= -1e-9;
    if (n0 > 1e-12) {
      VecR<double> dir = real_coords(d.zeta0) / n0;
      auto sp_plus = make_state<double>(sp, dir);
      auto sp_minus = make_state<double>(sp, VecR<double>(-dir));
      nonneg = nonneg && eval_at_state(v, sp_plus).real() >= -1e-9 &&
               eval_at_state(v, sp_minus).real() >= -1e-9;
    }
    CHECK(nonneg == in_cone(v));
  }
}

TEST_CASE("order norm closed form and unit normalization") {
  auto sp = make_space(3, 0);
  CHECK(order_norm(unit_vector<double>(sp)) == doctest::Approx(1.0));

  auto f = basis_vector<double>(sp, 1);
  CHECK(order_norm(f) == doctest::Approx(1.0));  // zeta0 alone: ||zeta0||

  auto v = f + 2.0 * unit_vector<double>(sp);
  CHECK(order_norm(v) == doctest::Approx(3.0));
}

TEST_CASE("order norm matches the sampled state supremum on hermitians") {
  auto sp = make_space(3, 0);
  auto v = basis_vector<double>(sp, 1) + 2.0 * unit_vector<double>(sp);
  double sup = 0;
  for (const auto& s : sample_states<double>(sp, 2000, 17))
    sup = std::max(sup, std::abs(eval_at_state(v, s)));
  CHECK(sup == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(sup <= order_norm(v) + 1e-9);
}

TEST_CASE("order norm sandwich against the Hilbert norm") {
  auto sp = make_space(4);
  for (int trial = 0; trial < 10000; ++trial) {
    auto g = rng_for(23, trial);
    auto v = random_vector(sp, g);
    double on = order_norm(v, 64, trial);
    CHECK(on >= norm(v) / 5 - 1e-9);
    CHECK(on <= 2 * norm(v) + 1e-9);
  }
}

TEST_CASE("order norm unit ball is the absolute convex hull of unit and ball") {
  auto sp = make_space(4);
  for (int trial = 0; trial < 500; ++trial) {
    auto g = rng_for(29, trial);
    auto v = random_hermitian(sp, g);
    v.coords *= 0.5 / std::max(0.5, norm(v));
    auto d = decompose(v);
    double n0 = norm(d.zeta0), lam = std::abs(d.lambda.real());
    // member of abc{{e} union ball} iff the weights n0 + |lambda| fit in 1
    bool hull = n0 + lam <= 1 + 1e-12;
    CHECK(hull == (order_norm(v) <= 1 + 1e-12));
  }
}

TEST_CASE("sampled states satisfy the invariants and include pure directions") {
  auto sp = make_space(3, 1);
  auto states = sample_states<double>(sp, 64, 9);
  CHECK(states.size() >= 64);

  int pure_seen = 0;
  for (const auto& s : states) {
    CHECK(s.s0.norm() <= 1 + 1e-12);
    CHECK(std::abs(s.s0(1)) <= 1e-12);
    CHECK(in_cone(state_vector(s)));
    CHECK(eval_at_state(unit_vector<double>(sp), s).real() ==
          doctest::Approx(1.0));
    if (std::abs(s.s0.norm() - 1) < 1e-12 &&
        (s.s0.cwiseAbs().maxCoeff() == doctest::Approx(1.0)))
      ++pure_seen;
  }
  CHECK(pure_seen >= 4);  // +-f for both non-unit directions
}

TEST_CASE("non-hermitian order norm is dominated by the hermitian parts") {
  auto sp = make_space(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = rng_for(31, trial);
    auto v = random_vector(sp, g);
    auto [x, y] = hermitian_parts(v);
    CHECK(std::abs(norm(v) * norm(v) - norm(x) * norm(x) - norm(y) * norm(y)) <
          1e-10);
    // canonical states force the sampled sup above ||zeta|| / sqrt(2)
    CHECK(order_norm(v, 8, trial) >= norm(v) / std::sqrt(2.0) - 1e-9);
  }
}

TEST_CASE("space construction guards") {
  CHECK_THROWS(make_space(0));
  CHECK_THROWS(make_space(2, 5));
  CHECK_THROWS(make_space(2, 0, {"a", "a"}));
  auto sp = make_space(2);
  CHECK_THROWS(make_vector<double>(sp, VecC<double>::Zero(3)));
  VecR<double> bad = VecR<double>::Ones(2);  // unit component nonzero
  CHECK_THROWS(make_state<double>(sp, bad));
}
