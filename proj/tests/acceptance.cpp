// Acceptance runner: re-derives the library's reference numbers and property
// suites, one criterion per line. A criterion fails when any of its checks
// misses the stated tolerance or its runtime budget; the process exits
// nonzero if any criterion failed.

#include <opcone/io.hpp>
#include <opcone/pietsch.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace opcone;
using cx = std::complex<double>;

std::string str(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct Criterion {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void expect_near(const std::string& what, double got, double want,
                   double tol) {
    if (!(std::abs(got - want) <= tol))
      failures.push_back(what + ": got " + str(got) + " expected " +
                         str(want) + " within " + str(tol));
  }
  void expect_le(const std::string& what, double got, double bound) {
    if (!(got <= bound))
      failures.push_back(what + ": got " + str(got) + " expected <= " +
                         str(bound));
  }
};

MatC<> random_herm(int n, std::mt19937_64& g) {
  std::normal_distribution<double> N(0, 1);
  MatC<> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cx(N(g), N(g));
  return MatC<>(0.5 * (a + a.adjoint()));
}

std::vector<double> grid_points(int n) {
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = i;
  return pts;
}

// ---------------------------------------------------------------- criteria

void crit_hs3(Criterion& c) {
  MatC<> x0 = hs3_x0<double>();
  Eigen::SelfAdjointEigenSolver<MatC<>> es(x0);
  const double s = std::sqrt(1.5);
  c.expect_near("low eigenvalue", es.eigenvalues()(0), -s, 1e-9);
  c.expect_near("middle eigenvalue", es.eigenvalues()(1), 0.0, 1e-9);
  c.expect_near("high eigenvalue", es.eigenvalues()(2), s, 1e-9);

  HSElement<> x{3, MatC<>(x0 + MatC<>::Identity(3, 3))};
  c.expect(in_HS_cone(x).member, "shifted element must be a member");
  c.expect_near("lambda_min of the shift", lambda_min(x.m), 1.0 - s, 1e-9);
}

void crit_hs2(Criterion& c) {
  auto g = rng_for(101);
  std::uniform_real_distribution<double> mag(-2, 2);
  int disagreements = 0;
  std::string first;
  for (int t = 0; t < 10000; ++t) {
    MatC<> m = std::pow(10.0, mag(g)) * random_herm(2, g);
    const bool hs = in_HS_cone(HSElement<>{2, m}, 1e-9).member;
    const bool psd = lambda_min(m) >= -1e-9;
    if (hs != psd) {
      ++disagreements;
      if (first.empty())
        first = "trial " + std::to_string(t) + ": hs " +
                (hs ? "member" : "non-member") + " vs lambda_min " +
                str(lambda_min(m));
    }
  }
  c.expect(disagreements == 0,
           "hs/psd disagreements: " + std::to_string(disagreements) +
               (first.empty() ? "" : " (" + first + ")"));
}

void crit_exm11(Criterion& c) {
  auto eta = deep_step_example<double>(4, 2048);
  L2Element<> eta0 = eta;
  eta0.values.array() -= cx(1, 0);
  c.expect_near("fluctuation mean", integrate(eta0).real(), 0.0, 1e-12);
  c.expect_near("fluctuation energy",
                l2_norm(eta0) * l2_norm(eta0), 1.0, 1e-12);
  c.expect(in_L2_cone(eta), "step element must lie in the L2 cone");
  c.expect_near("deepest value", eta.values.real().minCoeff(), 1.0 - 2.0,
                1e-12);
  c.expect_le("deepest value must be negative",
              eta.values.real().minCoeff(), -0.5);
}

void crit_chi_half(Criterion& c) {
  auto g = rng_for(401);
  std::uniform_real_distribution<double> uni(0.05, 1);

  // the norm identity on random atomic spaces and subsets
  for (int t = 0; t < 50; ++t) {
    const int npts = 2 + static_cast<int>(g() % 5);
    auto x = make_atomic_space(grid_points(npts));
    VecR<> w(npts);
    for (int p = 0; p < npts; ++p) w(p) = uni(g);
    w /= w.sum();
    auto mu = make_measure(x, w);
    std::vector<int> subset;
    double pa = 0;
    for (int p = 0; p < npts; ++p)
      if (g() % 2 == 0) {
        subset.push_back(p);
        pa += w(p);
      }
    auto chi = indicator<double>(x, mu, subset);
    L2Element<> centered = chi;
    centered.values.array() -= cx(pa, 0);
    const double lhs = l2_norm(centered) * l2_norm(centered);
    c.expect_near("norm identity", lhs, pa * (1.0 - pa), 1e-15);
  }

  // membership flip: bisect the flip point of chi_{first atom} in the
  // two-atom space and pin it to within 1e-9 of one half
  auto x = make_atomic_space({0.0, 1.0});
  auto member_at = [&](double p) {
    VecR<> w(2);
    w << p, 1.0 - p;
    auto mu = make_measure(x, w);
    return in_L2_cone(indicator<double>(x, mu, {0}), 1e-9);
  };
  c.expect(!member_at(0.45), "chi must leave the cone below one half");
  c.expect(member_at(0.55), "chi must enter the cone above one half");
  double lo = 0.45, hi = 0.55;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (member_at(mid) ? hi : lo) = mid;
  }
  c.expect_near("membership flip point", hi, 0.5, 1e-9 + 1e-12);
}

void crit_sin_support(Criterion& c) {
  auto s = wave_support<double>(64, 4096);
  const double tail = M_PI * M_PI / 6.0 - 1.0;
  auto rep = is_maximal(s);
  c.expect(rep.maximal, "wave support must be maximal");
  c.expect_le("pointwise energy", rep.worst, tail + 1e-12);
  c.expect_le("pointwise energy stays below one", rep.worst, 1.0);

  double partial = 0;
  for (int n = 1; n <= 64; ++n) partial += 1.0 / (double(n) * n);
  const double hs = support_hs_norm(s);
  const double hs2 = hs * hs;
  c.expect(hs2 >= partial && hs2 <= M_PI * M_PI / 6.0,
           "squared extension norm: got " + str(hs2) + " expected within [" +
               str(partial) + ", " + str(M_PI * M_PI / 6.0) + "]");

  auto d = separate(s);
  c.expect_near("separation defect q0", d.q0.cwiseAbs().maxCoeff(), 0.0,
                1e-12);
  c.expect_le("separation reconstruction error", d.reconstruction_error,
              1e-9);
}

void crit_support_roundtrip(Criterion& c) {
  auto g = rng_for(601);
  for (int t = 0; t < 100; ++t) {
    const int npts = 3 + t % 5;
    const int dim = 3 + t % 3;
    auto target = make_space(dim);
    auto x = make_atomic_space(grid_points(npts));
    auto m = random_unital_positive_map<double>(target, x, g);

    auto s = extract_support(m);
    auto rebuilt = build_map(s);
    c.expect_le("map reconstruction error",
                (rebuilt.cols - m.cols).cwiseAbs().maxCoeff(), 1e-9);
    c.expect(is_maximal(s).maximal, "extracted support must be maximal");

    auto d = separate(s);
    c.expect_le("separation reconstruction error", d.reconstruction_error,
                1e-9);
    for (const auto& term : d.terms) {
      c.expect(in_cone(term.p, 1e-9), "separation term must lie in the cone");
      c.expect(term.weight >= 0.0, "separation weight must be nonnegative");
    }
    if (c.failures.size() > 4) return;
  }
}

void crit_pietsch(Criterion& c) {
  auto g = rng_for(601);  // the maps of the round-trip criterion
  std::normal_distribution<double> N(0, 1);
  const double bound = 2.0 * std::sqrt(2.0);
  for (int t = 0; t < 100; ++t) {
    const int npts = 3 + t % 5;
    const int dim = 3 + t % 3;
    auto target = make_space(dim);
    auto x = make_atomic_space(grid_points(npts));
    auto m = random_unital_positive_map<double>(target, x, g);

    VecR<> dm = point_masses(factorize(m).mu);
    double worst = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      VecR<> v(npts);
      for (int p = 0; p < npts; ++p) v(p) = N(g);
      worst = std::max(
          worst, apply(m, v).coords.norm() - bound * dm.dot(v.cwiseAbs()));
    }
    c.expect_le("domination defect", worst, 1e-9);

    auto sb = summing_norm_lp(m, 400, 7);
    c.expect_le("lp upper bound", sb.upper, bound + 1e-6);
    if (c.failures.size() > 4) return;
  }
}

void crit_nuclear(Criterion& c) {
  auto g = rng_for(701);
  std::normal_distribution<double> N(0, 1);
  std::uniform_real_distribution<double> uni(0.05, 1);
  for (int t = 0; t < 100; ++t) {
    const int npts = 4 + t % 5;
    const int dim = 3 + t % 3;
    auto x = make_atomic_space(grid_points(npts));
    VecR<> w(npts);
    for (int p = 0; p < npts; ++p) w(p) = uni(g);
    w /= w.sum();
    auto mu = make_measure(x, w);
    MatR<> cols(dim, npts);
    for (int f = 0; f < dim; ++f)
      for (int p = 0; p < npts; ++p) cols(f, p) = N(g);
    auto rep = nuclear_bound_check(AtomMap<>{make_space(dim), x, cols}, mu);
    c.expect_le("nuclear norm vs hs norm", rep.nuclear, rep.hs + 1e-9);
    if (c.failures.size() > 4) return;
  }
}

void crit_norm_chains(Criterion& c) {
  auto g = rng_for(801);
  for (int t = 0; t < 10000; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 3));
    const int n = 1 + static_cast<int>(g() % 4);
    auto z = (t % 2 == 0) ? random_hmatrix<double>(sp, n, g)
                          : random_hermitian_hmatrix<double>(sp, n, g);
    const double o = norm_o(z), two = norm_2(z);
    const double so = norm_so(z, 8, static_cast<std::uint64_t>(t));
    const double eps = 1e-9 * (1 + two);
    c.expect_le("o norm vs 2 norm", o, two + eps);
    c.expect_le("2 norm vs sqrt(n) o norm", two,
                std::sqrt(double(n)) * o + eps);
    c.expect_le("so norm vs both bounds", so,
                std::min(std::sqrt(double(n)) * two, double(n) * o) + 1e-6);
    if (c.failures.size() > 4) return;
  }
}

void crit_duality(Criterion& c) {
  auto g = rng_for(901);
  std::normal_distribution<double> N(0, 1);
  for (int t = 0; t < 500; ++t) {
    auto sp = make_space(2 + static_cast<int>(g() % 2));
    const int n = 1 + static_cast<int>(g() % 3);
    const int m = 1 + static_cast<int>(g() % 3);

    // max member by coefficient domination
    auto z = zero_hmatrix<double>(sp, n);
    MatC<> S = MatC<>::Zero(n, n);
    for (int f = 0; f < sp->dim; ++f) {
      if (f == sp->unit_index) continue;
      MatC<> C = random_herm(n, g);
      set_coeff(z, f, C);
      S += herm_abs<double>(C);
    }
    MatC<> B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = cx(N(g), N(g));
    set_coeff(z, sp->unit_index, MatC<>(S + 0.1 * (B * B.adjoint())));

    auto w = random_state_built<double>(sp, m, 3, g);
    const double scale = 1 + norm_2(z) * norm_2(w);
    c.expect_le("max/min pairing lower bound", -duality_check(z, w),
                1e-9 * scale);

    auto zo = random_o_ball_state<double>(sp, n, g);
    auto wo = random_o_ball_state<double>(sp, m, g);
    const double oscale = 1 + norm_2(zo) * norm_2(wo);
    c.expect_le("self-dual pairing lower bound", -self_duality_check(zo, wo),
                1e-9 * oscale);
    if (c.failures.size() > 4) return;
  }
}

void crit_l22_minmax(Criterion& c) {
  auto sp = l22_space<double>();
  auto g = rng_for(1001);
  int conclusive = 0;
  for (int t = 0; t < 4000 && conclusive < 1000; ++t) {
    auto z = zero_hmatrix<double>(sp, 2);
    set_coeff(z, 0, MatC<>(random_herm(2, g) +
                           (t % 2 == 0 ? 3.0 : 1.0) *
                               MatC<>::Identity(2, 2)));
    set_coeff(z, 1, random_herm(2, g));
    const double exact = l22_min_margin(z);
    if (exact < 1e-6) continue;
    ++conclusive;
    auto cert = l22_max_certificate(z);
    c.expect_le("certificate residual", cert.residual_bound, 1e-9);
    if (c.failures.size() > 4) return;
  }
  c.expect(conclusive == 1000,
           "conclusive members found: " + std::to_string(conclusive) +
               " of 1000");
}

void crit_swap(Criterion& c) {
  for (int dim : {2, 4, 6, 8}) {
    auto rep = cone_swap_check<double>(dim, 0, dim - 1, 250, 0);
    const std::string tag = "dim " + std::to_string(dim) + " ";
    c.expect_le(tag + "involution defect", rep.involution_defect, 1e-12);
    c.expect_le(tag + "unitary defect", rep.unitary_defect, 1e-12);
    c.expect(rep.cone_failures == 0,
             tag + "cone failures: " + std::to_string(rep.cone_failures));
    c.expect_le(tag + "margin drift", rep.margin_drift, 1e-12);
    c.expect_le(tag + "transport residual", rep.transport_residual, 1e-10);
  }
}

void crit_state_geometry(Criterion& c) {
  auto g = rng_for(1101);
  std::uniform_real_distribution<double> uni(0.05, 1);
  for (int t = 0; t < 100; ++t) {
    const int dim = 3 + t % 3;
    auto sp = make_space(dim);
    const int npts = 4 + t % 5;
    std::vector<WeightedState<>> pts;
    VecR<> w(npts);
    for (int p = 0; p < npts; ++p) w(p) = uni(g);
    w *= 0.45 / w.sum();  // total below 1/2 keeps the completion feasible
    for (int p = 0; p < npts; ++p)
      pts.push_back(
          WeightedState<>{StatePoint<>{sp, random_ball_he<double>(*sp, g)},
                          w(p)});
    auto mu = complete_assignment(MassAssignment<>{sp, pts});

    auto bary = measure_barycenter(mu.space, mu.atoms);
    VecC<> fluct = bary.coords;
    fluct(sp->unit_index) = 0;
    c.expect_le("barycenter defect", fluct.norm(), 1e-12);
    c.expect_near("barycenter unit component",
                  bary.coords(sp->unit_index).real(), 1.0, 1e-12);

    double hs2 = 0;
    for (int f = 0; f < dim; ++f) {
      const double nf = l2_norm(iota(basis_vector<double>(sp, f), mu));
      hs2 += nf * nf;
    }
    c.expect_le("embedding hs norm", std::sqrt(hs2),
                std::sqrt(2.0) + 1e-9);

    MatR<> P = conditional_expectation(mu);
    VecR<> dm = point_masses(mu.mu);
    MatR<> W = dm.asDiagonal();
    c.expect_le("projector idempotence", (P * P - P).norm(), 1e-10);
    c.expect_le("projector self-adjointness",
                (W * P - P.transpose() * W).norm(), 1e-10);

    for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
      if (mu.atoms[a].c <= 0) continue;
      auto mb = mass_bounds(mu, static_cast<int>(a));
      for (int i = 0; i + 1 < 5; ++i)
        c.expect_le("mass chain link",
                    mb.chain[static_cast<std::size_t>(i)],
                    mb.chain[static_cast<std::size_t>(i) + 1] + 1e-10);
      c.expect_le("mass against the cap", mb.mass, mb.cap + 1e-9);
    }
    if (c.failures.size() > 4) return;
  }

  // the antipodal measure saturates the cap at a unit-fluctuation state
  auto sp = make_space(3);
  VecR<> dir = VecR<>::Zero(3);
  dir(1) = 1.0;
  auto mb = mass_bounds(antipodal_measure(StatePoint<>{sp, dir}), 0);
  c.expect_near("saturated mass", mb.mass, 0.5, 1e-12);
  c.expect_near("saturated cap", mb.cap, 0.5, 1e-12);
}

void crit_concentration(Criterion& c) {
  auto g = rng_for(1201);
  std::uniform_real_distribution<double> uni(0.05, 0.7);
  int compared = 0;
  for (int t = 0; t < 1000; ++t) {
    const int dim = 2 + t % 3;
    auto sp = make_space(dim);
    const int k = 1 + static_cast<int>(g() % 3);
    std::vector<WeightedState<>> pts;
    double total = 0;
    VecC<> bary = VecC<>::Zero(dim);
    for (int i = 0; i < k; ++i) {
      VecR<> s0 = random_ball_he<double>(*sp, g);
      const double ci = uni(g);
      pts.push_back(WeightedState<>{StatePoint<>{sp, s0}, ci});
      total += ci;
      bary += ci * s0.cast<cx>();
    }
    MassAssignment<> a{sp, pts};
    auto rep = concentration_feasible(a);
    const double slack_direct = (1.0 - total) - bary.norm();
    if (std::abs(slack_direct) < 1e-6) continue;  // skip the exact boundary
    ++compared;
    c.expect(rep.feasible == (slack_direct >= 0 && total <= 1.0),
             "feasibility disagrees at slack " + str(slack_direct));
    if (rep.feasible) {
      auto mu = complete_assignment(a);  // validates internally
      for (int i = 0; i < k; ++i) {
        c.expect_le("completion preserves points",
                    (mu.atoms[static_cast<std::size_t>(i)].s.s0 -
                     pts[static_cast<std::size_t>(i)].s.s0)
                        .norm(),
                    1e-12);
      }
    }
    if (c.failures.size() > 4) return;
  }
  c.expect(compared >= 900, "off-boundary assignments compared: " +
                                std::to_string(compared));
}

void crit_eb(Criterion& c) {
  auto g = rng_for(1301);
  std::normal_distribution<double> N(0, 1);
  std::uniform_real_distribution<double> uni(0.2, 1.2);
  int disagreements = 0;
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 3;
    auto sp = make_space(dim);
    std::vector<MatC<>> blocks(static_cast<std::size_t>(dim),
                               MatC<>::Zero(2, 2));
    if (t % 3 == 0) {
      // states paired with densities: breaking by construction
      const int terms = 2 + t % 2;
      for (int l = 0; l < terms; ++l) {
        VecR<> s = random_ball_he<double>(*sp, g);
        s(sp->unit_index) += 1.0;
        MatC<> b(2, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) b(i, j) = cx(N(g), N(g));
        MatC<> rho = b * b.adjoint();
        rho /= rho.trace().real();
        for (int f = 0; f < dim; ++f)
          blocks[static_cast<std::size_t>(f)] += s(f) * rho;
      }
    } else if (t % 3 == 1) {
      // identity unit block with hermitian fluctuations
      for (int f = 0; f < dim; ++f)
        blocks[static_cast<std::size_t>(f)] =
            (f == sp->unit_index)
                ? MatC<>(MatC<>::Identity(2, 2))
                : MatC<>(uni(g) * random_herm(2, g));
    } else {
      // positive semidefinite blocks throughout
      for (int f = 0; f < dim; ++f) {
        MatC<> b(2, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) b(i, j) = cx(N(g), N(g));
        blocks[static_cast<std::size_t>(f)] =
            MatC<>(uni(g) * (b * b.adjoint()));
      }
    }
    auto f = make_eb_map<double>(sp, blocks);
    auto rep = eb_check(f, 40, 1500 + static_cast<std::uint64_t>(t));
    if (rep.disagreement) {
      ++disagreements;
      c.expect(false, "routes disagree on map " + std::to_string(t) +
                          " (verdict " + eb_verdict_name(rep.verdict) + ")");
    }
    if (c.failures.size() > 4) return;
  }
  c.expect(disagreements == 0,
           "disagreements: " + std::to_string(disagreements));
}

struct Entry {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Criterion&)> fn;
};

}  // namespace

int main() {
  const std::vector<Entry> entries = {
      {1, "hilbert-schmidt 3x3 boundary element", 1, crit_hs3},
      {2, "2x2 hilbert-schmidt cone equals the psd cone", 5, crit_hs2},
      {3, "deep step function stays in the L2 cone", 1, crit_exm11},
      {4, "indicator membership flips at mass one half", 1, crit_chi_half},
      {5, "wave support bounds and separation", 10, crit_sin_support},
      {6, "support and map round trip with separation", 30,
       crit_support_roundtrip},
      {7, "pietsch domination and lp upper bound", 30, crit_pietsch},
      {8, "nuclear norm of embedded step maps", 10, crit_nuclear},
      {9, "norm chains across matrix levels", 60, crit_norm_chains},
      {10, "min max duality and self-duality", 60, crit_duality},
      {11, "two-dimensional min equals max with certificates", 60,
       crit_l22_minmax},
      {12, "swap transport between units", 5, crit_swap},
      {13, "state measure geometry", 30, crit_state_geometry},
      {14, "concentration feasibility and completion", 10,
       crit_concentration},
      {15, "entanglement-breaking routes never disagree", 60, crit_eb},
  };

  int failed = 0;
  for (const auto& e : entries) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(c);
    } catch (const std::exception& ex) {
      c.failures.push_back(std::string("exception: ") + ex.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > e.budget_s)
      c.failures.push_back("runtime " + str(secs) + " s exceeds budget " +
                           str(e.budget_s) + " s");
    const bool pass = c.failures.empty();
    std::printf("[%s] %2d. %s (%.2f s)\n", pass ? "PASS" : "FAIL", e.id,
                e.title, secs);
    for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    if (!pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
