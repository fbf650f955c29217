#pragma once
// Absolutely summing norms and their LP estimates, the canonical
// factorization of a positive map through L2, and the nuclear-norm bound
// for composites with the L2 embedding.

#include <opcone/support.hpp>

namespace opcone {

// ------------------------------------------------------------ simplex core

template <class T = double>
struct LpResult {
  bool ok = false;
  T value = 0;
  VecR<T> x;     // primal solution
  VecR<T> dual;  // optimal row prices
};

// dense tableau simplex with Bland's rule: max c.x subject to A x <= b,
// x >= 0; requires b >= 0 so the slack basis starts feasible
template <class T = double>
LpResult<T> lp_max(const MatR<T>& A, const VecR<T>& b, const VecR<T>& c,
                   int max_iters = 50000) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("lp_max: shape mismatch");
  if (m > 0 && b.minCoeff() < 0)
    throw std::invalid_argument("lp_max: b >= 0 required");

  MatR<T> tab = MatR<T>::Zero(m + 1, n + m + 1);
  tab.block(0, 0, m, n) = A;
  tab.block(0, n, m, m).setIdentity();
  tab.col(n + m).head(m) = b;
  tab.row(m).head(n) = -c.transpose();

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  LpResult<T> out;
  for (int it = 0; it < max_iters; ++it) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (tab(m, j) < -T(1e-12)) {
        enter = j;
        break;
      }
    if (enter < 0) {
      out.ok = true;
      break;
    }
    int leave = -1;
    T best = 0;
    for (int i = 0; i < m; ++i) {
      if (tab(i, enter) <= T(1e-12)) continue;
      T ratio = tab(i, n + m) / tab(i, enter);
      if (leave < 0 || ratio < best - T(1e-15) ||
          (ratio <= best + T(1e-15) && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return out;  // unbounded
    tab.row(leave) /= tab(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      T f = tab(i, enter);
      if (f != T(0)) tab.row(i) -= f * tab.row(leave);
    }
    basis[leave] = enter;
  }
  if (!out.ok) return out;

  out.value = tab(m, n + m);
  out.x = VecR<T>::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) out.x(basis[i]) = tab(i, n + m);
  out.dual = tab.row(m).segment(n, m).transpose();
  return out;
}

// --------------------------------------------------------- summing norms

template <class T = double>
struct SummingBounds {
  T lower = 0;        // certified lower bound on pi(T)
  T upper = 0;        // upper estimate; certified only when flagged
  bool upper_certified = false;
  VecR<T> weights;    // dominating measure weights backing the upper value
};

namespace detail {

// coordinate vectors, +-1 sign patterns, and uniform draws
template <class T>
std::vector<VecR<T>> summing_test_vectors(int n, int samples,
                                          std::mt19937_64& g) {
  std::vector<VecR<T>> out;
  for (int t = 0; t < n; ++t) out.push_back(VecR<T>::Unit(n, t));
  if (n <= 10) {
    for (long mask = 0; mask < (1L << n); ++mask) {
      VecR<T> v(n);
      for (int t = 0; t < n; ++t) v(t) = (mask >> t) & 1 ? T(1) : T(-1);
      out.push_back(v);
    }
  }
  std::uniform_real_distribution<T> uni(-1, 1);
  while (static_cast<int>(out.size()) < samples) {
    VecR<T> v(n);
    for (int t = 0; t < n; ++t) v(t) = uni(g);
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

// pi(T) for a map off a finite point set: the canonical dominating weights
// w_t = ||T(chi_t)|| give a certified upper bound, and the LP over sampled
// domination constraints gives a certified lower bound; the coordinate
// constraints make the two meet on atoms
template <class T>
SummingBounds<T> summing_norm_lp(const AtomMap<T>& m, int samples = 1000,
                                 std::uint64_t seed = 0) {
  const int npts = static_cast<int>(m.cols.cols());
  auto g = rng_for(seed);
  auto vs = detail::summing_test_vectors<T>(npts, samples, g);
  const int s = static_cast<int>(vs.size());

  MatR<T> A(s, npts);
  VecR<T> bnorm(s);
  for (int i = 0; i < s; ++i) {
    A.row(i) = vs[i].cwiseAbs().transpose();
    bnorm(i) = (m.cols * vs[i]).norm();
  }

  SummingBounds<T> out;
  out.weights = VecR<T>(npts);
  for (int t = 0; t < npts; ++t) out.weights(t) = m.cols.col(t).norm();
  out.upper = out.weights.sum();
  out.upper_certified = true;

  // dual of min 1.w, A w >= b, w >= 0
  auto lp = lp_max<T>(A.transpose(), VecR<T>::Ones(npts), bnorm);
  if (lp.ok) {
    out.lower = lp.value;
    // LP prices form a dominating measure on the sampled constraints; keep
    // the canonical weights, which dominate every v
  } else {
    for (int i = 0; i < s; ++i)
      out.lower = std::max(out.lower, bnorm(i) / vs[i].cwiseAbs().maxCoeff());
  }
  return out;
}

// pi(T) for T between finite-dimensional real Hilbert spaces. The lower
// bound comes from finite families: sum ||T v_i|| / max_{signs} ||sum s_i
// v_i||, which no dominating measure can beat. The upper value solves the
// sampled LP over a finite set of unit functionals and is an estimate, not
// a certificate, as the true minimum ranges over all measures on the ball.
template <class T = double>
SummingBounds<T> summing_norm_hilbert(const MatR<T>& tmat, int samples = 400,
                                      std::uint64_t seed = 0) {
  const int n = static_cast<int>(tmat.cols());
  auto g = rng_for(seed);
  std::normal_distribution<T> gauss(0, 1);

  auto random_unit = [&] {
    VecR<T> v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(g);
    T nv = v.norm();
    return VecR<T>(nv > 0 ? (v / nv).eval() : VecR<T>::Unit(n, 0));
  };

  std::vector<VecR<T>> xi;
  for (int i = 0; i < n; ++i) {
    xi.push_back(VecR<T>::Unit(n, i));
    xi.push_back(-VecR<T>::Unit(n, i));
  }
  for (int i = 0; i < 16 * n; ++i) xi.push_back(random_unit());

  std::vector<std::vector<VecR<T>>> families;
  std::vector<VecR<T>> onb;
  for (int i = 0; i < n; ++i) onb.push_back(VecR<T>::Unit(n, i));
  families.push_back(onb);
  for (int rep = 0; rep < 6; ++rep) {
    std::vector<VecR<T>> fam;
    for (int i = 0; i < 4; ++i) fam.push_back(random_unit());
    families.push_back(fam);
  }

  std::vector<VecR<T>> vs;
  for (const auto& fam : families)
    for (const auto& v : fam) vs.push_back(v);
  while (static_cast<int>(vs.size()) < samples) vs.push_back(random_unit());

  const int s = static_cast<int>(vs.size()), k = static_cast<int>(xi.size());
  MatR<T> A(s, k);
  VecR<T> bnorm(s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < k; ++j) A(i, j) = std::abs(xi[j].dot(vs[i]));
    bnorm(i) = (tmat * vs[i]).norm();
  }

  SummingBounds<T> out;
  for (const auto& fam : families) {
    const int fs = static_cast<int>(fam.size());
    T worst = 0;
    for (long mask = 0; mask < (1L << fs); ++mask) {
      VecR<T> acc = VecR<T>::Zero(n);
      for (int i = 0; i < fs; ++i)
        acc += ((mask >> i) & 1 ? T(1) : T(-1)) * fam[i];
      worst = std::max(worst, T(acc.norm()));
    }
    T gain = 0;
    for (const auto& v : fam) gain += (tmat * v).norm();
    if (worst > 0) out.lower = std::max(out.lower, gain / worst);
  }

  auto lp = lp_max<T>(A.transpose(), VecR<T>::Ones(k), bnorm);
  if (lp.ok) {
    out.upper = lp.value;
    out.weights = lp.dual;
  }
  out.upper_certified = false;
  return out;
}

// ---------------------------------------------------------- factorization

// T = T2 . iota . T1 with T1 acting pointwise on C(X), iota the canonical
// embedding into L2(mu), and T2 the support map extension
template <class T = double>
struct Factorization {
  MeasureOnX mu;
  VecR<T> t1_diag;   // pointwise contraction C(X) -> C(X)
  SupportOnX<T> k;   // kernel of T2 : L2(X, mu) -> H
  T bound = 0;       // pi estimate dominating ||T2||
};

template <class T>
Factorization<T> factorize(const AtomMap<T>& m, T tol = T(kDefaultTol)) {
  auto s = extract_support(m, tol);
  Factorization<T> f;
  f.mu = s.mu;
  f.t1_diag = VecR<T>::Ones(m.cols.cols());
  f.k = std::move(s);
  f.bound = 2 * std::sqrt(T(2)) * T(mass(f.mu));
  return f;
}

template <class T>
HVector<T> factor_apply(const Factorization<T>& f, const VecR<>& v) {
  VecR<> scaled = f.t1_diag.template cast<double>().cwiseProduct(v);
  return apply(build_map(f.k), scaled);
}

// coordinate matrix of T2 in the orthonormal basis chi_p / sqrt(dm_p)
template <class T>
MatR<T> t2_matrix(const Factorization<T>& f) {
  VecR<> dm = point_masses(f.mu);
  MatR<T> M = f.k.k;
  for (int p = 0; p < M.cols(); ++p) M.col(p) *= T(std::sqrt(dm(p)));
  return M;
}

// ------------------------------------------------------------ nuclear bound

template <class T = double>
struct NuclearReport {
  T nuclear = 0;  // trace norm of the composite T . iota on C(X)
  T hs = 0;       // Hilbert-Schmidt norm of T on L2(mu)
};

template <class T = double>
T trace_norm(const MatR<T>& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatR<T>> svd(M);
  return svd.singularValues().sum();
}

// m holds the columns T(chi_p) of a finite-rank map out of L2(mu); the
// composite with the embedding has trace norm at most the HS norm of T
// when mu is a probability measure
template <class T>
NuclearReport<T> nuclear_bound_check(const AtomMap<T>& m,
                                     const MeasureOnX& mu) {
  if (!same_x(m.x, mu.space))
    throw std::invalid_argument("nuclear_bound_check: measure space mismatch");
  VecR<> dm = point_masses(mu);
  NuclearReport<T> rep;
  rep.nuclear = trace_norm<T>(m.cols);
  T acc = 0;
  for (int p = 0; p < m.cols.cols(); ++p) {
    T cn = m.cols.col(p).squaredNorm();
    if (dm(p) <= 0) {
      if (cn > T(1e-20))
        throw std::invalid_argument(
            "nuclear_bound_check: image charged on a null point");
      continue;
    }
    acc += cn / T(dm(p));
  }
  rep.hs = std::sqrt(acc);
  return rep;
}

// ---------------------------------------------- embedding after a map

template <class T = double>
struct EmbeddedHsReport {
  T hs = 0;        // ||iota . T||_2
  T sup_norm = 0;  // ||T : H -> C(X)||
  T bound = 0;     // sup_norm * mass^{1/2}
};

// T: H -> C(X) given by its pointwise evaluation rows; composing with the
// embedding into L2(mu) is Hilbert-Schmidt with the mass bound
template <class T = double>
EmbeddedHsReport<T> embed_hs_report(const MatR<T>& rows,
                                    const MeasureOnX& mu) {
  if (rows.rows() != mu.space->size())
    throw std::invalid_argument("embed_hs_report: row count mismatch");
  VecR<> dm = point_masses(mu);
  EmbeddedHsReport<T> rep;
  T acc = 0;
  for (int p = 0; p < rows.rows(); ++p) {
    T rn = rows.row(p).squaredNorm();
    acc += T(dm(p)) * rn;
    rep.sup_norm = std::max(rep.sup_norm, std::sqrt(rn));
  }
  rep.hs = std::sqrt(acc);
  rep.bound = rep.sup_norm * std::sqrt(T(mass(mu)));
  return rep;
}

}  // namespace opcone
