#pragma once
// H-supports: families {k_f} of real functions on a compact space (k_e = 1)
// encoding unital positive maps Tv = sum_f (v, k_f) f, their extraction from
// maps, pointwise maximality, and separable/nuclear decompositions. Also the
// vector-valued variant of a support living inside another unital space.

#include <opcone/spaces.hpp>

namespace opcone {

// ------------------------------------------------------------------ AtomMap

// linear map C(X) -> H stored columnwise over the points of X: column p
// holds the coordinates of T(chi_p)
template <class T = double>
struct AtomMap {
  SpacePtr target;
  XPtr x;
  MatR<T> cols;  // dim x npoints
};

template <class T>
HVector<T> apply(const AtomMap<T>& m, const VecR<>& v) {
  if (v.size() != m.cols.cols())
    throw std::invalid_argument("apply: size mismatch");
  VecR<T> c = m.cols * v.template cast<T>();
  return HVector<T>{m.target, c.template cast<std::complex<T>>()};
}

template <class T>
HVector<T> map_one(const AtomMap<T>& m) {
  return apply(m, VecR<>(VecR<>::Ones(m.cols.cols())));
}

// entrywise application to a level-n matrix of functions on X; `values` has
// row i*n+j = entry (i,j) sampled over the points
template <class T>
HMatrix<T> apply_level(const AtomMap<T>& m, const MatC<T>& values, int n) {
  if (values.cols() != m.cols.cols())
    throw std::invalid_argument("apply_level: size mismatch");
  HMatrix<T> out{m.target, n,
                 MatC<T>(values * m.cols.transpose()
                                      .template cast<std::complex<T>>())};
  return out;
}

// -------------------------------------------------------------- SupportOnX

template <class T = double>
struct SupportOnX {
  SpacePtr target;
  XPtr x;
  MeasureOnX mu;  // probability
  MatR<T> k;      // dim x npoints; the unit row is constant 1
};

// Validates the defining properties: k_e = 1, |k_f| <= 1, zero mean for
// f != e, and the integrated inequality sum_f (v,k_f)^2 <= (v,1)^2 on a
// sample of nonnegative test functions.
template <class T = double>
SupportOnX<T> make_support_on_x(const SpacePtr& target, const MeasureOnX& mu,
                                MatR<T> k, T tol = T(kDefaultTol),
                                int samples = 200, std::uint64_t seed = 0) {
  const int dim = target->dim, e = target->unit_index;
  const int npts = mu.space->size();
  if (k.rows() != dim || k.cols() != npts)
    throw std::invalid_argument("support: kernel must be dim x npoints");
  if (!is_probability(mu, (double)tol))
    throw std::invalid_argument("support: probability measure required");
  if ((k.row(e).array() - T(1)).abs().maxCoeff() > tol)
    throw std::invalid_argument("support: unit row must be constant 1");
  VecR<> dm = point_masses(mu);
  for (int f = 0; f < dim; ++f) {
    if (f == e) continue;
    if (k.row(f).cwiseAbs().maxCoeff() > T(1) + tol)
      throw std::invalid_argument("support: |k_f| <= 1 violated");
    T mean = 0;
    for (int p = 0; p < npts; ++p) mean += T(dm(p)) * k(f, p);
    if (std::abs(mean) > tol * 10)
      throw std::invalid_argument("support: k_f must have zero mean");
  }
  std::uniform_real_distribution<T> uni(0, 1);
  auto g = rng_for(seed);
  for (int s = 0; s < samples; ++s) {
    VecR<T> v(npts);
    for (int p = 0; p < npts; ++p) v(p) = uni(g);
    T total = 0, acc = 0;
    for (int p = 0; p < npts; ++p) total += T(dm(p)) * v(p);
    for (int f = 0; f < dim; ++f) {
      if (f == e) continue;
      T ip = 0;
      for (int p = 0; p < npts; ++p) ip += T(dm(p)) * k(f, p) * v(p);
      acc += ip * ip;
    }
    if (acc > total * total * (1 + tol) + tol)
      throw std::invalid_argument("support: integrated inequality fails");
  }
  return SupportOnX<T>{target, mu.space, mu, std::move(k)};
}

template <class T>
AtomMap<T> build_map(const SupportOnX<T>& s) {
  VecR<> dm = point_masses(s.mu);
  MatR<T> cols = s.k;
  for (int p = 0; p < cols.cols(); ++p) cols.col(p) *= T(dm(p));
  return AtomMap<T>{s.target, s.x, std::move(cols)};
}

// Hilbert-Schmidt norm of the L2 extension: (sum_f ||k_f||_2^2)^{1/2}
template <class T>
T support_hs_norm(const SupportOnX<T>& s) {
  VecR<> dm = point_masses(s.mu);
  T acc = 0;
  for (int f = 0; f < s.k.rows(); ++f)
    for (int p = 0; p < s.k.cols(); ++p)
      acc += T(dm(p)) * s.k(f, p) * s.k(f, p);
  return std::sqrt(acc);
}

// Exact on finite point sets: mu(p) = (T(chi_p), e) and k_f(p) is the
// density of (T(chi_p), f) against mu. Null points get k_f = 0.
template <class T>
SupportOnX<T> extract_support(const AtomMap<T>& m, T tol = T(kDefaultTol)) {
  const int dim = m.target->dim, e = m.target->unit_index;
  const int npts = static_cast<int>(m.cols.cols());
  HVector<T> one = map_one(m);
  if (norm(one - unit_vector<T>(m.target)) > tol * std::sqrt(T(npts)))
    throw std::invalid_argument("extract_support: map is not unital");
  VecR<> masses(npts);
  MatR<T> k = MatR<T>::Zero(dim, npts);
  k.row(e).setOnes();
  for (int p = 0; p < npts; ++p) {
    T mass = m.cols(e, p);
    if (mass < -tol)
      throw std::invalid_argument("extract_support: negative mass at point " +
                                  std::to_string(p));
    masses(p) = std::max(mass, T(0));
    if (masses(p) <= tol) {
      if (m.cols.col(p).norm() > tol * 10)
        throw std::invalid_argument(
            "extract_support: null point with nonzero image (not positive)");
      continue;
    }
    for (int f = 0; f < dim; ++f)
      if (f != e) k(f, p) = m.cols(f, p) / masses(p);
  }
  MeasureOnX mu;
  if (m.x->kind == XKind::Atoms) {
    mu = make_measure(m.x, masses);
  } else {
    mu = make_measure(m.x, VecR<>(masses.cwiseQuotient(m.x->weights)));
  }
  return SupportOnX<T>{m.target, m.x, std::move(mu), std::move(k)};
}

// ------------------------------------------------------------- maximality

template <class T = double>
struct MaximalityReport {
  bool maximal = true;
  T worst = 0;   // max over points of sum_{f != e} k_f^2
  T margin = 1;  // 1 - worst
  int argmax = -1;
};

template <class T>
MaximalityReport<T> is_maximal(const SupportOnX<T>& s, T tol = T(kDefaultTol)) {
  const int e = s.target->unit_index;
  MaximalityReport<T> rep;
  for (int p = 0; p < s.k.cols(); ++p) {
    T acc = 0;
    for (int f = 0; f < s.k.rows(); ++f)
      if (f != e) acc += s.k(f, p) * s.k(f, p);
    if (acc > rep.worst) {
      rep.worst = acc;
      rep.argmax = p;
    }
  }
  rep.margin = 1 - rep.worst;
  rep.maximal = rep.worst <= 1 + tol;
  return rep;
}

// ------------------------------------------------------------- separation

// rank-one piece p (+) weight * delta_point of a separable decomposition
template <class T = double>
struct SepTerm {
  HVector<T> p;
  int point = 0;
  T weight = 0;
};

// T(chi_p) = weight_p p_p + correction_p e - q0_p e pointwise; q0 = 0 exactly
// when the support is maximal, otherwise the nuclear residual of the form
// T + e (.) q0 is reported
template <class T = double>
struct SeparableDecomposition {
  std::vector<SepTerm<T>> terms;
  VecR<> correction;  // point masses of the trailing (e, (mu - q)+) term
  VecR<> q0;          // point masses of (q - mu)+
  T reconstruction_error = 0;
  int term_count() const { return static_cast<int>(terms.size()) + 1; }
};

template <class T>
SeparableDecomposition<T> separate(const SupportOnX<T>& s) {
  const int e = s.target->unit_index;
  const VecR<> dm = point_masses(s.mu);
  const int npts = static_cast<int>(s.k.cols());
  SeparableDecomposition<T> out;
  out.correction = VecR<>::Zero(npts);
  out.q0 = VecR<>::Zero(npts);

  for (int p = 0; p < npts; ++p) {
    if (dm(p) <= 0) continue;
    HVector<T> zeta = zero_vector<T>(s.target);
    T nsq = 0;
    for (int f = 0; f < s.k.rows(); ++f) {
      if (f == e) continue;
      zeta.coords(f) = std::complex<T>(s.k(f, p), 0);
      nsq += s.k(f, p) * s.k(f, p);
    }
    const T n = std::sqrt(nsq);
    if (n > 0) {
      out.terms.push_back(
          SepTerm<T>{zeta + n * unit_vector<T>(s.target), p, T(dm(p))});
    }
    out.correction(p) = dm(p) * std::max(T(1) - n, T(0));
    out.q0(p) = dm(p) * std::max(n - T(1), T(0));
  }

  // reconstruction check against the support's own map columns
  AtomMap<T> m = build_map(s);
  MatR<T> recon = MatR<T>::Zero(m.cols.rows(), npts);
  for (const auto& t : out.terms)
    recon.col(t.point) += t.weight * t.p.coords.real();
  for (int p = 0; p < npts; ++p) {
    recon(e, p) += out.correction(p) - out.q0(p);
    out.reconstruction_error =
        std::max(out.reconstruction_error,
                 T((recon.col(p) - m.cols.col(p)).norm()));
  }
  return out;
}

// exact max-cone certificate for the image of a pointwise-PSD level-n matrix
// under a maximal support's map: T^(n)(V) = sum_p (dm_p V_p) (x) (zeta_p + e)
template <class T>
MaxCertificate<T> max_certificate_from_support(const SupportOnX<T>& s,
                                               const MatC<T>& values, int n) {
  const int e = s.target->unit_index;
  const VecR<> dm = point_masses(s.mu);
  MaxCertificate<T> cert;
  for (int p = 0; p < s.k.cols(); ++p) {
    if (dm(p) <= 0) continue;
    MatC<T> V(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) V(i, j) = values(i * n + j, p);
    MatC<T> root = herm_sqrt_pos<T>(V);
    if (root.cwiseAbs().maxCoeff() <= T(kEigClamp)) continue;
    HVector<T> state = unit_vector<T>(s.target);
    for (int f = 0; f < s.k.rows(); ++f)
      if (f != e) state.coords(f) = std::complex<T>(s.k(f, p), 0);
    cert.terms.push_back(
        CertTerm<T>{std::complex<T>(std::sqrt(T(dm(p))), 0) * root, state});
  }
  cert.residual_bound = certificate_residual(cert, apply_level(build_map(s), values, n));
  return cert;
}

// ------------------------------------------------ random positive test maps

// unital positive map on an atom space: columns mu_t (zeta_t + e) with the
// zeta_t centered to mu-mean zero and scaled into the unit ball, which keeps
// T(1) = e and every T(chi_t) in the cone
template <class T = double>
AtomMap<T> random_unital_positive_map(const SpacePtr& target, const XPtr& x,
                                      std::mt19937_64& g) {
  const int dim = target->dim, e = target->unit_index;
  const int npts = x->size();
  std::uniform_real_distribution<T> uni(T(0.05), 1);
  VecR<T> w(npts);
  for (int p = 0; p < npts; ++p) w(p) = uni(g);
  w /= w.sum();

  MatR<T> z = MatR<T>::Zero(dim, npts);
  std::normal_distribution<T> N(0, 1);
  for (int p = 0; p < npts; ++p)
    for (int f = 0; f < dim; ++f)
      if (f != e) z(f, p) = N(g);
  VecR<T> mean = z * w;
  z.colwise() -= mean;
  T worst = 0;
  for (int p = 0; p < npts; ++p) worst = std::max(worst, T(z.col(p).norm()));
  if (worst > 1) z /= worst;

  MatR<T> cols = z;
  cols.row(e).setOnes();
  for (int p = 0; p < npts; ++p) cols.col(p) *= w(p);
  return AtomMap<T>{target, x, std::move(cols)};
}

// ------------------------------------------------------------- SupportInK

// vector-valued support: k_f lives in another unital space K, and the map
// T_k eta = sum_f (eta, k_f) f is positive iff the family is a support
template <class T = double>
struct SupportInK {
  SpacePtr source;  // K with unit u
  SpacePtr target;  // H with unit e
  MatR<T> k;        // target dim x source dim; row f = coordinates of k_f
};

template <class T>
HVector<T> apply_K(const SupportInK<T>& s, const HVector<T>& eta) {
  if (!same_space(s.source, eta.space))
    throw std::invalid_argument("apply_K: wrong source space");
  return HVector<T>{s.target,
                    VecC<T>(s.k.template cast<std::complex<T>>() * eta.coords)};
}

template <class T = double>
SupportInK<T> identity_support(const SpacePtr& sp) {
  return SupportInK<T>{sp, sp, MatR<T>::Identity(sp->dim, sp->dim)};
}

// validated construction: k_e must lie in the source cone, and the support
// inequality sum_{f != e} (eta, k_f)^2 <= (eta, k_e)^2 is sampled over cone
// states eta = s0 + u
template <class T = double>
SupportInK<T> make_support_in_K(const SpacePtr& source, const SpacePtr& target,
                                MatR<T> k, T tol = T(kDefaultTol),
                                int samples = 200, std::uint64_t seed = 0) {
  if (k.rows() != target->dim || k.cols() != source->dim)
    throw std::invalid_argument("make_support_in_K: shape mismatch");
  const int e = target->unit_index;
  HVector<T> ke{source,
                VecC<T>(k.row(e).transpose().template cast<std::complex<T>>())};
  if (!in_cone(ke, T(10) * tol))
    throw std::invalid_argument("make_support_in_K: k_e is not in the cone");
  auto g = rng_for(seed);
  for (int s = 0; s < samples; ++s) {
    VecR<T> eta = random_ball_he<T>(*source, g);
    eta(source->unit_index) += 1;
    T lhs = 0;
    const VecR<T> img = k * eta;
    for (int f = 0; f < k.rows(); ++f)
      if (f != e) lhs += img(f) * img(f);
    if (lhs > img(e) * img(e) + tol)
      throw std::invalid_argument("make_support_in_K: support inequality fails");
  }
  return SupportInK<T>{source, target, std::move(k)};
}

// reads the support off a positive map given as a real matrix (row f is the
// adjoint vector k_f); positivity is sampled over cone states and a
// violation is an error
template <class T = double>
SupportInK<T> extract_support_K(const SpacePtr& source, const SpacePtr& target,
                                const MatR<T>& matrix, T tol = T(kDefaultTol),
                                int samples = 200, std::uint64_t seed = 0) {
  if (matrix.rows() != target->dim || matrix.cols() != source->dim)
    throw std::invalid_argument("extract_support_K: shape mismatch");
  auto g = rng_for(seed);
  for (int s = 0; s < samples; ++s) {
    VecR<T> eta = random_ball_he<T>(*source, g);
    eta(source->unit_index) += 1;
    HVector<T> img{target, VecC<T>((matrix * eta).template cast<std::complex<T>>())};
    if (!in_cone(img, T(100) * tol))
      throw std::invalid_argument(
          "extract_support_K: map is not positive on a sampled cone state");
  }
  return SupportInK<T>{source, target, matrix};
}

template <class T>
T support_K_sup_norm(const SupportInK<T>& s) {
  T worst = 0;
  for (int f = 0; f < s.k.rows(); ++f)
    worst = std::max(worst, T(s.k.row(f).norm()));
  return worst;
}

// ------------------------------------------------------------- sin family

// the wave support on [-1, 1] with the normalized length measure: k_e = 1
// and one function sin(n pi t)/n per basis vector, 2 <= n <= N; maximal,
// since sum_{n >= 2} n^{-2} sin^2 < pi^2/6 - 1 < 1
template <class T = double>
SupportOnX<T> wave_support(int N = 64, int nodes = 4096) {
  if (N < 2) throw std::invalid_argument("wave_support: need N >= 2");
  std::vector<std::string> labels{"e"};
  for (int n = 2; n <= N; ++n) labels.push_back("s" + std::to_string(n));
  auto target = make_space(N, 0, labels);
  auto x = make_interval_space(-1, 1, nodes);
  auto mu = make_measure(x, VecR<>::Constant(x->size(), 0.5));
  MatR<T> k(N, x->size());
  k.row(0).setOnes();
  for (int n = 2; n <= N; ++n)
    for (int p = 0; p < x->size(); ++p)
      k(n - 1, p) = std::sin(n * M_PI * x->nodes(p)) / n;
  return make_support_on_x<T>(target, mu, std::move(k));
}

}  // namespace opcone
