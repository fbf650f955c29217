#pragma once
// Finite operator systems: tau-normalized Hilbert-Schmidt cones, the
// two-dimensional system with its sup-norm triple embedding and positive
// extension, coordinate-swap transport between two units, and the
// entanglement-breaking cross check driven by the adjoint map.

#include <opcone/matrix.hpp>

#include <array>
#include <limits>
#include <string>

namespace opcone {

// ------------------------------------------------------------- HS cones

template <class T = double>
struct HSElement {
  int n = 1;
  MatC<T> m;
};

// normalized trace, tau(I) = 1
template <class T>
T hs_tau(const HSElement<T>& x) {
  return x.m.trace().real() / T(x.n);
}

// tau-normalized Hilbert-Schmidt norm of the traceless part
template <class T>
T hs_fluctuation(const HSElement<T>& x) {
  MatC<T> x0 = x.m - std::complex<T>(hs_tau(x), 0) * MatC<T>::Identity(x.n, x.n);
  return x0.norm() / std::sqrt(T(x.n));
}

template <class T = double>
struct HSReport {
  bool member = false;
  bool hermitian = false;
  T tau = 0;
  T fluct = 0;
  T margin = 0;  // tau - fluct
};

// the cone asks only for ||x - tau(x) I||_2 <= tau(x), which is weaker
// than positive semidefiniteness from the third matrix size on
template <class T>
HSReport<T> in_HS_cone(const HSElement<T>& x, T tol = T(kDefaultTol)) {
  HSReport<T> rep;
  const T scale = std::max(T(1), T(x.m.norm()));
  rep.hermitian = (x.m - x.m.adjoint()).norm() <= tol * scale;
  rep.tau = hs_tau(x);
  rep.fluct = hs_fluctuation(x);
  rep.margin = rep.tau - rep.fluct;
  rep.member = rep.hermitian && rep.tau >= -tol && rep.margin >= -tol;
  return rep;
}

// the traceless 3x3 with eigenvalues {-sqrt(3/2), 0, sqrt(3/2)} whose
// shift by I is a cone member that is not positive semidefinite
template <class T = double>
MatC<T> hs3_x0() {
  MatC<T> x0(3, 3);
  const T s = 1 / std::sqrt(T(2));
  x0 << s, 0, s, 0, -s, s, s, s, 0;
  return x0;
}

// ------------------------------------------------- the 2-dimensional system

template <class T = double>
SpacePtr l22_space() {
  return make_space(2, 0, {"u", "e2"});
}

// exact membership margin for level-n elements over a 2-dimensional space:
// states are u + t e2 with |t| <= 1 and the margin is convex in t, so the
// endpoints t = +-1 decide
template <class T>
T l22_min_margin(const HMatrix<T>& z) {
  if (z.space->dim != 2)
    throw std::invalid_argument("l22_min_margin: need a 2-dimensional space");
  if (!is_hermitian(z)) throw std::invalid_argument("l22_min_margin: hermitian input required");
  const int u = z.space->unit_index;
  MatC<T> Cu = coeff(z, u), Ce = coeff(z, 1 - u);
  return std::min(lambda_min<T>(Cu + Ce), lambda_min<T>(Cu - Ce));
}

// exact certificate through the endpoint states (u +- e2)/2; reassembles z
// with zero residual whenever the margin is nonnegative
template <class T>
MaxCertificate<T> l22_max_certificate(const HMatrix<T>& z) {
  if (z.space->dim != 2)
    throw std::invalid_argument("l22_max_certificate: need a 2-dimensional space");
  const int u = z.space->unit_index;
  MatC<T> Cu = coeff(z, u), Ce = coeff(z, 1 - u);
  HVector<T> sp = unit_vector<T>(z.space), sm = unit_vector<T>(z.space);
  sp.coords(1 - u) += std::complex<T>(1, 0);
  sm.coords(1 - u) -= std::complex<T>(1, 0);
  MaxCertificate<T> cert;
  cert.terms.push_back(CertTerm<T>{herm_sqrt_pos<T>(Cu + Ce), T(0.5) * sp});
  cert.terms.push_back(CertTerm<T>{herm_sqrt_pos<T>(Cu - Ce), T(0.5) * sm});
  cert.residual_bound = certificate_residual(cert, z);
  return cert;
}

// eta = (eta1, eta2) -> (eta1, eta1 + eta2, eta1 - eta2): carries the cone
// onto the nonnegative triples inside the image plane
template <class T>
VecR<T> kappa_l2_to_linf(const HVector<T>& eta) {
  if (eta.space->dim != 2)
    throw std::invalid_argument("kappa_l2_to_linf: need a 2-dimensional space");
  if (!is_hermitian(eta))
    throw std::invalid_argument("kappa_l2_to_linf: hermitian input required");
  const int u = eta.space->unit_index;
  const T a = eta.coords(u).real(), b = eta.coords(1 - u).real();
  VecR<T> out(3);
  out << a, a + b, a - b;
  return out;
}

// unital positive extension through the triple embedding: the generators go
// to 0, (e + y)/2, (e - y)/2 where y is the image of e2
template <class T = double>
struct ExtendedMap {
  SpacePtr target;
  std::array<HVector<T>, 3> theta;
};

template <class T>
ExtendedMap<T> extend_positive_map(const HVector<T>& y, T tol = T(kDefaultTol)) {
  auto e = unit_vector<T>(y.space);
  if (!in_cone(e + y, tol) || !in_cone(e - y, tol))
    throw std::invalid_argument("extend_positive_map: map is not positive");
  return ExtendedMap<T>{y.space,
                        {zero_vector<T>(y.space), T(0.5) * (e + y),
                         T(0.5) * (e - y)}};
}

template <class T>
HVector<T> extension_apply(const ExtendedMap<T>& ext, const VecR<T>& v) {
  if (v.size() != 3)
    throw std::invalid_argument("extension_apply: triple expected");
  return v(0) * ext.theta[0] + v(1) * ext.theta[1] + v(2) * ext.theta[2];
}

// ------------------------------------------------------------ unit swap

inline MatR<> swap_matrix(int dim, int a, int b) {
  if (a < 0 || b < 0 || a >= dim || b >= dim || a == b)
    throw std::invalid_argument("swap_matrix: need two distinct indices");
  MatR<> M = MatR<>::Identity(dim, dim);
  M(a, a) = M(b, b) = 0;
  M(a, b) = M(b, a) = 1;
  return M;
}

// coordinate change of a level-n element under a real matrix on the space
template <class T>
HMatrix<T> transform_coords(const HMatrix<T>& z, const MatR<T>& M,
                            const SpacePtr& target) {
  if (M.rows() != target->dim || M.cols() != z.space->dim)
    throw std::invalid_argument("transform_coords: shape mismatch");
  return HMatrix<T>{target, z.n,
                    MatC<T>(z.data *
                            M.transpose().template cast<std::complex<T>>())};
}

template <class T = double>
struct SwapReport {
  T involution_defect = 0;   // || T T - I ||
  T selfadjoint_defect = 0;  // || T - T^t ||
  T unitary_defect = 0;      // || T^t T - I ||
  int cone_failures = 0;     // sampled u-cone elements leaving the e-cone
  T margin_drift = 0;        // worst change of the membership margin
  int transported = 0;       // certified level elements pushed across
  T transport_residual = 0;  // worst certificate residual after transport
};

// swapping the two units is a positive unitary involution in both
// directions, and certificates transport term by term
template <class T = double>
SwapReport<T> cone_swap_check(int dim, int u_idx, int e_idx, int samples = 200,
                              std::uint64_t seed = 0) {
  auto su = make_space(dim, u_idx);
  auto se = make_space(dim, e_idx);
  MatR<> M = swap_matrix(dim, u_idx, e_idx);

  SwapReport<T> rep;
  rep.involution_defect = (M * M - MatR<>::Identity(dim, dim)).norm();
  rep.selfadjoint_defect = (M - M.transpose()).norm();
  rep.unitary_defect = (M.transpose() * M - MatR<>::Identity(dim, dim)).norm();

  auto g = rng_for(seed);
  std::uniform_real_distribution<T> uni(0, 1);
  for (int i = 0; i < samples; ++i) {
    VecR<T> s0 = random_ball_he<T>(*su, g);
    HVector<T> eta{su, s0.template cast<std::complex<T>>()};
    eta.coords(u_idx) += s0.norm() + uni(g);
    HVector<T> img{se, VecC<T>(M.template cast<std::complex<T>>() * eta.coords)};
    if (!in_cone(img, T(1e-12))) ++rep.cone_failures;
    auto du = decompose(eta);
    auto de = decompose(img);
    rep.margin_drift = std::max(
        rep.margin_drift, std::abs((du.lambda.real() - norm(du.zeta0)) -
                                   (de.lambda.real() - norm(de.zeta0))));
  }

  // state-built level elements carry explicit certificates; push the terms
  for (int n = 2; n <= 3; ++n) {
    for (int rep_i = 0; rep_i < samples / 10 + 1; ++rep_i) {
      MaxCertificate<T> cert;
      auto z = zero_hmatrix<T>(su, n);
      for (int l = 0; l < 3; ++l) {
        VecR<T> s0 = random_ball_he<T>(*su, g);
        HVector<T> s = unit_vector<T>(su);
        s.coords += s0.template cast<std::complex<T>>();
        MatC<T> b = random_gaussian_c<T>(n, g).transpose();
        z = z + compress(embed(s), b);
        cert.terms.push_back(CertTerm<T>{b, s});
      }
      HMatrix<T> zt = transform_coords(z, M, se);
      MaxCertificate<T> moved;
      for (const auto& t : cert.terms)
        moved.terms.push_back(CertTerm<T>{
            t.a, HVector<T>{se, VecC<T>(M.template cast<std::complex<T>>() *
                                        t.s.coords)}});
      rep.transport_residual = std::max(
          rep.transport_residual, certificate_residual(moved, zt));
      ++rep.transported;
    }
  }
  return rep;
}

// --------------------------------------------- entanglement-breaking check

// linear map into m x m matrices, one hermitian block per basis vector
template <class T = double>
struct EbMap {
  SpacePtr domain;
  int m = 1;
  std::vector<MatC<T>> phi;
};

template <class T = double>
EbMap<T> make_eb_map(const SpacePtr& domain, std::vector<MatC<T>> blocks,
                     T tol = T(kDefaultTol)) {
  if (static_cast<int>(blocks.size()) != domain->dim)
    throw std::invalid_argument("make_eb_map: one block per basis vector");
  const int m = static_cast<int>(blocks.front().rows());
  for (const auto& b : blocks) {
    if (b.rows() != m || b.cols() != m)
      throw std::invalid_argument("make_eb_map: uneven block sizes");
    if ((b - b.adjoint()).norm() > tol * std::max(T(1), T(b.norm())))
      throw std::invalid_argument("make_eb_map: blocks must be hermitian");
  }
  return EbMap<T>{domain, m, std::move(blocks)};
}

template <class T>
MatC<T> apply_eb(const EbMap<T>& f, const HVector<T>& v) {
  MatC<T> out = MatC<T>::Zero(f.m, f.m);
  for (int i = 0; i < f.domain->dim; ++i) out += v.coords(i) * f.phi[i];
  return out;
}

template <class T>
MatC<T> apply_eb_level(const EbMap<T>& f, const HMatrix<T>& z) {
  const int n = z.n, m = f.m;
  MatC<T> out = MatC<T>::Zero(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < f.domain->dim; ++k)
        out.block(i * m, j * m, m, m) += z.data(i * n + j, k) * f.phi[k];
  return out;
}

// coordinates of the adjoint image of a trace-class block, taken in the
// conjugate space
template <class T>
HVector<T> eb_adjoint_image(const EbMap<T>& f, const MatC<T>& rho) {
  VecC<T> coords(f.domain->dim);
  for (int k = 0; k < f.domain->dim; ++k)
    coords(k) = std::conj((rho * f.phi[k]).trace());
  return HVector<T>{f.domain, coords};
}

template <class T>
HMatrix<T> eb_adjoint_level(const EbMap<T>& f, const MatC<T>& R, int n) {
  if (R.rows() != n * f.m || R.cols() != n * f.m)
    throw std::invalid_argument("eb_adjoint_level: block size mismatch");
  auto z = zero_hmatrix<T>(f.domain, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatC<T> rho = R.block(i * f.m, j * f.m, f.m, f.m);
      for (int k = 0; k < f.domain->dim; ++k)
        z.data(i * n + j, k) = std::conj((rho * f.phi[k]).trace());
    }
  return z;
}

enum class EbVerdict { Breaking, NotBreaking, Undecided };

inline const char* eb_verdict_name(EbVerdict v) {
  switch (v) {
    case EbVerdict::Breaking: return "Breaking";
    case EbVerdict::NotBreaking: return "NotBreaking";
    default: return "Undecided";
  }
}

template <class T = double>
struct EbReport {
  EbVerdict verdict = EbVerdict::Undecided;
  T min_route_worst = 0;  // smallest eigenvalue of sampled direct images
  int max_route_member = 0;
  int max_route_refuted = 0;
  int max_route_undecided = 0;
  bool disagreement = false;
  std::string note;
};

// cross-validates the two characterizations: the map must send sampled
// members of the smallest cone to PSD matrices, and its adjoint must send
// trace-class states into the largest cone (checked by certificate search).
// A hard violation on either side settles the verdict; certification of
// every adjoint image together with a clean direct route reports Breaking.
template <class T = double>
EbReport<T> eb_check(const EbMap<T>& f, int budget = 60,
                     std::uint64_t seed = 0, T tol = T(kDefaultTol)) {
  EbReport<T> rep;
  auto g = rng_for(seed);
  const int dim = f.domain->dim, u = f.domain->unit_index, m = f.m;

  // direct route: deterministic boundary states, then random ones, then
  // state-built level elements
  std::vector<HVector<T>> probes;
  for (int k = 0; k < dim; ++k) {
    if (k == u) continue;
    for (int sgn : {1, -1}) {
      auto s = unit_vector<T>(f.domain);
      s.coords(k) += std::complex<T>(T(sgn), 0);
      probes.push_back(s);
    }
  }
  for (int i = 0; i < budget; ++i) {
    VecR<T> s0 = random_ball_he<T>(*f.domain, g);
    auto s = unit_vector<T>(f.domain);
    s.coords += s0.template cast<std::complex<T>>();
    probes.push_back(s);
  }
  rep.min_route_worst = std::numeric_limits<T>::infinity();
  for (const auto& s : probes)
    rep.min_route_worst =
        std::min(rep.min_route_worst, lambda_min<T>(apply_eb(f, s)));
  for (int n = 2; n <= 3; ++n)
    for (int i = 0; i < budget / 4 + 1; ++i) {
      auto z = random_state_built<T>(f.domain, n, 3, g);
      rep.min_route_worst =
          std::min(rep.min_route_worst, lambda_min<T>(apply_eb_level(f, z)));
    }
  const bool direct_violated = rep.min_route_worst < -tol * 100;

  // adjoint route: level-1 states exactly, higher levels by certificate
  auto psd_sample = [&](int d) {
    MatC<T> b(d, d);
    for (int i = 0; i < d; ++i) b.col(i) = random_gaussian_c<T>(d, g);
    MatC<T> out = b * b.adjoint();
    out /= out.trace().real();
    return out;
  };
  std::vector<MatC<T>> level1;
  level1.push_back(MatC<T>(MatC<T>::Identity(m, m) / T(m)));
  for (int k = 0; k < m; ++k) {
    MatC<T> ek = MatC<T>::Zero(m, m);
    ek(k, k) = 1;
    level1.push_back(ek);
  }
  for (int i = 0; i < 3; ++i) level1.push_back(psd_sample(m));
  for (const auto& rho : level1) {
    auto eta = eb_adjoint_image(f, rho);
    if (in_cone(eta, tol))
      ++rep.max_route_member;
    else
      ++rep.max_route_refuted;
  }

  std::vector<MatC<T>> level_n;
  {
    // maximally entangled block matrix at level m
    MatC<T> ent = MatC<T>::Zero(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) ent(i * m + i, j * m + j) = T(1) / T(m);
    level_n.push_back(ent);
  }
  for (int i = 0; i < 3; ++i) level_n.push_back(psd_sample(2 * m));
  for (const auto& R : level_n) {
    const int n = static_cast<int>(R.rows()) / m;
    auto z = eb_adjoint_level(f, R, n);
    auto v = certify_max(z);
    if (v.kind == Verdict::Member)
      ++rep.max_route_member;
    else if (v.kind == Verdict::NonMember)
      ++rep.max_route_refuted;
    else
      ++rep.max_route_undecided;
  }

  if (direct_violated || rep.max_route_refuted > 0) {
    rep.verdict = EbVerdict::NotBreaking;
    rep.note = direct_violated ? "direct image with a negative eigenvalue"
                               : "adjoint image refused by the largest cone";
  } else if (rep.max_route_undecided == 0) {
    rep.verdict = EbVerdict::Breaking;
  } else {
    rep.verdict = EbVerdict::Undecided;
    rep.note = "adjoint certificates incomplete within budget";
  }
  rep.disagreement = direct_violated && rep.max_route_refuted == 0 &&
                     rep.max_route_undecided == 0;
  return rep;
}

}  // namespace opcone
