#pragma once
// Matrix levels over a unital Hilbert *-space: the pairing of levels, the
// o / 2 / so norms, and membership or certification for the min cone, the
// max cone, and the three quantum cones (l, o, u).

#include <opcone/core.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace opcone {

// ------------------------------------------------------------ small kernels

template <class T>
MatC<T> kron(const MatC<T>& A, const MatC<T>& B) {
  MatC<T> K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

template <class T>
T lambda_min(const MatC<T>& herm) {
  Eigen::SelfAdjointEigenSolver<MatC<T>> es(
      MatC<T>((herm + herm.adjoint()) / T(2)), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <class T>
T op_norm(const MatC<T>& M) {
  if (M.rows() == 0 || M.cols() == 0) return T(0);
  Eigen::JacobiSVD<MatC<T>> svd(M);
  return svd.singularValues()(0);
}

// V |D| V^* of a hermitian matrix
template <class T>
MatC<T> herm_abs(const MatC<T>& M) {
  Eigen::SelfAdjointEigenSolver<MatC<T>> es(MatC<T>((M + M.adjoint()) / T(2)));
  VecC<T> d = es.eigenvalues().cwiseAbs().template cast<std::complex<T>>();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// hermitian square root of the positive part; eigenvalues below the clamp
// are treated as zero
template <class T>
MatC<T> herm_sqrt_pos(const MatC<T>& M) {
  Eigen::SelfAdjointEigenSolver<MatC<T>> es(MatC<T>((M + M.adjoint()) / T(2)));
  VecR<T> d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d(i) = d(i) > T(kEigClamp) ? std::sqrt(d(i)) : T(0);
  VecC<T> dc = d.template cast<std::complex<T>>();
  return es.eigenvectors() * dc.asDiagonal() * es.eigenvectors().adjoint();
}

// ------------------------------------------------------------------ HMatrix

// n x n matrix over H; row r = i*n + j of `data` holds the coordinates of
// entry (i, j), so column f reshaped row-major is the coefficient matrix
// <<zeta, f>>.
template <class T = double>
struct HMatrix {
  SpacePtr space;
  int n = 1;
  MatC<T> data;  // (n*n) x dim
};

template <class T = double>
HMatrix<T> zero_hmatrix(const SpacePtr& sp, int n) {
  return HMatrix<T>{sp, n, MatC<T>::Zero(n * n, sp->dim)};
}

template <class T>
MatC<T> coeff(const HMatrix<T>& z, int f) {
  MatC<T> C(z.n, z.n);
  for (int i = 0; i < z.n; ++i)
    for (int j = 0; j < z.n; ++j) C(i, j) = z.data(i * z.n + j, f);
  return C;
}

template <class T>
void set_coeff(HMatrix<T>& z, int f, const MatC<T>& C) {
  for (int i = 0; i < z.n; ++i)
    for (int j = 0; j < z.n; ++j) z.data(i * z.n + j, f) = C(i, j);
}

template <class T>
HVector<T> entry(const HMatrix<T>& z, int i, int j) {
  return HVector<T>{z.space, z.data.row(i * z.n + j).transpose()};
}

template <class T>
void set_entry(HMatrix<T>& z, int i, int j, const HVector<T>& v) {
  z.data.row(i * z.n + j) = v.coords.transpose();
}

template <class T>
HMatrix<T> embed(const HVector<T>& v) {
  HMatrix<T> z{v.space, 1, MatC<T>(1, v.space->dim)};
  z.data.row(0) = v.coords.transpose();
  return z;
}

// v repeated down the diagonal: the n-fold direct sum v^{(+)n}
template <class T>
HMatrix<T> direct_sum(const HVector<T>& v, int n) {
  auto z = zero_hmatrix<T>(v.space, n);
  for (int i = 0; i < n; ++i) set_entry(z, i, i, v);
  return z;
}

template <class T>
HMatrix<T> operator+(const HMatrix<T>& a, const HMatrix<T>& b) {
  return HMatrix<T>{a.space, a.n, a.data + b.data};
}

template <class T>
HMatrix<T> operator-(const HMatrix<T>& a, const HMatrix<T>& b) {
  return HMatrix<T>{a.space, a.n, a.data - b.data};
}

template <class T>
HMatrix<T> operator*(T c, const HMatrix<T>& z) {
  return HMatrix<T>{z.space, z.n, MatC<T>(std::complex<T>(c, 0) * z.data)};
}

// entrywise involution plus transpose: coefficientwise C_f -> C_f^*
template <class T>
HMatrix<T> involute(const HMatrix<T>& z) {
  HMatrix<T> w = z;
  for (int f = 0; f < z.space->dim; ++f) set_coeff(w, f, MatC<T>(coeff(z, f).adjoint()));
  return w;
}

template <class T>
bool is_hermitian(const HMatrix<T>& z, T tol = T(kDefaultTol)) {
  for (int f = 0; f < z.space->dim; ++f) {
    MatC<T> C = coeff(z, f);
    if ((C - C.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

// scalar compression a^* zeta a, a in M_{n,m}: coefficientwise a^* C_f a
template <class T>
HMatrix<T> compress(const HMatrix<T>& z, const MatC<T>& a) {
  if (a.rows() != z.n) throw std::invalid_argument("compress: shape mismatch");
  const int m = static_cast<int>(a.cols());
  auto w = zero_hmatrix<T>(z.space, m);
  for (int f = 0; f < z.space->dim; ++f)
    set_coeff(w, f, MatC<T>(a.adjoint() * coeff(z, f) * a));
  return w;
}

// strips the unit component of every entry
template <class T>
HMatrix<T> strip_unit(const HMatrix<T>& z) {
  HMatrix<T> w = z;
  set_coeff(w, z.space->unit_index, MatC<T>(MatC<T>::Zero(z.n, z.n)));
  return w;
}

// ------------------------------------------------------------------ pairing

// <<zeta, conj(eta)>> for zeta at level n and eta at level m: the nm x nm
// matrix with entry ((i,j),(k,l)) = (zeta_ik, eta_jl); row index is i*m + j.
template <class T>
MatC<T> pairing(const HMatrix<T>& z, const HMatrix<T>& w) {
  if (!same_space(z.space, w.space))
    throw std::invalid_argument("pairing: operands live in different spaces");
  const int N = z.n * w.n;
  MatC<T> P = MatC<T>::Zero(N, N);
  for (int f = 0; f < z.space->dim; ++f)
    P += kron<T>(coeff(z, f), coeff(w, f).conjugate());
  return P;
}

// scalar pairing <zeta, conj(eta)> = sum_f tr(C_f(zeta) C_f(eta)^*)
template <class T>
std::complex<T> scalar_pairing(const HMatrix<T>& z, const HMatrix<T>& w) {
  std::complex<T> acc(0, 0);
  for (int f = 0; f < z.space->dim; ++f)
    acc += (coeff(z, f) * coeff(w, f).adjoint()).trace();
  return acc;
}

// Gram matrix of the entries: G((i,k),(j,l)) = (zeta_ik, zeta_jl). Always
// PSD, unlike the pairing of a hermitian element with its own conjugate.
template <class T>
MatC<T> pairing_gram(const HMatrix<T>& z) {
  return MatC<T>(z.data * z.data.adjoint());
}

// -------------------------------------------------------------------- norms

template <class T>
T norm_o(const HMatrix<T>& z) {
  return std::sqrt(op_norm(pairing(z, z)));
}

template <class T>
T norm_2(const HMatrix<T>& z) {
  return z.data.norm();
}

template <class T>
HMatrix<T> random_hmatrix(const SpacePtr& sp, int n, std::mt19937_64& g) {
  HMatrix<T> z{sp, n, MatC<T>(n * n, sp->dim)};
  for (Eigen::Index r = 0; r < z.data.rows(); ++r)
    z.data.row(r) = random_gaussian_c<T>(sp->dim, g).transpose();
  return z;
}

template <class T>
HMatrix<T> random_hermitian_hmatrix(const SpacePtr& sp, int n,
                                    std::mt19937_64& g) {
  auto z = random_hmatrix<T>(sp, n, g);
  for (int f = 0; f < sp->dim; ++f) {
    MatC<T> C = coeff(z, f);
    set_coeff(z, f, MatC<T>((C + C.adjoint()) / T(2)));
  }
  return z;
}

// Sampled lower estimate of ||zeta||_so = sup |<zeta, conj(eta)>| over the
// o-ball of the same level. Two deterministic witnesses are always tried:
// eta = zeta / ||zeta||_o           -> ||zeta||_2^2 / ||zeta||_o
// eta = A zeta B^* / ||zeta||_o     -> ||zeta||_o   (A, B from the top
//                                      singular pair of the pairing)
// so the estimate dominates max(||zeta||_o, ||zeta||_2).
template <class T>
T norm_so(const HMatrix<T>& z, int budget = 16, std::uint64_t seed = 0) {
  const T no = norm_o(z);
  if (no <= T(kEigClamp)) return T(0);
  T best = std::abs(scalar_pairing(z, z)) / no;

  MatC<T> P = pairing(z, z);
  Eigen::JacobiSVD<MatC<T>> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatC<T> A(z.n, z.n), B(z.n, z.n);
  for (int i = 0; i < z.n; ++i)
    for (int j = 0; j < z.n; ++j) {
      A(i, j) = svd.matrixU()(i * z.n + j, 0);
      B(i, j) = svd.matrixV()(i * z.n + j, 0);
    }
  HMatrix<T> wit = zero_hmatrix<T>(z.space, z.n);
  for (int f = 0; f < z.space->dim; ++f)
    set_coeff(wit, f, MatC<T>(A * coeff(z, f) * B.adjoint()));
  T nwit = norm_o(wit);
  if (nwit > T(kEigClamp))
    best = std::max(best, std::abs(scalar_pairing(z, wit)) / nwit);

  for (int i = 0; i < budget; ++i) {
    auto g = rng_for(seed, static_cast<std::uint64_t>(i));
    auto eta = random_hmatrix<T>(z.space, z.n, g);
    T ne = norm_o(eta);
    if (ne <= T(kEigClamp)) continue;
    best = std::max(best, std::abs(scalar_pairing(z, eta)) / ne);
  }
  return best;
}

// ----------------------------------------------------------------- verdicts

enum class Verdict { Member, NonMember, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NonMember: return "non_member";
    default: return "undecided";
  }
}

template <class T = double>
struct CertTerm {
  MatC<T> a;       // scalar matrix factor
  HVector<T> s;    // cone element; the term is a^* s^{(+)n} a
};

template <class T = double>
struct MaxCertificate {
  std::vector<CertTerm<T>> terms;
  T residual_bound = 0;
};

template <class T = double>
struct MembershipVerdict {
  Verdict kind = Verdict::Undecided;
  T margin = 0;  // NonMember carries a strictly negative margin
  std::optional<MaxCertificate<T>> certificate;
  std::optional<VecC<T>> witness_beta;      // refuting unit direction
  std::optional<HVector<T>> witness_state;  // level-1 refuting state
  std::optional<MatC<T>> witness_a;         // refuting compression
  std::string note;
};

struct SearchOptions {
  int budget = 1000;       // random directions / compressions
  int descent_steps = 60;  // local refinement iterations
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
};

// reassemble sum_l a_l^* s_l^{(+)n} a_l
template <class T>
HMatrix<T> certificate_sum(const MaxCertificate<T>& cert, const SpacePtr& sp,
                           int n) {
  auto acc = zero_hmatrix<T>(sp, n);
  for (const auto& t : cert.terms) {
    MatC<T> gram = t.a.adjoint() * t.a;
    for (int f = 0; f < sp->dim; ++f)
      acc.data.col(f) += [&] {
        MatC<T> block = gram * t.s.coords(f);
        VecC<T> v(n * n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v(i * n + j) = block(i, j);
        return v;
      }();
  }
  return acc;
}

template <class T>
T certificate_residual(const MaxCertificate<T>& cert, const HMatrix<T>& z) {
  return norm_2<T>(z - certificate_sum(cert, z.space, z.n));
}

// --------------------------------------------------------------- min cone

namespace detail {

// margin of beta against zeta: (beta^* zeta beta, e) - ||(beta^* zeta beta)_0||
template <class T>
T min_margin(const std::vector<MatC<T>>& C, int e, const VecC<T>& beta) {
  const int dim = static_cast<int>(C.size());
  T we = 0, n0sq = 0;
  for (int f = 0; f < dim; ++f) {
    T w = (beta.dot(C[f] * beta)).real();
    if (f == e)
      we = w;
    else
      n0sq += w * w;
  }
  return we - std::sqrt(n0sq);
}

// projected gradient descent on the margin over the unit sphere
template <class T>
void min_descend(const std::vector<MatC<T>>& C, int e, VecC<T>& beta, T& best,
                 int steps) {
  const int dim = static_cast<int>(C.size());
  T step = T(0.25);
  for (int it = 0; it < steps && step > T(1e-12); ++it) {
    // gradient of the margin wrt conj(beta): C_e beta - sum w_f/||w|| C_f beta
    T n0sq = 0;
    std::vector<T> w(dim, 0);
    for (int f = 0; f < dim; ++f) {
      w[f] = (beta.dot(C[f] * beta)).real();
      if (f != e) n0sq += w[f] * w[f];
    }
    T n0 = std::sqrt(std::max(n0sq, T(kEigClamp)));
    VecC<T> grad = C[e] * beta;
    for (int f = 0; f < dim; ++f)
      if (f != e) grad -= (w[f] / n0) * (C[f] * beta);
    grad -= beta.dot(grad) * beta;  // tangent projection
    if (grad.norm() < T(1e-14)) break;
    VecC<T> cand = beta - step * grad.normalized();
    cand.normalize();
    T m = min_margin(C, e, cand);
    if (m < best) {
      best = m;
      beta = cand;
    } else {
      step /= 2;
    }
  }
}

}  // namespace detail

// Membership in the min quantization: zeta in min c iff beta^* zeta beta
// lies in c for every unit beta. Exact for n = 1 and for diagonal zeta;
// otherwise a budgeted violation search returning Undecided when nothing
// refutes.
template <class T>
MembershipVerdict<T> in_min(const HMatrix<T>& z, const SearchOptions& opt = {}) {
  if (!is_hermitian(z, T(opt.tol)))
    throw std::invalid_argument("in_min: input must be hermitian");
  const int n = z.n, e = z.space->unit_index, dim = z.space->dim;

  std::vector<MatC<T>> C(dim);
  for (int f = 0; f < dim; ++f) C[f] = coeff(z, f);

  if (n == 1) {
    auto v = entry(z, 0, 0);
    auto d = decompose(v);
    T margin = d.lambda.real() - norm(d.zeta0);
    MembershipVerdict<T> out;
    out.kind = margin >= -T(opt.tol) ? Verdict::Member : Verdict::NonMember;
    out.margin = margin;
    if (out.kind == Verdict::NonMember) {
      out.witness_beta = VecC<T>::Ones(1);
      out.note = "level 1 reduces to the cone test";
    }
    return out;
  }

  // exact diagonal shortcut: beta^* zeta beta is a convex mix of the
  // diagonal entries, so membership reduces entrywise
  T offdiag = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        offdiag = std::max(offdiag,
                           z.data.row(i * n + j).cwiseAbs().maxCoeff());
  const bool diagonal = offdiag <= T(opt.tol);

  MembershipVerdict<T> out;
  out.margin = std::numeric_limits<T>::infinity();
  VecC<T> best_beta;

  auto consider = [&](const VecC<T>& beta) {
    T m = detail::min_margin(C, e, beta);
    if (m < out.margin) {
      out.margin = m;
      best_beta = beta;
    }
  };

  for (int i = 0; i < n; ++i) {
    VecC<T> b = VecC<T>::Zero(n);
    b(i) = std::complex<T>(1, 0);
    consider(b);
    for (int j = i + 1; j < n; ++j) {
      VecC<T> c = b;
      const std::complex<T> phases[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto p : phases) {
        c(j) = p;
        consider(VecC<T>(c / c.norm()));
      }
      c(j) = std::complex<T>(0, 0);
    }
  }
  for (int i = 0; i < opt.budget; ++i) {
    auto g = rng_for(opt.seed, static_cast<std::uint64_t>(i));
    VecC<T> b = random_gaussian_c<T>(n, g);
    consider(VecC<T>(b.normalized()));
  }
  if (best_beta.size() > 0) {
    VecC<T> refined = best_beta;
    T refined_margin = out.margin;
    detail::min_descend(C, e, refined, refined_margin, opt.descent_steps);
    if (refined_margin < out.margin) {
      out.margin = refined_margin;
      best_beta = refined;
    }
  }

  if (out.margin < -T(opt.tol)) {
    out.kind = Verdict::NonMember;
    out.witness_beta = best_beta;
    return out;
  }
  if (diagonal) {
    out.kind = Verdict::Member;
    out.note = "diagonal element: entrywise cone test is exact";
    return out;
  }
  out.kind = Verdict::Undecided;
  out.note = "no refutation within budget";
  return out;
}

// --------------------------------------------------------------- max cone

// Constructive certification: when sum_{f != e} |C_f| <= C_e in the PSD
// order, zeta decomposes as a sum of compressions of the cone elements
// (+-f + e) and e, which places it in the max quantization. Refutation goes
// through the min search: a violating beta lifts to a level-1 state whose
// pairing with zeta has a negative eigenvalue.
template <class T>
MembershipVerdict<T> certify_max(const HMatrix<T>& z,
                                 const SearchOptions& opt = {}) {
  if (!is_hermitian(z, T(opt.tol)))
    throw std::invalid_argument("certify_max: input must be hermitian");
  const int n = z.n, e = z.space->unit_index, dim = z.space->dim;

  MatC<T> Ce = coeff(z, e);
  MatC<T> S = MatC<T>::Zero(n, n);
  for (int f = 0; f < dim; ++f)
    if (f != e) S += herm_abs<T>(coeff(z, f));
  MatC<T> R = Ce - S;
  const T lamR = lambda_min(R);

  if (lamR >= -T(opt.tol)) {
    MaxCertificate<T> cert;
    for (int f = 0; f < dim; ++f) {
      if (f == e) continue;
      MatC<T> Cf = coeff(z, f);
      if (Cf.cwiseAbs().maxCoeff() <= T(kEigClamp)) continue;
      Eigen::SelfAdjointEigenSolver<MatC<T>> es(
          MatC<T>((Cf + Cf.adjoint()) / T(2)));
      for (int sign : {+1, -1}) {
        VecR<T> d = es.eigenvalues();
        bool any = false;
        for (Eigen::Index k = 0; k < d.size(); ++k) {
          T v = sign > 0 ? d(k) : -d(k);
          d(k) = v > T(kEigClamp) ? std::sqrt(v) : T(0);
          any = any || d(k) > T(0);
        }
        if (!any) continue;
        CertTerm<T> term;
        term.a = d.template cast<std::complex<T>>().asDiagonal() *
                 es.eigenvectors().adjoint();
        term.s = unit_vector<T>(z.space) + T(sign) * basis_vector<T>(z.space, f);
        cert.terms.push_back(std::move(term));
      }
    }
    MatC<T> root = herm_sqrt_pos<T>(R);
    if (root.cwiseAbs().maxCoeff() > T(kEigClamp))
      cert.terms.push_back(CertTerm<T>{root, unit_vector<T>(z.space)});
    cert.residual_bound = certificate_residual(cert, z);
    MembershipVerdict<T> out;
    out.kind = Verdict::Member;
    out.margin = lamR;
    out.certificate = std::move(cert);
    return out;
  }

  auto minres = in_min(z, opt);
  if (minres.kind == Verdict::NonMember) {
    const VecC<T>& beta = *minres.witness_beta;
    VecR<T> w = VecR<T>::Zero(dim);
    T n0sq = 0;
    for (int f = 0; f < dim; ++f) {
      if (f == e) continue;
      w(f) = (beta.dot(coeff(z, f) * beta)).real();
      n0sq += w(f) * w(f);
    }
    HVector<T> s = unit_vector<T>(z.space);
    if (n0sq > T(kEigClamp)) {
      VecR<T> s0 = -w / std::sqrt(n0sq);
      s.coords += s0.template cast<std::complex<T>>();
    }
    MatC<T> M = pairing(z, embed(s));
    MembershipVerdict<T> out;
    out.kind = Verdict::NonMember;
    out.margin = lambda_min(M);
    out.witness_beta = beta;
    out.witness_state = s;
    out.note = "min refutation lifted to a level-1 state";
    return out;
  }

  MembershipVerdict<T> out;
  out.kind = Verdict::Undecided;
  out.margin = lamR;
  out.note = "coefficient domination fails but no refutation found";
  return out;
}

// ------------------------------------------------------------ quantum cones

enum class QuantumCone { Cl, Co, Cu };

inline const char* quantum_cone_name(QuantumCone q) {
  switch (q) {
    case QuantumCone::Cl: return "cl";
    case QuantumCone::Co: return "co";
    default: return "cu";
  }
}

// Violation search over compressions a in M_{n,m}, m <= n + 2, against the
// defining inequality of the requested cone:
//   Cl:  ||a^* zeta_0 a||_2  <= m^{-1/2} tr(a^* C_e a)
//   Co:  ||a^* zeta_0 a||_so <=          tr(a^* C_e a)
//   Cu:  ||a^* zeta_0 a||_2  <=          tr(a^* C_e a)
// Level 1 is exact: Cu and Co coincide with the cone; Cl collapses to the
// nonnegative ray of the unit, refuted by widening row compressions.
template <class T>
MembershipVerdict<T> in_quantum_cone(const HMatrix<T>& z, QuantumCone which,
                                     const SearchOptions& opt = {}) {
  if (!is_hermitian(z, T(opt.tol)))
    throw std::invalid_argument("in_quantum_cone: input must be hermitian");
  const int n = z.n, e = z.space->unit_index;

  if (n == 1) {
    auto v = entry(z, 0, 0);
    auto d = decompose(v);
    const T n0 = norm(d.zeta0), lam = d.lambda.real();
    MembershipVerdict<T> out;
    if (which != QuantumCone::Cl) {
      out.margin = lam - n0;
      out.kind = out.margin >= -T(opt.tol) ? Verdict::Member : Verdict::NonMember;
      if (out.kind == Verdict::NonMember) out.witness_a = MatC<T>::Ones(1, 1);
      return out;
    }
    // Cl at level 1: members are exactly the nonnegative multiples of e,
    // because m^{-1/2} tr(...) shrinks as the compression widens
    if (n0 <= T(opt.tol) && lam >= -T(opt.tol)) {
      out.kind = Verdict::Member;
      out.margin = lam;
      return out;
    }
    long long m = 1;
    if (n0 > T(opt.tol) && lam > 0) {
      double need = (lam / n0) * (lam / n0) + 1;
      m = std::min<long long>(1000000000ll,
                              std::max<long long>(2, (long long)std::ceil(need)));
    }
    MatC<T> a = MatC<T>::Zero(1, m);
    a(0, 0) = std::complex<T>(1, 0);
    out.kind = Verdict::NonMember;
    out.margin = lam / std::sqrt((T)m) - n0;
    out.witness_a = a;
    out.note = "widening compression refutes at width " + std::to_string(m);
    return out;
  }

  MatC<T> Ce = coeff(z, e);
  HMatrix<T> z0 = strip_unit(z);

  MembershipVerdict<T> out;
  out.margin = std::numeric_limits<T>::infinity();

  auto consider = [&](const MatC<T>& a) {
    MatC<T> an = a / a.norm();
    HMatrix<T> x = compress(z0, an);
    const T tau = (an.adjoint() * Ce * an).trace().real();
    const int m = static_cast<int>(an.cols());
    T margin;
    switch (which) {
      case QuantumCone::Cl:
        margin = tau / std::sqrt((T)m) - norm_2(x);
        break;
      case QuantumCone::Co:
        margin = tau - norm_so(x, 8, opt.seed);
        break;
      default:
        margin = tau - norm_2(x);
    }
    if (margin < out.margin) {
      out.margin = margin;
      out.witness_a = an;
    }
  };

  for (int m = 1; m <= n + 2; ++m) {
    MatC<T> a = MatC<T>::Zero(n, m);
    for (int i = 0; i < std::min(n, m); ++i) a(i, i) = std::complex<T>(1, 0);
    consider(a);
    const int per = std::max(1, opt.budget / (n + 2));
    for (int i = 0; i < per; ++i) {
      auto g = rng_for(opt.seed ^ 0x51ull, static_cast<std::uint64_t>(m * 100003 + i));
      MatC<T> r(n, m);
      for (int c = 0; c < m; ++c) r.col(c) = random_gaussian_c<T>(n, g);
      consider(r);
    }
  }

  if (out.margin < -T(opt.tol)) {
    out.kind = Verdict::NonMember;
    return out;
  }
  out.kind = Verdict::Undecided;
  out.note = "no refutation within budget";
  return out;
}

// ----------------------------------------------------------------- duality

// smallest eigenvalue of the pairing; for a max-certified zeta against any
// min member of the conjugate space this must be >= 0, and likewise for two
// members of the self-dual operator-Hilbert cone
template <class T>
T duality_check(const HMatrix<T>& z, const HMatrix<T>& w) {
  return lambda_min(pairing(z, w));
}

template <class T>
T self_duality_check(const HMatrix<T>& z, const HMatrix<T>& w) {
  return duality_check(z, w);
}

// ----------------------------------------------- sample element generators

// sum of rank-one compressions of states: a known member of the max cone
// (hence of every quantization) at level n
template <class T>
HMatrix<T> random_state_built(const SpacePtr& sp, int n, int terms,
                              std::mt19937_64& g) {
  auto acc = zero_hmatrix<T>(sp, n);
  std::uniform_real_distribution<T> uni(0, 1);
  for (int t = 0; t < terms; ++t) {
    VecR<T> s0 = random_ball_he<T>(*sp, g);
    HVector<T> s = unit_vector<T>(sp);
    s.coords += s0.template cast<std::complex<T>>();
    MatC<T> b(1, n);
    b = random_gaussian_c<T>(n, g).transpose();
    b *= std::sqrt(uni(g)) / b.norm();
    acc = acc + compress(embed(s), b);
  }
  return acc;
}

// element of the operator-Hilbert cone at level n: eta_0 + e^{(+)n} with
// eta_0 hermitian, unit-free, and ||eta_0||_o <= 1
template <class T>
HMatrix<T> random_o_ball_state(const SpacePtr& sp, int n, std::mt19937_64& g) {
  auto eta0 = random_hermitian_hmatrix<T>(sp, n, g);
  eta0 = strip_unit(eta0);
  T no = norm_o(eta0);
  std::uniform_real_distribution<T> uni(0, 1);
  if (no > T(kEigClamp)) eta0 = (uni(g) / no) * eta0;
  return eta0 + direct_sum(unit_vector<T>(sp), n);
}

}  // namespace opcone
