#pragma once
// State-space geometry over atomic measures: the canonical function
// representation on states, unital measures, the square-integrable embedding
// iota with its adjoint, the conditional expectation onto the embedded copy,
// mass bounds for atoms, concentration completions, and least-squares
// factorization of positive maps through L2.

#include <opcone/spaces.hpp>

#include <utility>
#include <vector>

namespace opcone {

// a state vector is hermitian s = s0 + e with ||s0|| <= 1
template <class T>
bool is_state_vector(const HVector<T>& s, T tol = T(kDefaultTol)) {
  if (!is_hermitian(s, tol)) return false;
  auto d = decompose(s);
  return std::abs(d.lambda.real() - 1) <= tol && norm(d.zeta0) <= 1 + tol;
}

template <class T = double>
struct WeightedState {
  StatePoint<T> s;
  T c = 0;
};

// probability measure on finitely many states whose barycenter is the unit
template <class T = double>
struct UnitalMeasure {
  SpacePtr space;
  std::vector<WeightedState<T>> atoms;
  XPtr x;         // one node per atom
  MeasureOnX mu;  // the weights as point masses
};

template <class T>
HVector<T> measure_barycenter(const SpacePtr& sp,
                              const std::vector<WeightedState<T>>& atoms) {
  auto b = zero_vector<T>(sp);
  for (const auto& a : atoms) b = b + a.c * state_vector(a.s);
  return b;
}

template <class T = double>
UnitalMeasure<T> make_unital_measure(const SpacePtr& sp,
                                     std::vector<WeightedState<T>> atoms,
                                     T tol = T(kDefaultTol)) {
  if (atoms.empty())
    throw std::invalid_argument("make_unital_measure: no atoms");
  T total = 0;
  for (const auto& a : atoms) {
    if (!same_space(a.s.space, sp) || a.s.s0.norm() > 1 + tol ||
        std::abs(a.s.s0(sp->unit_index)) > tol)
      throw std::invalid_argument("make_unital_measure: atom is not a state");
    if (a.c < -tol)
      throw std::invalid_argument("make_unital_measure: negative weight");
    total += a.c;
  }
  if (std::abs(total - 1) > tol * 10)
    throw std::invalid_argument("make_unital_measure: weights must sum to 1");
  auto b = decompose(measure_barycenter(sp, atoms));
  if (norm(b.zeta0) > tol * 10)
    throw std::invalid_argument(
        "make_unital_measure: barycenter is not the unit");

  std::vector<double> nodes(atoms.size());
  VecR<> w(static_cast<int>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    nodes[i] = static_cast<double>(i);
    w(static_cast<int>(i)) = std::max(0.0, static_cast<double>(atoms[i].c));
  }
  auto x = make_atomic_space(std::move(nodes));
  return UnitalMeasure<T>{sp, std::move(atoms), x, make_measure(x, w)};
}

template <class T = double>
UnitalMeasure<T> delta_e(const SpacePtr& sp) {
  return make_unital_measure<T>(
      sp, {WeightedState<T>{StatePoint<T>{sp, VecR<T>::Zero(sp->dim)}, 1}});
}

// half weight on s and half on its reflection through the unit
template <class T>
UnitalMeasure<T> antipodal_measure(const StatePoint<T>& s,
                                   T tol = T(kDefaultTol)) {
  return make_unital_measure<T>(
      s.space,
      {WeightedState<T>{s, T(0.5)},
       WeightedState<T>{StatePoint<T>{s.space, VecR<T>(-s.s0)}, T(0.5)}},
      tol);
}

// ------------------------------------------------- canonical representation

// values of the function t -> (zeta, t) over the given states
template <class T>
VecR<T> canonical_rep(const HVector<T>& zeta,
                      const std::vector<StatePoint<T>>& states) {
  VecR<T> out(static_cast<int>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i)
    out(static_cast<int>(i)) = eval_at_state(zeta, states[i]).real();
  return out;
}

// the two states where |(zeta, .)| peaks; just the unit when zeta0 = 0
template <class T>
std::vector<StatePoint<T>> boundary_states(const HVector<T>& zeta) {
  auto d = decompose(zeta);
  const T n0 = norm(d.zeta0);
  if (n0 <= T(kEigClamp))
    return {StatePoint<T>{zeta.space, VecR<T>::Zero(zeta.space->dim)}};
  VecR<T> dir = d.zeta0.coords.real() / n0;
  return {StatePoint<T>{zeta.space, dir},
          StatePoint<T>{zeta.space, VecR<T>(-dir)}};
}

// ------------------------------------------------------- iota and adjoint

// npoints x dim matrix of atom coordinates; row t holds the state t
template <class T>
MatR<T> iota_matrix(const UnitalMeasure<T>& mu) {
  MatR<T> V(static_cast<int>(mu.atoms.size()), mu.space->dim);
  for (std::size_t t = 0; t < mu.atoms.size(); ++t)
    V.row(static_cast<int>(t)) =
        state_vector(mu.atoms[t].s).coords.real().transpose();
  return V;
}

template <class T>
L2Element<T> iota(const HVector<T>& zeta, const UnitalMeasure<T>& mu) {
  if (!same_space(zeta.space, mu.space))
    throw std::invalid_argument("iota: space mismatch");
  VecC<T> values(static_cast<int>(mu.atoms.size()));
  for (std::size_t t = 0; t < mu.atoms.size(); ++t)
    values(static_cast<int>(t)) = eval_at_state(zeta, mu.atoms[t].s);
  return L2Element<T>{mu.x, mu.mu, std::move(values)};
}

template <class T>
HVector<T> iota_star(const L2Element<T>& eta, const UnitalMeasure<T>& mu) {
  if (!same_x(eta.space, mu.x))
    throw std::invalid_argument("iota_star: node space mismatch");
  VecR<> dm = point_masses(mu.mu);
  auto out = zero_vector<T>(mu.space);
  for (std::size_t t = 0; t < mu.atoms.size(); ++t) {
    const int i = static_cast<int>(t);
    out.coords +=
        T(dm(i)) * eta.values(i) * state_vector(mu.atoms[t].s).coords;
  }
  return out;
}

// isometric coordinates sqrt(c_t) * eta(t) of the weighted node space
template <class T>
VecR<T> l2_coordinates(const L2Element<T>& eta) {
  VecR<> dm = point_masses(eta.mu);
  VecR<T> out(eta.values.size());
  for (int t = 0; t < eta.values.size(); ++t)
    out(t) = std::sqrt(T(dm(t))) * eta.values(t).real();
  return out;
}

// --------------------------------------------------- conditional expectation

// orthogonal projection of L2(mu) onto the embedded copy of the space,
// P = V (V^t W V)^+ V^t W acting on value vectors
template <class T>
MatR<T> conditional_expectation(const UnitalMeasure<T>& mu) {
  MatR<T> V = iota_matrix(mu);
  VecR<> dm = point_masses(mu.mu);
  MatR<T> W = dm.template cast<T>().asDiagonal();
  MatR<T> G = V.transpose() * W * V;
  Eigen::CompleteOrthogonalDecomposition<MatR<T>> cod(G);
  return MatR<T>(V * cod.pseudoInverse() * V.transpose() * W);
}

// ------------------------------------------------------------- mass bounds

template <class T = double>
struct MassBounds {
  T mass = 0;
  std::array<T, 5> chain{};  // nondecreasing when the atom carries mass
  T cap = 0;                 // (1 + ||s0||^2)^{-1}
  T identity_gap = 0;        // defect of 1/mass = ||s0'||^2 + 1 + ||(1-P)s'||^2
};

template <class T>
MassBounds<T> mass_bounds(const UnitalMeasure<T>& mu, int atom) {
  if (atom < 0 || atom >= static_cast<int>(mu.atoms.size()))
    throw std::invalid_argument("mass_bounds: no such atom");
  VecR<> dm = point_masses(mu.mu);
  const T m = T(dm(atom));
  if (m <= 0) throw std::invalid_argument("mass_bounds: atom carries no mass");

  const auto& sp = mu.atoms[static_cast<std::size_t>(atom)].s;
  const T n0 = sp.s0.norm();
  HVector<T> s0vec{mu.space, sp.s0.template cast<std::complex<T>>()};
  auto s0_fn = iota(s0vec, mu);

  const int npts = static_cast<int>(mu.atoms.size());
  MatR<T> P = conditional_expectation(mu);
  VecR<T> sprime = VecR<T>::Zero(npts);
  sprime(atom) = 1 / m;
  VecR<T> proj = P * sprime;
  VecR<T> s0prime = proj - VecR<T>::Ones(npts);
  VecR<T> rest = sprime - proj;

  auto l2 = [&](const VecR<T>& v) {
    T acc = 0;
    for (int t = 0; t < npts; ++t) acc += T(dm(t)) * v(t) * v(t);
    return std::sqrt(acc);
  };

  MassBounds<T> out;
  out.mass = m;
  out.chain = {std::sqrt(m) * n0 * n0, l2_norm(s0_fn), n0, l2(s0prime),
               std::sqrt(std::max(T(0), 1 / m - 1))};
  out.cap = 1 / (1 + n0 * n0);
  out.identity_gap = std::abs(
      1 / m - (l2(s0prime) * l2(s0prime) + 1 + l2(rest) * l2(rest)));
  return out;
}

// ------------------------------------------------------ concentration sets

template <class T = double>
struct MassAssignment {
  SpacePtr space;
  std::vector<WeightedState<T>> points;  // weights are masses, sum <= 1
};

template <class T = double>
struct ConcentrationReport {
  bool feasible = false;
  T slack = 0;  // (1 - sum m) - ||sum m s0||
};

template <class T>
ConcentrationReport<T> concentration_feasible(const MassAssignment<T>& a,
                                              T tol = T(kDefaultTol)) {
  T total = 0;
  for (const auto& p : a.points) {
    if (p.c < -tol || p.s.s0.norm() > 1 + tol) return {false, 0};
    total += p.c;
  }
  auto v = decompose(measure_barycenter(a.space, a.points));
  const T slack = (1 - total) - norm(v.zeta0);
  return {slack >= -tol && total <= 1 + tol, slack};
}

// extends a feasible assignment to a unital measure by spending the
// remaining mass on the reflected barycenter direction and on the unit
template <class T>
UnitalMeasure<T> complete_assignment(const MassAssignment<T>& a,
                                     T tol = T(kDefaultTol)) {
  auto rep = concentration_feasible(a, tol);
  if (!rep.feasible)
    throw std::invalid_argument("complete_assignment: assignment infeasible");
  T total = 0;
  for (const auto& p : a.points) total += p.c;
  auto v = decompose(measure_barycenter(a.space, a.points));
  const T nv = norm(v.zeta0);

  std::vector<WeightedState<T>> atoms = a.points;
  if (nv > T(kEigClamp))
    atoms.push_back(WeightedState<T>{
        StatePoint<T>{a.space, VecR<T>(-v.zeta0.coords.real() / nv)}, nv});
  atoms.push_back(WeightedState<T>{
      StatePoint<T>{a.space, VecR<T>::Zero(a.space->dim)},
      std::max(T(0), 1 - total - nv)});
  return make_unital_measure<T>(a.space, std::move(atoms), tol * 100);
}

// --------------------------------------------------- charge decompositions

template <class T = double>
struct ChargeDecomposition {
  StatePoint<T> s;  // state carrying the fluctuation of the barycenter
  T c_s = 0;
  T c_e = 0;
};

// splits a signed atomic charge as c_s delta_s + c_e delta_e + remainder
// with vanishing barycenter
template <class T>
ChargeDecomposition<T> decompose_charge(
    const SpacePtr& sp, const std::vector<WeightedState<T>>& charge) {
  auto d = decompose(measure_barycenter(sp, charge));
  const T n0 = norm(d.zeta0);
  if (n0 <= T(kEigClamp))
    return ChargeDecomposition<T>{StatePoint<T>{sp, VecR<T>::Zero(sp->dim)},
                                  0, d.lambda.real()};
  return ChargeDecomposition<T>{
      StatePoint<T>{sp, VecR<T>(d.zeta0.coords.real() / n0)}, n0,
      d.lambda.real() - n0};
}

// ----------------------------------------------------- L2 factorization

// least-squares factor of a positive map through the embedding of the
// measure's space: S acts on value vectors by eta -> k^t (c .* eta). The
// factor is unital and carries the embedded cone into the target cone
// because S(iota(zeta)) = T(zeta) exactly; away from the embedded copy it
// is only the minimal-norm linear extension.
template <class T = double>
struct L2Factor {
  bool ok = false;
  bool exact = false;  // the atoms span the source space
  SpacePtr target;
  MatR<T> k;           // npoints x target_dim, column g solves iota*(k_g) = T*(g)
  int offending = -1;  // target basis index that failed, when not ok
  T residual = 0;      // worst normal-equation residual
};

template <class T>
L2Factor<T> l2_factorize(const MatR<T>& tmat, const SpacePtr& target,
                         const UnitalMeasure<T>& mu, T tol = T(1e-8)) {
  if (tmat.rows() != target->dim || tmat.cols() != mu.space->dim)
    throw std::invalid_argument("l2_factorize: shape mismatch");
  MatR<T> V = iota_matrix(mu);
  VecR<> dm = point_masses(mu.mu);
  MatR<T> A(mu.space->dim, static_cast<int>(mu.atoms.size()));
  for (int t = 0; t < A.cols(); ++t)
    A.col(t) = T(dm(t)) * V.row(t).transpose();  // iota* on indicators

  Eigen::CompleteOrthogonalDecomposition<MatR<T>> cod(A);
  L2Factor<T> out;
  out.target = target;
  out.exact =
      Eigen::CompleteOrthogonalDecomposition<MatR<T>>(V).rank() ==
      mu.space->dim;
  out.k = MatR<T>(static_cast<int>(mu.atoms.size()), target->dim);
  out.ok = true;
  for (int g = 0; g < target->dim; ++g) {
    VecR<T> rhs = tmat.row(g).transpose();
    VecR<T> w = cod.solve(rhs);
    const T r = (A * w - rhs).norm();
    out.k.col(g) = w;
    if (r > out.residual) out.residual = r;
    if (r > tol && out.ok) {
      out.ok = false;
      out.offending = g;
    }
  }
  return out;
}

template <class T>
HVector<T> apply_factor(const L2Factor<T>& f, const UnitalMeasure<T>& mu,
                        const L2Element<T>& eta) {
  if (!same_x(eta.space, mu.x))
    throw std::invalid_argument("apply_factor: node space mismatch");
  VecR<> dm = point_masses(mu.mu);
  auto out = zero_vector<T>(f.target);
  for (int g = 0; g < f.target->dim; ++g) {
    std::complex<T> acc(0, 0);
    for (int t = 0; t < eta.values.size(); ++t)
      acc += T(dm(t)) * f.k(t, g) * eta.values(t);
    out.coords(g) = acc;
  }
  return out;
}

}  // namespace opcone
