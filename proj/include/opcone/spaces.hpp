#pragma once
// Compact-space backends (finite atom sets and intervals with composite
// Gauss-Legendre grids), measures and charges on them, L2(X,mu), and the
// unital cone L2(X,mu)_+ with its matrix-level min test.

#include <opcone/matrix.hpp>

#include <functional>
#include <memory>

namespace opcone {

// ------------------------------------------------------------ CompactSpace

enum class XKind { Atoms, Interval };

struct CompactSpace {
  XKind kind = XKind::Atoms;
  std::vector<double> points;  // Atoms: distinct coordinates
  double a = -1, b = 1;        // Interval bounds
  VecR<> nodes;                // Interval: quadrature nodes in (a, b)
  VecR<> weights;              // Interval: positive weights, sum b - a
  int size() const {
    return kind == XKind::Atoms ? static_cast<int>(points.size())
                                : static_cast<int>(nodes.size());
  }
};

using XPtr = std::shared_ptr<const CompactSpace>;

inline XPtr make_atomic_space(std::vector<double> points) {
  if (points.empty()) throw std::invalid_argument("atomic space needs atoms");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw std::invalid_argument("atomic space: atoms must be distinct");
  auto sp = std::make_shared<CompactSpace>();
  sp->kind = XKind::Atoms;
  sp->points = std::move(points);
  return sp;
}

// 8-point Gauss-Legendre rule on [-1, 1]
inline const double kGL8Nodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline const double kGL8Weights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// Composite quadrature with panels aligned to the given breakpoints, so
// functions that are smooth between breakpoints integrate at full order and
// step functions with those breakpoints integrate exactly. The node count is
// rounded to whole panels.
inline XPtr make_interval_space(double a, double b, int nodes = 2048,
                                std::vector<double> breakpoints = {}) {
  if (!(a < b)) throw std::invalid_argument("interval space: need a < b");
  if (nodes < 8) nodes = 8;
  std::vector<double> cuts{a, b};
  for (double t : breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const int segs = static_cast<int>(cuts.size()) - 1;
  const int total_panels = std::max(segs, nodes / 8);
  const double len = b - a;
  std::vector<int> panels(segs);
  for (int s = 0; s < segs; ++s) {
    double frac = (cuts[s + 1] - cuts[s]) / len;
    panels[s] = std::max(1, static_cast<int>(std::llround(total_panels * frac)));
  }

  auto sp = std::make_shared<CompactSpace>();
  sp->kind = XKind::Interval;
  sp->a = a;
  sp->b = b;
  int count = 0;
  for (int s = 0; s < segs; ++s) count += panels[s];
  sp->nodes.resize(8 * count);
  sp->weights.resize(8 * count);
  int at = 0;
  for (int s = 0; s < segs; ++s) {
    const double h = (cuts[s + 1] - cuts[s]) / panels[s];
    for (int p = 0; p < panels[s]; ++p) {
      const double lo = cuts[s] + p * h;
      for (int q = 0; q < 8; ++q, ++at) {
        sp->nodes(at) = lo + 0.5 * h * (kGL8Nodes[q] + 1.0);
        sp->weights(at) = 0.5 * h * kGL8Weights[q];
      }
    }
  }
  return sp;
}

inline bool same_x(const XPtr& x, const XPtr& y) {
  if (x == y) return true;
  if (x->kind != y->kind || x->size() != y->size()) return false;
  if (x->kind == XKind::Atoms) return x->points == y->points;
  return x->a == y->a && x->b == y->b && x->nodes == y->nodes;
}

// ------------------------------------------------------------- MeasureOnX

// Atomic weights on an atom space, or a density against the grid measure dt
// on an interval. Signed values are allowed (charges); a probability is a
// nonnegative measure of total mass 1.
struct MeasureOnX {
  XPtr space;
  VecR<> w;  // per atom / per node
};

inline MeasureOnX make_measure(const XPtr& x, VecR<> values) {
  if (static_cast<int>(values.size()) != x->size())
    throw std::invalid_argument("measure: one value per point required");
  return MeasureOnX{x, std::move(values)};
}

inline MeasureOnX uniform_probability(const XPtr& x) {
  if (x->kind == XKind::Atoms)
    return MeasureOnX{x, VecR<>::Constant(x->size(), 1.0 / x->size())};
  return MeasureOnX{x, VecR<>::Constant(x->size(), 1.0 / (x->b - x->a))};
}

// point masses d_mu(i): the effective weight of each atom or grid node
inline VecR<> point_masses(const MeasureOnX& mu) {
  if (mu.space->kind == XKind::Atoms) return mu.w;
  return VecR<>(mu.space->weights.cwiseProduct(mu.w));
}

inline double mass(const MeasureOnX& mu) { return point_masses(mu).sum(); }

inline bool is_nonnegative(const MeasureOnX& mu, double tol = kDefaultTol) {
  return mu.w.minCoeff() >= -tol;
}

inline bool is_probability(const MeasureOnX& mu, double tol = kDefaultTol) {
  return is_nonnegative(mu, tol) && std::abs(mass(mu) - 1.0) <= tol;
}

// ------------------------------------------------------------- L2 elements

template <class T = double>
struct L2Element {
  XPtr space;
  MeasureOnX mu;  // probability
  VecC<T> values;
};

template <class T>
std::complex<T> integrate(const VecC<T>& values, const MeasureOnX& mu) {
  if (static_cast<int>(values.size()) != mu.space->size())
    throw std::invalid_argument("integrate: size mismatch");
  VecR<> dm = point_masses(mu);
  std::complex<T> acc(0, 0);
  for (int i = 0; i < values.size(); ++i)
    acc += values(i) * std::complex<T>(T(dm(i)), 0);
  return acc;
}

template <class T>
std::complex<T> integrate(const L2Element<T>& f) {
  return integrate(f.values, f.mu);
}

template <class T>
std::complex<T> l2_inner(const L2Element<T>& f, const L2Element<T>& g) {
  return integrate(VecC<T>(f.values.cwiseProduct(g.values.conjugate())), f.mu);
}

template <class T>
T l2_norm(const L2Element<T>& f) {
  return std::sqrt(std::abs(l2_inner(f, f)));
}

template <class T = double>
L2Element<T> l2_unit(const XPtr& x, const MeasureOnX& mu) {
  return L2Element<T>{x, mu, VecC<T>::Constant(x->size(), {1, 0})};
}

// canonical embedding C(X) -> L2(X,mu): same values, L2 geometry
template <class T = double>
L2Element<T> iota_canonical(const XPtr& x, const MeasureOnX& mu, VecC<T> v) {
  return L2Element<T>{x, mu, std::move(v)};
}

// piecewise-constant function on an interval grid: vals[s] between cuts
template <class T = double>
L2Element<T> step_element(const XPtr& x, const MeasureOnX& mu,
                          const std::vector<double>& cuts,
                          const std::vector<std::complex<T>>& vals) {
  if (x->kind != XKind::Interval)
    throw std::invalid_argument("step_element: interval backend required");
  if (cuts.size() + 1 != vals.size())
    throw std::invalid_argument("step_element: need one more value than cut");
  VecC<T> v(x->size());
  for (int i = 0; i < x->size(); ++i) {
    size_t s = 0;
    while (s < cuts.size() && x->nodes(i) >= cuts[s]) ++s;
    v(i) = vals[s];
  }
  return L2Element<T>{x, mu, std::move(v)};
}

// indicator of an atom subset
template <class T = double>
L2Element<T> indicator(const XPtr& x, const MeasureOnX& mu,
                       const std::vector<int>& atoms) {
  VecC<T> v = VecC<T>::Zero(x->size());
  for (int i : atoms) v(i) = std::complex<T>(1, 0);
  return L2Element<T>{x, mu, std::move(v)};
}

// ----------------------------------------------------------- the unital cone

template <class T>
bool l2_hermitian(const L2Element<T>& f, T tol = T(kDefaultTol)) {
  return f.values.imag().cwiseAbs().maxCoeff() <= tol;
}

// eta = eta_0 + r u with eta_0 orthogonal to the unit: member iff hermitian,
// r >= 0, and ||eta_0||_2 <= r. An explicit unit (of norm 1) supports cones
// carried over from an equivalent measure.
template <class T>
bool in_L2_cone(const L2Element<T>& eta, T tol = T(kDefaultTol),
                const VecC<T>* unit = nullptr) {
  if (!is_probability(eta.mu, (double)tol))
    throw std::invalid_argument("in_L2_cone: probability measure required");
  if (!l2_hermitian(eta, tol)) return false;
  const T nn = l2_norm(eta);
  std::complex<T> r =
      unit ? l2_inner(eta, L2Element<T>{eta.space, eta.mu, *unit})
           : integrate(eta);
  if (r.real() < -tol) return false;
  T n0 = std::sqrt(std::max(T(0), nn * nn - r.real() * r.real()));
  return n0 <= r.real() + tol;
}

// ------------------------------------------------------- matrix level of L2

// level-n matrix over L2(X,mu): row i*n+j of data holds entry (i,j) sampled
// at the points of X
template <class T = double>
struct L2Matrix {
  XPtr space;
  MeasureOnX mu;
  int n = 1;
  MatC<T> data;  // (n*n) x npoints
};

template <class T>
MatC<T> value_at(const L2Matrix<T>& m, int p) {
  MatC<T> V(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) V(i, j) = m.data(i * m.n + j, p);
  return V;
}

// a = integral of the matrix against mu
template <class T>
MatC<T> l2_mean(const L2Matrix<T>& m) {
  VecR<> dm = point_masses(m.mu);
  MatC<T> a = MatC<T>::Zero(m.n, m.n);
  for (int p = 0; p < m.space->size(); ++p)
    a += std::complex<T>(T(dm(p)), 0) * value_at(m, p);
  return a;
}

namespace detail {

template <class T>
T l2_min_margin(const MatC<T>& a, const L2Matrix<T>& m, const VecR<>& dm,
                const VecC<T>& beta) {
  T lhs = (beta.dot(a * beta)).real();
  VecC<T> q(m.n * m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      q(i * m.n + j) = std::conj(beta(i)) * beta(j);
  VecC<T> vals = m.data.transpose() * q;  // (eta(p) beta, beta) per point
  T acc = 0;
  for (int p = 0; p < vals.size(); ++p) {
    T v = vals(p).real() - lhs;
    acc += T(dm(p)) * v * v;
  }
  return lhs - std::sqrt(acc);
}

}  // namespace detail

// Membership of a hermitian matrix over L2(X,mu) in the min quantization:
// beta^* eta beta must lie in L2(X,mu)_+ for every unit beta, equivalently
// (a beta, beta) >= 0 and int ((eta_0 beta, beta))^2 dmu <= (a beta, beta)^2.
// Exact at level 1; refutations otherwise come from the PSD test on a, the
// per-atom necessary condition, or a sampled beta search.
template <class T>
MembershipVerdict<T> in_min_L2(const L2Matrix<T>& m,
                               const SearchOptions& opt = {}) {
  for (int p = 0; p < m.space->size(); ++p) {
    MatC<T> V = value_at(m, p);
    if ((V - V.adjoint()).cwiseAbs().maxCoeff() > T(opt.tol))
      throw std::invalid_argument("in_min_L2: input must be hermitian");
  }
  if (!is_probability(m.mu, opt.tol))
    throw std::invalid_argument("in_min_L2: probability measure required");

  const VecR<> dm = point_masses(m.mu);
  MatC<T> a = l2_mean(m);
  MembershipVerdict<T> out;

  if (m.n == 1) {
    T r = a(0, 0).real();
    T nsq = 0;
    for (int p = 0; p < m.space->size(); ++p)
      nsq += T(dm(p)) * std::norm(m.data(0, p));
    T n0 = std::sqrt(std::max(T(0), nsq - r * r));
    out.margin = std::min(r, r - n0);
    out.kind = out.margin >= -T(opt.tol) ? Verdict::Member : Verdict::NonMember;
    if (out.kind == Verdict::NonMember) out.witness_beta = VecC<T>::Ones(1);
    return out;
  }

  Eigen::SelfAdjointEigenSolver<MatC<T>> es(MatC<T>((a + a.adjoint()) / T(2)));
  if (es.eigenvalues().minCoeff() < -T(opt.tol)) {
    VecC<T> beta = es.eigenvectors().col(0);
    out.kind = Verdict::NonMember;
    out.margin = detail::l2_min_margin(a, m, dm, beta);
    out.witness_beta = beta;
    out.note = "mean matrix is not PSD";
    return out;
  }

  // necessary per-atom condition on a genuine atomic backend:
  // -a <= mu(s)^{1/2} (eta(s) - a) <= a in the PSD order
  if (m.space->kind == XKind::Atoms) {
    for (int p = 0; p < m.space->size(); ++p) {
      if (dm(p) <= 0) continue;
      MatC<T> dev = std::complex<T>(std::sqrt(T(dm(p))), 0) *
                    MatC<T>(value_at(m, p) - a);
      for (int sign : {+1, -1}) {
        MatC<T> M = a + T(sign) * dev;
        Eigen::SelfAdjointEigenSolver<MatC<T>> esd(
            MatC<T>((M + M.adjoint()) / T(2)));
        if (esd.eigenvalues().minCoeff() < -T(opt.tol)) {
          VecC<T> beta = esd.eigenvectors().col(0);
          out.kind = Verdict::NonMember;
          out.margin = detail::l2_min_margin(a, m, dm, beta);
          out.witness_beta = beta;
          out.note = "atom " + std::to_string(p) + " violates the envelope";
          return out;
        }
      }
    }
  }

  out.margin = std::numeric_limits<T>::infinity();
  VecC<T> best;
  auto consider = [&](const VecC<T>& beta) {
    T v = detail::l2_min_margin(a, m, dm, beta);
    if (v < out.margin) {
      out.margin = v;
      best = beta;
    }
  };
  for (int i = 0; i < m.n; ++i) {
    VecC<T> b = VecC<T>::Zero(m.n);
    b(i) = std::complex<T>(1, 0);
    consider(b);
  }
  for (int i = 0; i < opt.budget; ++i) {
    auto g = rng_for(opt.seed, static_cast<std::uint64_t>(i));
    consider(VecC<T>(random_gaussian_c<T>(m.n, g).normalized()));
  }
  // local refinement by random perturbation of the worst direction
  if (best.size() > 0) {
    T step = T(0.3);
    auto g = rng_for(opt.seed ^ 0x9e77ull);
    for (int it = 0; it < opt.descent_steps; ++it) {
      VecC<T> cand = best + step * random_gaussian_c<T>(m.n, g);
      cand.normalize();
      T v = detail::l2_min_margin(a, m, dm, cand);
      if (v < out.margin) {
        out.margin = v;
        best = cand;
      } else {
        step *= T(0.8);
      }
    }
  }

  if (out.margin < -T(opt.tol)) {
    out.kind = Verdict::NonMember;
    out.witness_beta = best;
    return out;
  }
  out.kind = Verdict::Undecided;
  out.note = "no refutation within budget";
  return out;
}

// ------------------------------------------------------ equivalent measures

// mu' = k mu for k > 0 with int k dmu = 1; U(eta) = eta / sqrt(k) is a
// *-linear unitary carrying the cone of (L2(mu), u) onto the cone of
// (L2(mu'), u/sqrt(k)). The transported unit is returned alongside.
template <class T = double>
struct EquivalentMeasure {
  MeasureOnX mu_prime;
  VecC<T> unit_prime;  // u / sqrt(k) on the same grid
};

template <class T = double>
EquivalentMeasure<T> equivalent_measure(const MeasureOnX& mu, const VecR<>& k) {
  if (k.size() != mu.w.size())
    throw std::invalid_argument("equivalent_measure: size mismatch");
  if (k.minCoeff() <= 0)
    throw std::invalid_argument("equivalent_measure: k must be positive");
  MeasureOnX mup{mu.space, VecR<>(mu.w.cwiseProduct(k))};
  VecC<T> up(k.size());
  for (int i = 0; i < k.size(); ++i)
    up(i) = std::complex<T>(T(1) / std::sqrt(T(k(i))), 0);
  return EquivalentMeasure<T>{std::move(mup), std::move(up)};
}

template <class T>
L2Element<T> measure_unitary(const L2Element<T>& eta,
                             const EquivalentMeasure<T>& em, const VecR<>& k) {
  VecC<T> v(eta.values.size());
  for (int i = 0; i < v.size(); ++i)
    v(i) = eta.values(i) / std::complex<T>(std::sqrt(T(k(i))), 0);
  return L2Element<T>{eta.space, em.mu_prime, std::move(v)};
}

// ------------------------------------------------------------ the example

// step function with zero-mean, unit-variance fluctuation that still lies in
// the cone while dipping below zero: on [-1, 1] with the normalized length
// measure, value 1 outside [-1/n, 1/n], 1 -+ sqrt(n) on the two inner pieces
template <class T = double>
L2Element<T> deep_step_example(int n = 4, int nodes = 2048) {
  if (n < 2) throw std::invalid_argument("deep_step_example: need n >= 2");
  const double inv = 1.0 / n;
  auto x = make_interval_space(-1, 1, nodes, {-inv, 0.0, inv});
  auto mu = make_measure(x, VecR<>::Constant(x->size(), 0.5));
  const T s = std::sqrt(T(n));
  return step_element<T>(x, mu, {-inv, 0.0, inv},
                         {std::complex<T>(1, 0), std::complex<T>(1 - s, 0),
                          std::complex<T>(1 + s, 0), std::complex<T>(1, 0)});
}

}  // namespace opcone
