#pragma once
// Finite-dimensional unital Hilbert *-spaces over a fixed hermitian basis:
// coordinate involution, the order-unit cone, its state space, and the
// order norm. Everything downstream builds on these types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace opcone {

inline constexpr double kDefaultTol = 1e-9;
// eigenvalues below this are treated as zero before square roots
inline constexpr double kEigClamp = 1e-12;

template <class T = double> using VecC = Eigen::Vector<std::complex<T>, Eigen::Dynamic>;
template <class T = double> using VecR = Eigen::Vector<T, Eigen::Dynamic>;
template <class T = double> using MatC = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <class T = double> using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------- threading

inline int threads() {
  if (const char* env = std::getenv("OPCONE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Deterministic parallel loop; f(i) may only write state owned by index i,
// so serial and sharded runs produce identical results.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& f) {
  const int nt = threads();
  if (nt <= 1 || n < 256) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&f, lo, hi] {
      for (std::int64_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ------------------------------------------------------------------ seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream seed for sample #index of a run; stable under any sharding.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index = 0) {
  return std::mt19937_64(subseed(seed, index));
}

// ------------------------------------------------------------------- spaces

struct UnitalSpace {
  int dim = 1;
  int unit_index = 0;
  std::vector<std::string> labels;  // distinct, one per basis element
};

using SpacePtr = std::shared_ptr<const UnitalSpace>;

inline SpacePtr make_space(int dim, int unit_index = 0,
                           std::vector<std::string> labels = {}) {
  if (dim < 1) throw std::invalid_argument("make_space: dim must be >= 1");
  if (unit_index < 0 || unit_index >= dim)
    throw std::invalid_argument("make_space: unit_index out of range");
  if (labels.empty()) {
    labels.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
      labels.push_back(i == unit_index ? std::string("e") : "f" + std::to_string(i));
  }
  if (static_cast<int>(labels.size()) != dim)
    throw std::invalid_argument("make_space: labels length != dim");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        throw std::invalid_argument("make_space: labels must be distinct");
  auto sp = std::make_shared<UnitalSpace>();
  sp->dim = dim;
  sp->unit_index = unit_index;
  sp->labels = std::move(labels);
  return sp;
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  return a && b && a->dim == b->dim && a->unit_index == b->unit_index &&
         a->labels == b->labels;
}

// ------------------------------------------------------------------ vectors

template <class T = double>
struct HVector {
  SpacePtr space;
  VecC<T> coords;  // coordinate at f is (zeta, f)
};

template <class T>
HVector<T> make_vector(SpacePtr space, VecC<T> coords) {
  if (!space) throw std::invalid_argument("make_vector: null space");
  if (coords.size() != space->dim)
    throw std::invalid_argument("make_vector: coords length != dim");
  return HVector<T>{std::move(space), std::move(coords)};
}

template <class T = double>
HVector<T> zero_vector(const SpacePtr& space) {
  return HVector<T>{space, VecC<T>::Zero(space->dim)};
}

template <class T = double>
HVector<T> basis_vector(const SpacePtr& space, int i) {
  auto v = zero_vector<T>(space);
  v.coords(i) = std::complex<T>(1, 0);
  return v;
}

template <class T = double>
HVector<T> unit_vector(const SpacePtr& space) {
  return basis_vector<T>(space, space->unit_index);
}

template <class T>
void require_same_space(const HVector<T>& a, const HVector<T>& b) {
  if (!same_space(a.space, b.space))
    throw std::invalid_argument("operands live in different spaces");
}

template <class T>
HVector<T> operator+(const HVector<T>& a, const HVector<T>& b) {
  require_same_space(a, b);
  return HVector<T>{a.space, a.coords + b.coords};
}

template <class T>
HVector<T> operator-(const HVector<T>& a, const HVector<T>& b) {
  require_same_space(a, b);
  return HVector<T>{a.space, a.coords - b.coords};
}

template <class T>
HVector<T> operator*(std::complex<T> c, const HVector<T>& v) {
  return HVector<T>{v.space, VecC<T>(c * v.coords)};
}

template <class T>
HVector<T> operator*(T c, const HVector<T>& v) {
  return HVector<T>{v.space, VecC<T>(std::complex<T>(c, 0) * v.coords)};
}

// (a, b) = sum_f a_f conj(b_f); the basis is orthonormal
template <class T>
std::complex<T> inner(const HVector<T>& a, const HVector<T>& b) {
  require_same_space(a, b);
  return b.coords.dot(a.coords);
}

template <class T>
T norm(const HVector<T>& v) {
  return v.coords.norm();
}

// the involution conjugates coordinates against the hermitian basis
template <class T>
HVector<T> involute(const HVector<T>& v) {
  return HVector<T>{v.space, v.coords.conjugate()};
}

template <class T>
bool is_hermitian(const HVector<T>& v, T tol = T(kDefaultTol)) {
  for (Eigen::Index i = 0; i < v.coords.size(); ++i)
    if (std::abs(v.coords(i).imag()) > tol) return false;
  return true;
}

template <class T>
VecR<T> real_coords(const HVector<T>& v) {
  return v.coords.real();
}

// zeta = zeta0 + lambda e with (zeta0, e) = 0, lambda = (zeta, e)
template <class T>
struct Decomposition {
  HVector<T> zeta0;
  std::complex<T> lambda;
};

template <class T>
Decomposition<T> decompose(const HVector<T>& v) {
  Decomposition<T> d{v, v.coords(v.space->unit_index)};
  d.zeta0.coords(v.space->unit_index) = std::complex<T>(0, 0);
  return d;
}

// hermitian parts: v = x + i y with x, y hermitian
template <class T>
std::pair<HVector<T>, HVector<T>> hermitian_parts(const HVector<T>& v) {
  HVector<T> x{v.space, VecC<T>((v.coords + v.coords.conjugate()) / T(2))};
  HVector<T> y{v.space, VecC<T>((v.coords - v.coords.conjugate()) /
                                std::complex<T>(0, 2))};
  return {x, y};
}

// membership in the order-unit cone: hermitian and ||zeta0|| <= (zeta, e)
template <class T>
bool in_cone(const HVector<T>& v, T tol = T(kDefaultTol)) {
  if (!is_hermitian(v, tol)) return false;
  auto d = decompose(v);
  return norm(d.zeta0) <= d.lambda.real() + tol;
}

// ------------------------------------------------------------------- states

// a state is s = s0 + e with s0 hermitian, (s0, e) = 0, ||s0|| <= 1
template <class T = double>
struct StatePoint {
  SpacePtr space;
  VecR<T> s0;  // real coordinates, unit component zero
};

template <class T>
StatePoint<T> make_state(SpacePtr space, VecR<T> s0, T tol = T(kDefaultTol)) {
  if (!space) throw std::invalid_argument("make_state: null space");
  if (s0.size() != space->dim)
    throw std::invalid_argument("make_state: s0 length != dim");
  if (std::abs(s0(space->unit_index)) > tol)
    throw std::invalid_argument("make_state: s0 not orthogonal to the unit");
  if (s0.norm() > T(1) + tol)
    throw std::invalid_argument("make_state: ||s0|| > 1");
  return StatePoint<T>{std::move(space), std::move(s0)};
}

template <class T>
HVector<T> state_vector(const StatePoint<T>& s) {
  VecC<T> c = s.s0.template cast<std::complex<T>>();
  c(s.space->unit_index) += std::complex<T>(1, 0);
  return HVector<T>{s.space, std::move(c)};
}

// evaluation of zeta at the state s: zeta(s) = (zeta, s0 + e)
template <class T>
std::complex<T> eval_at_state(const HVector<T>& v, const StatePoint<T>& s) {
  std::complex<T> acc = v.coords(v.space->unit_index);
  for (Eigen::Index i = 0; i < v.coords.size(); ++i)
    acc += v.coords(i) * s.s0(i);
  return acc;
}

// uniform draw from the unit ball of H_h^e (real coords orthogonal to e)
template <class T>
VecR<T> random_ball_he(const UnitalSpace& sp, std::mt19937_64& g) {
  VecR<T> s0 = VecR<T>::Zero(sp.dim);
  const int d = sp.dim - 1;
  if (d == 0) return s0;
  std::normal_distribution<T> gauss(0, 1);
  for (int i = 0; i < sp.dim; ++i)
    if (i != sp.unit_index) s0(i) = gauss(g);
  T n = s0.norm();
  if (n < T(1e-300)) return s0;
  std::uniform_real_distribution<T> uni(0, 1);
  const T r = std::pow(uni(g), T(1) / T(d));
  s0 *= r / n;
  return s0;
}

template <class T>
VecC<T> random_gaussian_c(int n, std::mt19937_64& g) {
  std::normal_distribution<T> gauss(0, 1);
  VecC<T> v(n);
  for (int i = 0; i < n; ++i) v(i) = std::complex<T>(gauss(g), gauss(g));
  return v;
}

// Deterministic head: the unit state and the pure directions +-f + e for
// every f != e; random ball samples fill the rest of the request.
template <class T = double>
std::vector<StatePoint<T>> sample_states(const SpacePtr& space, int count,
                                         std::uint64_t seed = 0) {
  if (count < 1) throw std::invalid_argument("sample_states: count < 1");
  std::vector<StatePoint<T>> out;
  out.push_back(StatePoint<T>{space, VecR<T>::Zero(space->dim)});
  for (int i = 0; i < space->dim; ++i) {
    if (i == space->unit_index) continue;
    VecR<T> s0 = VecR<T>::Zero(space->dim);
    s0(i) = T(1);
    out.push_back(StatePoint<T>{space, s0});
    s0(i) = T(-1);
    out.push_back(StatePoint<T>{space, s0});
  }
  for (std::int64_t i = static_cast<std::int64_t>(out.size()); i < count; ++i) {
    auto g = rng_for(seed, static_cast<std::uint64_t>(i));
    out.push_back(StatePoint<T>{space, random_ball_he<T>(*space, g)});
  }
  return out;
}

// --------------------------------------------------------------- order norm

// Hermitian closed form: ||zeta0 + lambda e||_e = ||zeta0|| + |lambda|.
// General input: supremum of |zeta(s)| over states; the canonical states of
// the hermitian parts put the sampled value at >= ||zeta|| / sqrt(2), and the
// true supremum sits in [||zeta|| / 5, 2 ||zeta||].
template <class T>
T order_norm(const HVector<T>& v, int samples = 100000, std::uint64_t seed = 0) {
  if (is_hermitian(v, T(kDefaultTol))) {
    auto d = decompose(v);
    return norm(d.zeta0) + std::abs(d.lambda.real());
  }
  auto [x, y] = hermitian_parts(v);
  std::vector<StatePoint<T>> states;
  states.push_back(StatePoint<T>{v.space, VecR<T>::Zero(v.space->dim)});
  auto push_dir = [&](const HVector<T>& h) {
    auto d = decompose(h);
    T n = norm(d.zeta0);
    if (n <= T(kEigClamp)) return;
    VecR<T> s0 = real_coords(d.zeta0) / n;
    states.push_back(StatePoint<T>{v.space, s0});
    states.push_back(StatePoint<T>{v.space, VecR<T>(-s0)});
  };
  push_dir(x);
  push_dir(y);
  T best = 0;
  for (const auto& s : states) best = std::max(best, std::abs(eval_at_state(v, s)));
  const int extra = std::max(0, samples - static_cast<int>(states.size()));
  for (int i = 0; i < extra; ++i) {
    auto g = rng_for(seed, static_cast<std::uint64_t>(i));
    StatePoint<T> s{v.space, random_ball_he<T>(*v.space, g)};
    best = std::max(best, std::abs(eval_at_state(v, s)));
  }
  return best;
}

}  // namespace opcone
