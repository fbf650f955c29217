// opcone: membership checks, factorization and block-map reports, state
// measure utilities, and deterministic demos that re-derive the library's
// reference numbers. Every command prints a run report; exit codes follow
// 0 member / 1 non-member / 2 undecided / 3 demo claim failed / 64 usage /
// 65 bad input.

#include <opcone/io.hpp>
#include <opcone/pietsch.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace opcone;
using cx = std::complex<double>;

constexpr int kExitMember = 0;
constexpr int kExitNonMember = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitClaim = 3;
constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;

struct Options {
  std::string input;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int budget = 1000;
  bool json = false;
  bool pretty = false;
};

struct ClaimFail {
  std::string message;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

// numeric claims record their value in the report and abort with both
// numbers on a violation
void claim_close(RunReport& r, const std::string& name, double got,
                 double want, double tol) {
  r.margins.emplace_back(name, got);
  if (!(std::abs(got - want) <= tol))
    throw ClaimFail{"claim '" + name + "' violated: got " + fmt(got) +
                    " expected " + fmt(want) + " within " + fmt(tol)};
}

void claim_le(RunReport& r, const std::string& name, double got,
              double bound) {
  r.margins.emplace_back(name, got);
  if (!(got <= bound))
    throw ClaimFail{"claim '" + name + "' violated: got " + fmt(got) +
                    " expected <= " + fmt(bound)};
}

void claim_true(RunReport& r, const std::string& name, bool ok) {
  r.verdicts.emplace_back(name, ok ? "holds" : "violated");
  if (!ok)
    throw ClaimFail{"claim '" + name + "' violated: got false expected true"};
}

void print_report(const RunReport& r, const Options& opt,
                  const Json* result = nullptr) {
  Json j = run_report_to_json(r);
  if (result != nullptr) j["result"] = *result;
  std::cout << j.dump(opt.pretty ? 2 : -1) << "\n";
}

void print_human(const RunReport& r) {
  for (const auto& [k, v] : r.verdicts) std::cout << k << ": " << v << "\n";
  for (const auto& [k, v] : r.margins)
    std::cout << k << " = " << fmt(v) << "\n";
  std::cout << r.command << ": ok\n";
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Member: return kExitMember;
    case Verdict::NonMember: return kExitNonMember;
    default: return kExitUndecided;
  }
}

// --matrix files hold either an explicit {"n", "m"} element or a bare
// complex matrix as an array of rows
HSElement<> parse_hs(const Json& j, int n_hint) {
  HSElement<> x;
  if (j.is_array()) {
    x.m = mat_c_from_json(j);
    x.n = static_cast<int>(x.m.rows());
  } else {
    x = hs_from_json(j);
  }
  if (x.m.rows() != x.m.cols())
    throw std::runtime_error("hs: matrix must be square");
  if (n_hint > 0 && n_hint != x.n)
    throw std::runtime_error("hs: --n disagrees with the matrix size");
  return x;
}

double hermitian_defect(const MatC<>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ----------------------------------------------------------------- check

int run_check(const Options& opt, const std::string& cone,
              const std::string& vec_file, const std::string& mat_file,
              int level, int hs_n) {
  RunReport r;
  r.command = "check --cone " + cone;
  r.seed = opt.seed;
  SearchOptions sopt;
  sopt.budget = opt.budget;
  sopt.tol = opt.tol;
  sopt.seed = opt.seed;
  Stopwatch sw;

  auto pick = [&](const std::string& specific) {
    const std::string& path = specific.empty() ? opt.input : specific;
    if (path.empty())
      throw std::runtime_error("check: no input file for cone " + cone);
    std::string text = slurp(path);
    r.inputs_digest = digest_text(cone + "\n" + text);
    return parse_json(text, path);
  };

  Verdict kind = Verdict::Undecided;
  Json result;

  if (cone == "c") {
    auto v = hvector_from_json(pick(vec_file));
    auto d = decompose(v);
    const bool member = in_cone(v, opt.tol);
    kind = member ? Verdict::Member : Verdict::NonMember;
    r.margins.emplace_back("margin",
                           d.lambda.real() - d.zeta0.coords.norm());
    r.margins.emplace_back("hermitian_defect",
                           v.coords.imag().cwiseAbs().maxCoeff());
  } else if (cone == "min" || cone == "max" || cone == "cl" || cone == "co" ||
             cone == "cu") {
    auto z = hmatrix_from_json(pick(mat_file));
    if (level > 0 && level != z.n)
      throw std::runtime_error("check: --level disagrees with the input");
    MembershipVerdict<double> v;
    if (cone == "min") v = in_min(z, sopt);
    else if (cone == "max") v = certify_max(z, sopt);
    else if (cone == "cl") v = in_quantum_cone(z, QuantumCone::Cl, sopt);
    else if (cone == "co") v = in_quantum_cone(z, QuantumCone::Co, sopt);
    else v = in_quantum_cone(z, QuantumCone::Cu, sopt);
    kind = v.kind;
    r.margins.emplace_back("margin", v.margin);
    if (!v.note.empty()) r.verdicts.emplace_back("note", v.note);
    result = verdict_to_json(v);
  } else if (cone == "hs" || cone == "hs2" || cone == "hs3" ||
             cone == "psd") {
    int hint = hs_n;
    if (cone == "hs2") hint = 2;
    if (cone == "hs3") hint = 3;
    auto x = parse_hs(pick(mat_file), hint);
    r.margins.emplace_back("hermitian_defect", hermitian_defect(x.m));
    if (cone == "psd") {
      const double lm = lambda_min(x.m);
      const bool herm =
          hermitian_defect(x.m) <= opt.tol * std::max(1.0, x.m.norm());
      kind = (herm && lm >= -opt.tol) ? Verdict::Member : Verdict::NonMember;
      r.margins.emplace_back("lambda_min", lm);
    } else {
      auto rep = in_HS_cone(x, opt.tol);
      kind = rep.member ? Verdict::Member : Verdict::NonMember;
      r.margins.emplace_back("tau", rep.tau);
      r.margins.emplace_back("fluctuation", rep.fluct);
      r.margins.emplace_back("margin", rep.margin);
    }
  } else if (cone == "l2") {
    auto eta = l2_from_json(pick(vec_file));
    kind = in_L2_cone(eta, opt.tol) ? Verdict::Member : Verdict::NonMember;
    r.margins.emplace_back("mean", integrate(eta).real());
  } else {
    std::cerr << "opcone: unknown cone '" << cone
              << "' (expected c|min|max|cl|co|cu|hs|hs2|hs3|psd|l2)\n";
    return kExitUsage;
  }

  r.verdicts.emplace_back("membership", verdict_name(kind));
  r.timings_ms.emplace_back("total", sw.ms());
  print_report(r, opt, result.is_null() ? nullptr : &result);
  return verdict_exit(kind);
}

// ------------------------------------------------------------------ demos

void demo_hs3(RunReport& r) {
  MatC<> x0 = hs3_x0<double>();
  Eigen::SelfAdjointEigenSolver<MatC<>> es(x0);
  const double s = std::sqrt(1.5);
  claim_close(r, "eigenvalue_low", es.eigenvalues()(0), -s, 1e-9);
  claim_close(r, "eigenvalue_mid", es.eigenvalues()(1), 0.0, 1e-9);
  claim_close(r, "eigenvalue_high", es.eigenvalues()(2), s, 1e-9);

  HSElement<> x{3, x0 + MatC<>::Identity(3, 3)};
  auto rep = in_HS_cone(x);
  claim_true(r, "shifted_element_in_cone", rep.member);
  claim_close(r, "tau", rep.tau, 1.0, 1e-12);
  claim_close(r, "lambda_min", lambda_min(x.m), 1.0 - s, 1e-9);
  claim_le(r, "lambda_min_is_negative", lambda_min(x.m), -1e-6);
}

void demo_exm11(RunReport& r) {
  auto eta = deep_step_example<double>(4, 2048);
  L2Element<> eta0 = eta;
  eta0.values.array() -= cx(1, 0);
  claim_close(r, "mean", integrate(eta).real(), 1.0, 1e-12);
  claim_close(r, "fluctuation_mean", integrate(eta0).real(), 0.0, 1e-12);
  claim_close(r, "fluctuation_energy", l2_norm(eta0), 1.0, 1e-12);
  claim_true(r, "member_of_l2_cone", in_L2_cone(eta));
  claim_close(r, "deepest_value", eta.values.real().minCoeff(), -1.0, 1e-12);
}

void demo_chi_half(RunReport& r) {
  auto x = make_atomic_space({0.0, 1.0});
  int step = 0;
  for (double p : {0.3, 0.5 - 1e-6, 0.5, 0.5 + 1e-6, 0.7}) {
    VecR<> w(2);
    w << p, 1.0 - p;
    auto mu = make_measure(x, w);
    auto chi = indicator<double>(x, mu, {0});
    L2Element<> centered = chi;
    centered.values(0) -= cx(p, 0);
    centered.values(1) -= cx(p, 0);
    claim_close(r, "norm_identity_" + std::to_string(step),
                l2_norm(centered) * l2_norm(centered), p * (1.0 - p), 1e-15);
    const bool member = in_L2_cone(chi);
    const bool expected = p >= 0.5 - 1e-9;
    claim_true(r, "flip_at_half_" + std::to_string(step),
               member == expected);
    ++step;
  }
}

void demo_sin_support(RunReport& r) {
  auto s = wave_support<double>(64, 4096);
  auto rep = is_maximal(s);
  const double series_tail = M_PI * M_PI / 6.0 - 1.0;
  claim_true(r, "support_is_maximal", rep.maximal);
  claim_le(r, "pointwise_energy", rep.worst, series_tail + 1e-12);
  claim_le(r, "margin_lower_bound", 1.0 - series_tail, rep.margin + 1e-12);

  auto d = separate(s);
  claim_close(r, "defect_q0", d.q0.cwiseAbs().maxCoeff(), 0.0, 1e-12);
  claim_le(r, "reconstruction_error", d.reconstruction_error, 1e-9);
}

void demo_swap(RunReport& r) {
  auto rep = cone_swap_check<double>(8, 0, 7, 300, 0);
  claim_close(r, "involution_defect", rep.involution_defect, 0.0, 1e-12);
  claim_close(r, "selfadjoint_defect", rep.selfadjoint_defect, 0.0, 1e-12);
  claim_close(r, "unitary_defect", rep.unitary_defect, 0.0, 1e-12);
  claim_close(r, "cone_failures", rep.cone_failures, 0.0, 0.0);
  claim_le(r, "margin_drift", rep.margin_drift, 1e-12);
  claim_true(r, "levels_transported", rep.transported > 0);
  claim_le(r, "transport_residual", rep.transport_residual, 1e-10);
}

void demo_l22_minmax(RunReport& r) {
  auto sp = l22_space<double>();
  auto g = rng_for(2);
  std::normal_distribution<double> gauss(0, 1);
  auto random_herm = [&](double shift) {
    MatC<> a(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = cx(gauss(g), gauss(g));
    return MatC<>(0.5 * (a + a.adjoint()) + shift * MatC<>::Identity(2, 2));
  };
  int members = 0, rejected = 0;
  double worst_residual = 0;
  SearchOptions sopt;
  sopt.budget = 300;
  for (int t = 0; t < 160; ++t) {
    auto z = zero_hmatrix<double>(sp, 2);
    set_coeff(z, 0, random_herm(t % 2 == 0 ? 3.0 : 0.0));
    set_coeff(z, 1, random_herm(0.0));
    const double exact = l22_min_margin(z);
    if (exact >= 1e-6) {
      auto cert = l22_max_certificate(z);
      worst_residual = std::max(worst_residual, cert.residual_bound);
      if (cert.residual_bound > 1e-9)
        throw ClaimFail{
            "claim 'certificate_residual' violated: got " +
            fmt(cert.residual_bound) + " expected <= 1e-9"};
      ++members;
    } else if (exact <= -1e-3) {
      auto v = in_min(z, sopt);
      if (v.kind != Verdict::NonMember)
        throw ClaimFail{
            "claim 'search_refutes_non_member' violated: margin " +
            fmt(exact) + " left " + verdict_name(v.kind)};
      ++rejected;
    }
  }
  r.margins.emplace_back("members", members);
  r.margins.emplace_back("rejected", rejected);
  claim_le(r, "worst_certificate_residual", worst_residual, 1e-9);
  claim_true(r, "enough_members", members >= 20);
  claim_true(r, "enough_rejections", rejected >= 20);
}

void demo_mass_bound(RunReport& r) {
  auto sp = make_space(3);
  VecR<> dir = VecR<>::Zero(3);
  dir(1) = 1.0;
  auto mu = antipodal_measure(StatePoint<>{sp, dir});
  auto mb = mass_bounds(mu, 0);
  claim_close(r, "saturated_mass", mb.mass, 0.5, 1e-14);
  claim_close(r, "saturated_cap", mb.cap, 0.5, 1e-14);
  claim_close(r, "chain_head", mb.chain[0], std::sqrt(0.5), 1e-12);
  for (int i = 0; i + 1 < 5; ++i)
    claim_le(r, "chain_link_" + std::to_string(i),
             mb.chain[static_cast<std::size_t>(i)],
             mb.chain[static_cast<std::size_t>(i) + 1] + 1e-10);
  claim_le(r, "identity_gap", mb.identity_gap, 1e-9);

  auto point = delta_e<double>(sp);
  auto mb_e = mass_bounds(point, 0);
  claim_close(r, "point_mass_cap", mb_e.cap, 1.0, 1e-14);
  claim_close(r, "point_mass", mb_e.mass, 1.0, 1e-14);
}

void demo_pietsch_bound(RunReport& r) {
  auto target = make_space(4);
  auto x = make_atomic_space({0.0, 1.0, 2.0, 3.0, 4.0});
  auto g = rng_for(3);
  auto m = random_unital_positive_map<double>(target, x, g);
  auto f = factorize(m);
  const double bound = 2.0 * std::sqrt(2.0);
  claim_close(r, "factorization_bound", f.bound, bound * mass(f.mu), 1e-9);

  VecR<> dm = point_masses(f.mu);
  std::normal_distribution<double> gauss(0, 1);
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    VecR<> v(x->size());
    for (int p = 0; p < v.size(); ++p) v(p) = gauss(g);
    const double lhs = apply(m, v).coords.norm();
    const double rhs = bound * dm.dot(v.cwiseAbs());
    worst = std::max(worst, lhs - rhs);
  }
  claim_le(r, "domination_defect", worst, 1e-9);

  auto sb = summing_norm_lp(m, 500, 0);
  claim_le(r, "lp_upper", sb.upper, bound + 1e-6);
  claim_le(r, "lp_lower_vs_upper", sb.lower, sb.upper + 1e-12);

  auto nr = nuclear_bound_check(m, f.mu);
  claim_le(r, "nuclear_vs_hs", nr.nuclear,
           std::sqrt(mass(f.mu)) * nr.hs + 1e-9);
}

int run_demo(const Options& opt, const std::string& name) {
  RunReport r;
  r.command = "demo " + name;
  r.seed = opt.seed;
  r.inputs_digest = digest_text(name);
  Stopwatch sw;
  if (name == "hs3") demo_hs3(r);
  else if (name == "exm11") demo_exm11(r);
  else if (name == "chi_half") demo_chi_half(r);
  else if (name == "sin_support") demo_sin_support(r);
  else if (name == "swap") demo_swap(r);
  else if (name == "l22_minmax") demo_l22_minmax(r);
  else if (name == "mass_bound") demo_mass_bound(r);
  else if (name == "pietsch_bound") demo_pietsch_bound(r);
  else {
    std::cerr << "opcone: unknown demo '" << name
              << "' (expected hs3|exm11|chi_half|sin_support|swap|"
                 "l22_minmax|mass_bound|pietsch_bound)\n";
    return kExitUsage;
  }
  r.timings_ms.emplace_back("total", sw.ms());
  if (opt.json) print_report(r, opt);
  else print_human(r);
  return 0;
}

// ---------------------------------------------------------- report commands

int run_pietsch(const Options& opt, const std::string& map_file,
                int samples) {
  const std::string path = map_file.empty() ? opt.input : map_file;
  if (path.empty()) throw std::runtime_error("pietsch: --map is required");
  std::string text = slurp(path);
  RunReport r;
  r.command = "pietsch";
  r.seed = opt.seed;
  r.inputs_digest = digest_text(text);
  Stopwatch sw;

  auto m = atom_map_from_json(parse_json(text, path));
  auto f = factorize(m, opt.tol);
  auto sb = summing_norm_lp(m, samples, opt.seed);
  auto nr = nuclear_bound_check(m, f.mu);

  r.margins.emplace_back("bound", f.bound);
  r.margins.emplace_back("summing_lower", sb.lower);
  r.margins.emplace_back("summing_upper", sb.upper);
  r.margins.emplace_back("nuclear", nr.nuclear);
  r.margins.emplace_back("hilbert_schmidt", nr.hs);
  r.verdicts.emplace_back("upper_certified",
                          sb.upper_certified ? "yes" : "no");
  r.timings_ms.emplace_back("total", sw.ms());

  Json result{{"mu", measure_to_json(f.mu)},
              {"t1_diag", vec_r_to_json(f.t1_diag)},
              {"k", support_to_json(f.k)},
              {"bound", f.bound}};
  print_report(r, opt, &result);
  return 0;
}

int run_hs(const Options& opt, const std::string& mat_file, int n) {
  const std::string path = mat_file.empty() ? opt.input : mat_file;
  if (path.empty()) throw std::runtime_error("hs: --matrix is required");
  std::string text = slurp(path);
  RunReport r;
  r.command = "hs";
  r.seed = opt.seed;
  r.inputs_digest = digest_text(text);
  Stopwatch sw;

  auto x = parse_hs(parse_json(text, path), n);
  auto rep = in_HS_cone(x, opt.tol);
  r.verdicts.emplace_back("membership",
                          rep.member ? "member" : "non-member");
  r.verdicts.emplace_back("hermitian", rep.hermitian ? "yes" : "no");
  r.margins.emplace_back("tau", rep.tau);
  r.margins.emplace_back("fluctuation", rep.fluct);
  r.margins.emplace_back("margin", rep.margin);
  r.margins.emplace_back("lambda_min", lambda_min(x.m));
  r.timings_ms.emplace_back("total", sw.ms());
  print_report(r, opt);
  return rep.member ? kExitMember : kExitNonMember;
}

int run_eb(const Options& opt, const std::string& map_file) {
  const std::string path = map_file.empty() ? opt.input : map_file;
  if (path.empty()) throw std::runtime_error("eb: --map is required");
  std::string text = slurp(path);
  RunReport r;
  r.command = "eb";
  r.seed = opt.seed;
  r.inputs_digest = digest_text(text);
  Stopwatch sw;

  auto f = eb_map_from_json(parse_json(text, path));
  auto rep = eb_check(f, opt.budget, opt.seed, opt.tol);
  r.verdicts.emplace_back("verdict", eb_verdict_name(rep.verdict));
  r.verdicts.emplace_back("disagreement", rep.disagreement ? "yes" : "no");
  if (!rep.note.empty()) r.verdicts.emplace_back("note", rep.note);
  r.margins.emplace_back("min_route_worst", rep.min_route_worst);
  r.margins.emplace_back("max_route_member", rep.max_route_member);
  r.margins.emplace_back("max_route_refuted", rep.max_route_refuted);
  r.margins.emplace_back("max_route_undecided", rep.max_route_undecided);
  r.timings_ms.emplace_back("total", sw.ms());
  print_report(r, opt);
  switch (rep.verdict) {
    case EbVerdict::Breaking: return kExitMember;
    case EbVerdict::NotBreaking: return kExitNonMember;
    default: return kExitUndecided;
  }
}

// ----------------------------------------------------------------- states

int run_states(const Options& opt, const std::string& action, int atom) {
  if (opt.input.empty())
    throw std::runtime_error("states " + action + ": --input is required");
  std::string text = slurp(opt.input);
  RunReport r;
  r.command = "states " + action;
  r.seed = opt.seed;
  r.inputs_digest = digest_text(text);
  Stopwatch sw;
  Json j = parse_json(text, opt.input);

  if (action == "check") {
    auto mu = unital_measure_from_json(j, opt.tol);
    auto bary = measure_barycenter(mu.space, mu.atoms);
    VecC<> fluct = bary.coords;
    fluct(mu.space->unit_index) = 0;
    r.margins.emplace_back("atoms", static_cast<double>(mu.atoms.size()));
    r.margins.emplace_back("barycenter_defect", fluct.norm());
    r.verdicts.emplace_back("unital_measure", "valid");
    r.timings_ms.emplace_back("total", sw.ms());
    print_report(r, opt);
    return 0;
  }
  if (action == "mass") {
    auto mu = unital_measure_from_json(j, opt.tol);
    auto mb = mass_bounds(mu, atom);
    r.margins.emplace_back("mass", mb.mass);
    r.margins.emplace_back("cap", mb.cap);
    r.margins.emplace_back("identity_gap", mb.identity_gap);
    for (int i = 0; i < 5; ++i)
      r.margins.emplace_back("chain_" + std::to_string(i),
                             mb.chain[static_cast<std::size_t>(i)]);
    bool monotone = true;
    for (int i = 0; i + 1 < 5; ++i)
      monotone = monotone && mb.chain[static_cast<std::size_t>(i)] <=
                                 mb.chain[static_cast<std::size_t>(i) + 1] +
                                     1e-10;
    r.verdicts.emplace_back("chain_monotone", monotone ? "yes" : "no");
    r.timings_ms.emplace_back("total", sw.ms());
    print_report(r, opt);
    return monotone ? 0 : 1;
  }
  if (action == "complete") {
    auto a = mass_assignment_from_json(j);
    auto rep = concentration_feasible(a, opt.tol);
    r.margins.emplace_back("slack", rep.slack);
    r.verdicts.emplace_back("feasible", rep.feasible ? "yes" : "no");
    Json result;
    if (rep.feasible) {
      auto mu = complete_assignment(a, opt.tol);
      result = unital_measure_to_json(mu);
    }
    r.timings_ms.emplace_back("total", sw.ms());
    print_report(r, opt, result.is_null() ? nullptr : &result);
    return rep.feasible ? 0 : 1;
  }
  if (action == "project") {
    auto mu = unital_measure_from_json(j, opt.tol);
    MatR<> P = conditional_expectation(mu);
    VecR<> dm = point_masses(mu.mu);
    MatR<> W = dm.asDiagonal();
    r.margins.emplace_back("idempotence_defect", (P * P - P).norm());
    r.margins.emplace_back("selfadjoint_defect",
                           (W * P - P.transpose() * W).norm());
    r.margins.emplace_back(
        "unital_defect",
        (P * VecR<>::Ones(P.cols()) - VecR<>::Ones(P.rows())).norm());
    r.timings_ms.emplace_back("total", sw.ms());
    Json result = mat_r_to_json(P);
    print_report(r, opt, &result);
    return 0;
  }
  if (action == "factor") {
    auto mu = unital_measure_from_json(j.at("measure"), opt.tol);
    auto target = space_from_json(j.at("target"));
    MatR<> tmat = mat_r_from_json(j.at("tmat"));
    auto f = l2_factorize(tmat, target, mu);
    r.verdicts.emplace_back("factored", f.ok ? "yes" : "no");
    r.verdicts.emplace_back("exact", f.exact ? "yes" : "no");
    r.margins.emplace_back("residual", f.residual);
    if (!f.ok)
      r.margins.emplace_back("offending_basis_index",
                             static_cast<double>(f.offending));
    r.timings_ms.emplace_back("total", sw.ms());
    Json result = mat_r_to_json(f.k);
    print_report(r, opt, &result);
    return f.ok ? 0 : 1;
  }
  std::cerr << "opcone: unknown states action '" << action << "'\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("OPCONE_THREADS")) {
    const int n = std::max(1, std::atoi(t));
    Eigen::setNbThreads(n);
  }

  CLI::App app{"ordered cones over unital Hilbert spaces"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--input", opt.input, "input JSON file");
  app.add_option("--seed", opt.seed, "seed for all randomized searches");
  app.add_option("--tol", opt.tol, "numerical tolerance");
  app.add_option("--budget", opt.budget, "search budget");
  app.add_flag("--json", opt.json, "emit run reports as JSON everywhere");
  app.add_flag("--pretty", opt.pretty, "indent JSON output");

  auto* check = app.add_subcommand("check", "cone membership tests");
  check->fallthrough();
  std::string cone, vec_file, mat_file;
  int level = 0, hs_n = 0;
  check->add_option("--cone", cone, "c|min|max|cl|co|cu|hs|hs2|hs3|psd|l2")
      ->required();
  check->add_option("--vector", vec_file, "level-1 or L2 element file");
  check->add_option("--matrix", mat_file, "matrix level or block file");
  check->add_option("--level", level, "expected matrix level");
  check->add_option("--n", hs_n, "expected block size");

  auto* demo = app.add_subcommand("demo", "re-derive the reference numbers");
  demo->fallthrough();
  std::string demo_name;
  demo->add_option("name", demo_name, "demo name")->required();

  auto* pietsch = app.add_subcommand("pietsch", "factorization report");
  pietsch->fallthrough();
  std::string pietsch_map;
  int samples = 1000;
  pietsch->add_option("--map", pietsch_map, "atom map JSON file");
  pietsch->add_option("--samples", samples, "test functions for the bounds");

  auto* hs = app.add_subcommand("hs", "Hilbert-Schmidt cone report");
  hs->fallthrough();
  std::string hs_file;
  int hs_size = 0;
  hs->add_option("--matrix", hs_file, "matrix JSON file");
  hs->add_option("--n", hs_size, "expected block size");

  auto* eb = app.add_subcommand("eb", "entanglement-breaking cross check");
  eb->fallthrough();
  std::string eb_file;
  eb->add_option("--map", eb_file, "block map JSON file");

  auto* states = app.add_subcommand("states", "unital measure utilities");
  states->fallthrough();
  states->require_subcommand(1);
  int atom = 0;
  auto* st_check = states->add_subcommand("check", "validate a measure");
  st_check->fallthrough();
  auto* st_mass = states->add_subcommand("mass", "mass bounds at an atom");
  st_mass->fallthrough();
  st_mass->add_option("--atom", atom, "atom index");
  auto* st_complete =
      states->add_subcommand("complete", "concentration completion");
  st_complete->fallthrough();
  auto* st_project =
      states->add_subcommand("project", "expectation onto the embedded copy");
  st_project->fallthrough();
  auto* st_factor =
      states->add_subcommand("factor", "factor a positive map through L2");
  st_factor->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed())
      return run_check(opt, cone, vec_file, mat_file, level, hs_n);
    if (demo->parsed()) return run_demo(opt, demo_name);
    if (pietsch->parsed()) return run_pietsch(opt, pietsch_map, samples);
    if (hs->parsed()) return run_hs(opt, hs_file, hs_size);
    if (eb->parsed()) return run_eb(opt, eb_file);
    if (states->parsed()) {
      std::string action;
      if (st_check->parsed()) action = "check";
      else if (st_mass->parsed()) action = "mass";
      else if (st_complete->parsed()) action = "complete";
      else if (st_project->parsed()) action = "project";
      else if (st_factor->parsed()) action = "factor";
      return run_states(opt, action, atom);
    }
  } catch (const ClaimFail& f) {
    std::cerr << "opcone: " << f.message << "\n";
    return kExitClaim;
  } catch (const std::exception& e) {
    std::cerr << "opcone: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
