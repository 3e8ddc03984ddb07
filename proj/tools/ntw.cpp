// SPDX-License-Identifier: Apache-2.0
//
// Batch verification front end: reads a JSON config describing one named
// check, runs it, and emits a canonical JSON report.
// Exit codes: 0 pass, 1 check failed, 2 invalid input, 3 numerical domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "ntwistor/gauss.hpp"
#include "ntwistor/report.hpp"

using nlohmann::json;
using namespace ntw;

namespace {

struct Config {
  json j;
  int m = 2;
  int n = 1;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int samples = 100;
  Box box;
};

Expr get_expr(const Config& c, const std::string& key, const std::string& fallback = "0") {
  if (c.j.contains("exprs") && c.j["exprs"].contains(key))
    return parse_expr(c.j["exprs"][key].get<std::string>(), c.m);
  return parse_expr(fallback, c.m);
}

Eigen::MatrixXd get_matrix(const json& v) {
  int rows = static_cast<int>(v.size());
  int cols = rows ? static_cast<int>(v[0].size()) : 0;
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(v[i].size()) != cols) throw std::invalid_argument("ragged matrix literal");
    for (int j = 0; j < cols; ++j) out(i, j) = v[i][j].get<double>();
  }
  return out;
}

int sign_of(const json& v, const char* what) {
  std::string s = v.get<std::string>();
  if (s == "+" || s == "+1") return +1;
  if (s == "-" || s == "-1") return -1;
  throw std::invalid_argument(std::string(what) + " must be \"+\" or \"-\"");
}

/// "omega": {"21": ["x2", "0"], ...} -- 1-based entry indices, one coefficient
/// string per coordinate.
MatrixForm raw_omega(const Config& c) {
  MatrixForm w(4 * c.n, 4 * c.n, c.m, 1);
  for (const auto& [key, val] : c.j.at("omega").items()) {
    if (key.size() != 2) throw std::invalid_argument("omega keys are two digits, e.g. \"21\"");
    int i = key[0] - '0', j = key[1] - '0';
    std::vector<Expr> coeffs;
    for (const auto& s : val) coeffs.push_back(parse_expr(s.get<std::string>(), c.m));
    entry1(w, i, j) = Form::one_form(c.m, coeffs);
  }
  return w;
}

FlatFamilySpec family_spec(const Config& c) {
  FlatFamilySpec spec;
  std::string fam = c.j.at("family").get<std::string>();
  spec.m = c.m;
  spec.n = c.n;
  spec.f = get_expr(c, "f", "x1");
  if (fam == "SymmetricPotential") {
    spec.variant = FlatFamilySpec::Variant::SymmetricPotential;
    spec.phi = get_expr(c, "phi", "x1");
    spec.c0 = get_matrix(c.j.at("matrices").at("C0"));
  } else if (fam == "SkewPotential") {
    spec.variant = FlatFamilySpec::Variant::SkewPotential;
    spec.psi = get_expr(c, "psi", "x1");
    spec.c0 = get_matrix(c.j.at("matrices").at("C0"));
  } else if (fam == "Tridiagonal") {
    spec.variant = FlatFamilySpec::Variant::Tridiagonal;
    spec.f1 = get_expr(c, "f1", "x1");
    spec.f2 = get_expr(c, "f2", "x2");
  } else if (fam == "QuaternionBlocks") {
    spec.variant = FlatFamilySpec::Variant::QuaternionBlocks;
    spec.p = c.j.value("p", 1);
    spec.qa1 = get_expr(c, "a1", "x1");
    spec.qb1 = get_expr(c, "b1", "x2");
    spec.qa2 = get_expr(c, "a2", "0");
    spec.qb2 = get_expr(c, "b2", "0");
  } else {
    throw std::invalid_argument("unknown family: " + fam);
  }
  return spec;
}

PairSpec pair_spec(const Config& c) {
  PairSpec spec;
  spec.m = c.m;
  spec.fp = get_expr(c, "fp");
  spec.fm = get_expr(c, "fm");
  spec.gp = get_expr(c, "gp", "x1");
  spec.gm = get_expr(c, "gm", "x1");
  spec.branch = c.j.value("branch", std::string("A"))[0];
  spec.mu = c.j.contains("mu") ? sign_of(c.j["mu"], "mu") : +1;
  return spec;
}

/// Connection form from any of the accepted sources.
MatrixForm omega_from(const Config& c, const std::vector<Point>& pts) {
  if (c.j.contains("omega")) return raw_omega(c);
  if (c.j.contains("family")) return family_omega(family_spec(c), pts, c.tol).omega;
  return pair_omega(pair_spec(c), pts, c.tol);
}

// ---------------------------------------------------------------------------

VerificationReport run_so_check(const Config& c, const std::vector<Point>&) {
  Eigen::MatrixXd a = get_matrix(c.j.at("matrix"));
  if (a.rows() != 4 * c.n) throw std::invalid_argument("matrix must be 4n x 4n");
  VerificationReport rep;
  Eigen::MatrixXd g = neutral_gram(c.n);
  rep.add("metric", (a.transpose() * g * a - g).cwiseAbs().maxCoeff(), 1, c.tol);
  rep.add("determinant", std::fabs(a.determinant() - 1.0), 1, c.tol);
  if (preserves_w(a, c.n, c.tol)) {
    auto p23 = prop23_verify(a, c.n, c.tol);
    rep.add("detP-detPx-product", p23.product_residual, 1, c.tol);
  }
  return rep;
}

VerificationReport run_group_sample(const Config& c, const std::vector<Point>&) {
  GroupKind kind = group_kind_from_string(c.j.value("kind", std::string("G1")));
  int count = c.j.value("count", 20);
  Rng rng(c.seed);
  double so_res = 0, w_res = 0, ppx = 0, detp = 0;
  for (int i = 0; i < count; ++i) {
    Eigen::MatrixXd a = sample_group_random(kind, c.n, rng);
    so_res = std::max(so_res, so_member_residual(a, c.n));
    w_res = std::max(w_res, preserves_w_residual(a, c.n));
    auto p23 = prop23_verify(a, c.n, c.tol);
    ppx = std::max(ppx, p23.p_px_gap);
    detp = std::max(detp, p23.det_p_minus_1);
  }
  VerificationReport rep;
  rep.add("so-membership", so_res, count, c.tol);
  rep.add("preserves-W", w_res, count, c.tol);
  rep.add("P-equals-Px", ppx, count, c.tol);
  rep.add("detP-1", detp, count, c.tol);
  return rep;
}

VerificationReport run_structure_check(const Config& c, const std::vector<Point>& pts) {
  VerificationReport rep;
  int count = c.j.value("count", 25);
  Eigen::MatrixXd lam = lambda_matrix(c.n);
  rep.add("lambda-squared", (lam * lam).cwiseAbs().maxCoeff(), 1, 0.0);

  Eigen::MatrixXd g = neutral_gram(c.n);
  Rng rng(c.seed);
  double nil_res = 0, para_res = 0, bridge_res = 0, inv_res = 0;
  for (int i = 0; i < count; ++i) {
    Eigen::MatrixXd e = so_random(c.n, rng.next_u64());
    FrameField frame = FrameField::constant(e, c.n, c.m);
    int eps = rng.uniform() < 0.5 ? +1 : -1;
    NilpotentStructure nst = nilpotent_from_frame(frame, eps);
    Eigen::MatrixXd nv = nst.eval(pts.front());
    nil_res = std::max(nil_res, (nv * nv).cwiseAbs().maxCoeff());
    nil_res = std::max(nil_res, (nv.transpose() * g + g * nv).cwiseAbs().maxCoeff());
    ParacomplexStructure par = paracomplex_from_frame(frame, eps);
    Eigen::MatrixXd jv = par.eval(pts.front());
    para_res = std::max(para_res, (jv * jv - Eigen::MatrixXd::Identity(4 * c.n, 4 * c.n)).cwiseAbs().maxCoeff());
    para_res = std::max(para_res, (jv.transpose() * g * jv + g).cwiseAbs().maxCoeff());
    if (c.n == 1) {
      Bivector b = nilpotent_to_bivector(nst);
      NilpotentStructure back = bivector_to_nilpotent(canonical_lightlike(eps), frame, eps, c.tol);
      bridge_res = std::max(bridge_res, (back.eval(pts.front()) - nv).cwiseAbs().maxCoeff());
      bridge_res = std::max(bridge_res, std::fabs(hhat(b, b)));
    }
    // invariance of the induced 2n-vector under an admissible change
    Eigen::MatrixXd h = sample_group_random(GroupKind::H, c.n, rng);
    NilpotentStructure nst2 = nilpotent_from_frame(FrameField::constant(e * h, c.n, c.m), eps);
    if (eps == +1)
      inv_res = std::max(inv_res, (induced_2nvector(nst, pts.front()) -
                                   induced_2nvector(nst2, pts.front())).cwiseAbs().maxCoeff());
  }
  rep.add("nilpotent-invariants", nil_res, count, 1e-10);
  rep.add("paracomplex-invariants", para_res, count, 1e-10);
  if (c.n == 1) rep.add("bridge-roundtrip", bridge_res, count, 1e-10);
  rep.add("2nvector-invariance", inv_res, count, 1e-8);
  return rep;
}

VerificationReport run_factorize(const Config& c, const std::vector<Point>& pts) {
  MatrixForm w = omega_from(c, pts);
  int eps = c.j.contains("eps") ? sign_of(c.j["eps"], "eps") : +1;
  int mu = c.j.contains("mu") ? sign_of(c.j["mu"], "mu") : +1;
  FactorizationReport fr = factorization_check(w, c.n, eps, mu, pts, c.tol);
  VerificationReport rep;
  rep.add("compatibility", fr.compat_residual, static_cast<int>(pts.size()), c.tol);
  rep.add("condition-system", fr.eq_residual, static_cast<int>(pts.size()), c.tol);
  rep.add("tensor-residual", fr.tensor_residual, static_cast<int>(pts.size()), c.tol);
  return rep;
}

VerificationReport run_walker(const Config& c, const std::vector<Point>& pts) {
  MatrixForm w = omega_from(c, pts);
  MatrixForm gens(1, 1, c.m, 0);
  if (c.j.contains("generators")) {
    const json& gj = c.j["generators"];
    gens = MatrixForm(4 * c.n, 2 * c.n, c.m, 0);
    for (int i = 0; i < 4 * c.n; ++i)
      for (int j = 0; j < 2 * c.n; ++j)
        gens.at(i, j) = Form::scalar(c.m, parse_expr(gj.at(i).at(j).get<std::string>(), c.m));
  } else {
    int eps = c.j.contains("eps") ? sign_of(c.j["eps"], "eps") : +1;
    int mu = c.j.contains("mu") ? sign_of(c.j["mu"], "mu") : +1;
    gens = standard_walker_generators(c.n, eps, mu, c.m);
  }
  VerificationReport rep;
  rep.add("compatibility", compatibility_residual(w, c.n, pts), static_cast<int>(pts.size()), c.tol);
  rep.add("walker", walker_residual(w, gens, c.n, pts), static_cast<int>(pts.size()),
          std::max(c.tol, 1e-8));
  return rep;
}

VerificationReport run_norm(const Config& c, const std::vector<Point>& pts) {
  MatrixForm w = omega_from(c, pts);
  int eps = c.j.contains("eps") ? sign_of(c.j["eps"], "eps") : +1;
  double norm = square_norm(w, c.n, eps, pts);
  double oracle_gap = 0;
  for (const Point& p : pts)
    oracle_gap = std::max(oracle_gap, std::fabs(square_norm_at(w, c.n, eps, p) -
                                                square_norm_oracle_at(w, c.n, eps, p)));
  VerificationReport rep;
  rep.add("square-norm", norm, static_cast<int>(pts.size()), c.tol);
  rep.add("oracle-agreement", oracle_gap, static_cast<int>(pts.size()), 1e-10);
  return rep;
}

VerificationReport run_flat_gen(const Config& c, const std::vector<Point>& pts) {
  FlatConnection conn = family_omega(family_spec(c), pts, c.tol);
  VerificationReport rep;
  rep.add("flatness", flatness_residual(conn.omega, pts), static_cast<int>(pts.size()), c.tol);
  FactorizationReport fr = factorization_check(conn.omega, conn.n, +1, +1, pts, c.tol);
  rep.add("factorization", std::max(fr.eq_residual, fr.tensor_residual),
          static_cast<int>(pts.size()), c.tol);
  // alpha must equal df
  Form df(c.m, 1);
  for (int k = 1; k <= c.m; ++k) df.set_coeff({k}, conn.f.partial(k));
  double ar = 0;
  for (const Point& p : pts) ar = std::max(ar, (fr.alpha - df).max_abs_coeff(p));
  rep.add("alpha-equals-df", ar, static_cast<int>(pts.size()), c.tol);
  if (c.j.value("integrate", false)) {
    Point base(static_cast<std::size_t>(c.m), 0.0);
    std::vector<Point> targets(pts.begin(), pts.begin() + std::min<std::size_t>(pts.size(), 10));
    auto fi = frame_integrate(conn, base, Eigen::MatrixXd::Identity(4 * conn.n, 4 * conn.n),
                              targets, c.box, c.seed);
    rep.add("frame-orthonormality", fi.ortho_residual, static_cast<int>(targets.size()), 1e-7);
    rep.add("loop-closure", fi.loop_residual, 10, 1e-6);
    if (fi.fast_path)
      rep.add("exp-vs-integrator", fi.cross_residual, static_cast<int>(targets.size()), 1e-7);
  }
  return rep;
}

VerificationReport run_pair_gen(const Config& c, const std::vector<Point>& pts) {
  PairSpec spec = pair_spec(c);
  MatrixForm w = pair_omega(spec, pts, c.tol);
  VerificationReport rep;
  rep.add("flatness", flatness_residual(w, pts), static_cast<int>(pts.size()), c.tol);
  for (int eps : {+1, -1}) {
    std::string side = eps > 0 ? "+" : "-";
    FullyLightlikeReport flr = fully_lightlike_check(w, eps, pts, c.tol);
    rep.add("fully-lightlike " + side, flr.ok ? flr.lightlike_residual : 1.0,
            static_cast<int>(pts.size()), c.tol);
    if (!flr.ok) continue;
    PairSideExpectation exp_side = pair_expected_side(spec, eps);
    double mu_gap = flr.mu == exp_side.mu ? 0.0 : 1.0;
    rep.add("mu " + side, mu_gap, static_cast<int>(pts.size()), 0.5);
    double ar = 0;
    for (const Point& p : pts) ar = std::max(ar, (flr.alpha - exp_side.alpha).max_abs_coeff(p));
    rep.add("alpha " + side, ar, static_cast<int>(pts.size()), c.tol);
    rep.add("square-norm " + side, square_norm(w, 1, eps, pts), static_cast<int>(pts.size()),
            c.tol);
  }
  return rep;
}

VerificationReport run_classify(const Config& c, const std::vector<Point>& pts) {
  MatrixForm w = omega_from(c, pts);
  int mu = c.j.contains("mu") ? sign_of(c.j["mu"], "mu") : +1;
  BranchClass cls = branch_classify(w, mu, pts, c.tol);
  VerificationReport rep;
  double residual;
  if (c.j.contains("expect")) {
    std::string want = c.j["expect"].get<std::string>();
    residual = to_string(cls) == want || (to_string(cls) == "both" && (want == "A" || want == "B"))
                   ? 0.0 : 1.0;
  } else {
    residual = cls == BranchClass::Neither ? 1.0 : 0.0;
  }
  rep.add("branch=" + to_string(cls), residual, static_cast<int>(pts.size()), 0.5);
  return rep;
}

VerificationReport run_gauss_verify(const Config& c, const std::vector<Point>&) {
  const json& curves = c.j.at("curves");
  NullCurve a, b;
  for (int i = 0; i < 3; ++i) {
    a.comp[static_cast<std::size_t>(i)] = parse_expr(curves.at("A").at(i).get<std::string>(), 1);
    b.comp[static_cast<std::size_t>(i)] = parse_expr(curves.at("B").at(i).get<std::string>(), 1);
  }
  int samples = c.samples;
  TimelikeMinimalSurface s = surface_from_null_curves(a, b, c.box, samples, c.seed, 1e-8);
  SurfaceDiagnostics diag = surface_diagnostics(s, samples, c.seed + 1, 1e-8);
  std::vector<Point> mask = diag.mask_samples;
  if (static_cast<int>(mask.size()) > 50) mask.resize(50);

  VerificationReport rep;
  rep.add("conformality", diag.conformality_residual, samples, 1e-8);
  rep.add("minimality", diag.minimality_residual, samples, 1e-8);
  rep.add("normal", diag.normal_residual, samples, 1e-8);
  rep.add("gauss-equation", diag.gauss_equation_residual, samples, 1e-6);

  SphereMap map = conformal_gauss(s);
  ShapeOpsReport so = shape_ops(map, s, mask);
  rep.add("A-iota", so.a_iota_residual, static_cast<int>(mask.size()), 1e-6);
  rep.add("A-nu", so.a_nu_max, static_cast<int>(mask.size()), 1e-6);
  rep.add("nu-constant-direction", so.nu_direction_residual, static_cast<int>(mask.size()), 1e-6);

  GaussFrame frame = gauss_frame_and_omega(map, s, mask, 1e-5);
  VerifyLiftsReport vl = verify_lifts(frame, mask, 1e-5);
  for (const auto& st : vl.stages)
    rep.add(st.name, st.residual, static_cast<int>(mask.size()), st.ok ? std::max(st.residual, 1e-5) : 1e-5);
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neutral-geometry verification runner"};
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> tol_override;
  app.add_option("--config", config_path, "JSON config path")->required();
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--seed", seed_override, "seed override");
  app.add_option("--tol", tol_override, "tolerance override");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config: " << config_path << "\n";
      return 2;
    }
    Config c;
    try {
      c.j = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return 2;
    }
    c.m = c.j.value("m", 2);
    c.n = c.j.value("n", 1);
    c.seed = seed_override.value_or(c.j.value("seed", 1));
    c.tol = tol_override.value_or(c.j.value("tol", 1e-9));
    c.samples = c.j.value("samples", 100);
    if (c.j.contains("box")) {
      std::vector<double> lo = c.j["box"]["lo"].get<std::vector<double>>();
      std::vector<double> hi = c.j["box"]["hi"].get<std::vector<double>>();
      c.box = Box(lo, hi);
    } else {
      c.box = Box::unit(c.m);
    }
    std::vector<Point> pts = c.box.sample(c.samples, c.seed);

    std::string cmd = c.j.at("command").get<std::string>();
    VerificationReport rep;
    if (cmd == "so-check") rep = run_so_check(c, pts);
    else if (cmd == "group-sample") rep = run_group_sample(c, pts);
    else if (cmd == "structure-check") rep = run_structure_check(c, pts);
    else if (cmd == "factorize") rep = run_factorize(c, pts);
    else if (cmd == "walker-check") rep = run_walker(c, pts);
    else if (cmd == "norm") rep = run_norm(c, pts);
    else if (cmd == "flat-gen") rep = run_flat_gen(c, pts);
    else if (cmd == "pair-gen") rep = run_pair_gen(c, pts);
    else if (cmd == "classify") rep = run_classify(c, pts);
    else if (cmd == "gauss-verify") rep = run_gauss_verify(c, pts);
    else {
      std::cerr << "unknown command: " << cmd << "\n";
      return 2;
    }
    rep.command = cmd;
    rep.seed = c.seed;
    rep.box = c.box;
    rep.tol = c.tol;

    std::string bytes = emit(rep);
    if (out_path.empty()) {
      std::cout << bytes;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      out << bytes;
    }
    return rep.pass() ? 0 : 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
