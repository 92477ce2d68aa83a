// Command line front end: group validation and export, kernel evaluation,
// geodesic chart queries, the exact constant curve, and the verification
// suites. Exit codes: 0 success, 1 usage or validation error, 2 a numeric
// check failed or quadrature gave up.
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "htype/io.hpp"
#include "htype/verification.hpp"

using namespace htype;

namespace {

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size())
      throw std::invalid_argument("not a number: '" + item + "'");
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

Point parse_point(const HTypeGroup& G, const std::string& text) {
  std::vector<double> v = parse_csv_doubles(text);
  const int nx = G.horizontal_dim(), nz = G.center_dim();
  if (static_cast<int>(v.size()) != nx + nz)
    throw std::invalid_argument("point needs " + std::to_string(nx + nz) +
                                " comma-separated coordinates");
  return {to_vec({v.begin(), v.begin() + nx}), to_vec({v.begin() + nx, v.end()})};
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

struct VerifyOutcome {
  nlohmann::json json;
  bool ok = true;

  void add_report(const EstimateReport& r, bool pass) {
    json["reports"].push_back(report_to_json(r));
    ok = ok && pass;
  }
};

void run_envelope(VerifyOutcome& out, const KernelEvaluator& E) {
  EstimateReport r = check_p1_estimate(E);
  std::printf("%-28s min=%.6g max=%.6g points=%d %s\n", r.estimate_id.c_str(), r.min_ratio,
              r.max_ratio, r.n_points, r.passing() ? "ok" : "FAIL");
  out.add_report(r, r.passing());
}

void run_gradients(VerifyOutcome& out, const KernelEvaluator& E) {
  for (const EstimateReport& r : check_gradient_estimates(E)) {
    std::printf("%-28s min=%.6g max=%.6g points=%d %s\n", r.estimate_id.c_str(), r.min_ratio,
                r.max_ratio, r.n_points, r.passing() ? "ok" : "FAIL");
    out.add_report(r, r.passing());
  }
}

void run_jacobian(VerifyOutcome& out, const HTypeGroup& G) {
  EstimateReport r = check_A_asymptotics(G);
  std::printf("%-28s min=%.6g max=%.6g points=%d %s\n", r.estimate_id.c_str(), r.min_ratio,
              r.max_ratio, r.n_points, r.passing() ? "ok" : "FAIL");
  out.add_report(r, r.passing());
}

void run_lemma(VerifyOutcome& out, const KernelEvaluator& E) {
  for (double q : {0.0, 2.0}) {
    EstimateReport r = check_geodesic_integral_lemma(E, q);
    std::printf("%-28s min=%.6g max=%.6g points=%d %s\n", r.estimate_id.c_str(), r.min_ratio,
                r.max_ratio, r.n_points, r.passing() ? "ok" : "FAIL");
    out.add_report(r, r.passing());
  }
}

void run_calculus(VerifyOutcome& out, const KernelEvaluator& E, std::uint64_t seed) {
  TestFunctionFamily fam = make_polynomial_family(E.group(), 3, seed);
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const double comm = check_commutation(E, fam.members[i], 1.0);
    ByPartsResiduals bp = check_integration_by_parts(E, fam.members[i]);
    const bool pass = comm <= 1e-4 && bp.left <= 1e-4 && bp.right <= 1e-4;
    ok = ok && pass;
    std::printf("calculus %-18s commutation=%.3g byparts=(%.3g, %.3g) %s\n",
                fam.names[i].c_str(), comm, bp.left, bp.right, pass ? "ok" : "FAIL");
    rows.push_back({{"name", fam.names[i]},
                    {"commutation", comm},
                    {"byparts_left", bp.left},
                    {"byparts_right", bp.right}});
  }
  const double proj = check_projection_identity(E, 1.0, 50, seed);
  const bool proj_ok = proj <= 1e-8;
  ok = ok && proj_ok;
  std::printf("calculus projection residual=%.3g %s\n", proj, proj_ok ? "ok" : "FAIL");
  out.json["calculus"] = {{"fields", rows}, {"projection", proj}};
  out.ok = out.ok && ok;
}

void run_scan(VerifyOutcome& out, const KernelEvaluator& E, double t, int n_random,
              std::uint64_t seed) {
  TestFunctionFamily fam = make_polynomial_family(E.group(), n_random, seed);
  std::vector<ScanRow> rows;
  EstimateReport r = scan_gradient_inequality(E, fam, t, &rows);
  for (const ScanRow& row : rows)
    std::printf("scan %-22s ratio=%.9g intermediate=%.3g\n", row.name.c_str(), row.ratio,
                row.intermediate);
  // min 0 is expected (purely central fields); the scan passes when every
  // member evaluated and the largest ratio is finite
  const bool pass = r.failures.empty() && std::isfinite(r.max_ratio);
  std::printf("%-28s max=%.9g over %d fields at t=%.17g %s\n", r.estimate_id.c_str(), r.max_ratio,
              r.n_points, t, pass ? "ok" : "FAIL");
  out.json["scan_rows"] = scan_rows_to_json(rows);
  out.add_report(r, pass);
}

void run_constants(VerifyOutcome& out, const HTypeGroup& G) {
  OptimalConstantResult r = optimal_constant_experiment(G);
  std::printf("largest ratio on the quadratic family: t=%s value=%s lower bound=%.17g\n",
              to_string(r.t_max).c_str(), to_string(r.k2_max).c_str(), r.lower_bound);
  out.json["constants"] = {{"t_max", to_string(r.t_max)},
                           {"k2_max", to_string(r.k2_max)},
                           {"lower_bound", r.lower_bound}};
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("HTYPE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{
      "Heisenberg-type group calculator: heat kernel quadrature, geodesic "
      "charts, exact polynomial semigroup and verification scans"};
  app.require_subcommand(1);

  std::string group_spec = "heisenberg:1";
  app.add_option("--group", group_spec,
                 "group spec: heisenberg:n, quaternionic:k, or a JSON file path")
      ->capture_default_str();

  int sphere_degree = 9;
  app.add_option("--sphere-degree", sphere_degree,
                 "angular rule exactness degree for convolutions (3, 5, 7 or 9)");

  // group
  CLI::App* group = app.add_subcommand("group", "validate or export a group");
  CLI::App* g_validate = group->add_subcommand("validate", "run the structure axioms");
  std::string g_out;
  CLI::App* g_export = group->add_subcommand("export", "write the group as JSON");
  g_export->add_option("--out", g_out, "output path (default stdout)");

  // kernel
  CLI::App* kernel = app.add_subcommand("kernel", "heat kernel evaluation");
  double k_t = 1.0;
  std::string k_x = "0", k_z = "0";
  CLI::App* k_eval = kernel->add_subcommand("eval", "p_t at a point");
  k_eval->add_option("--t", k_t, "time")->capture_default_str();
  k_eval->add_option("--x", k_x, "horizontal coordinates, comma separated");
  k_eval->add_option("--z", k_z, "central coordinates, comma separated");
  double m_t = 1.0;
  CLI::App* k_mass = kernel->add_subcommand("mass", "integrate p_t over the group");
  k_mass->add_option("--t", m_t, "time")->capture_default_str();
  double gr_t = 1.0, gr_rmax = 4.0, gr_zmax = 2.0;
  int gr_n = 25;
  std::string gr_out;
  CLI::App* k_grid = kernel->add_subcommand("grid", "CSV of p_t over (|x|, |z|)");
  k_grid->add_option("--t", gr_t, "time")->capture_default_str();
  k_grid->add_option("--r-max", gr_rmax, "largest |x|")->capture_default_str();
  k_grid->add_option("--z-max", gr_zmax, "largest |z|")->capture_default_str();
  k_grid->add_option("--n", gr_n, "grid points per axis")->capture_default_str();
  k_grid->add_option("--out", gr_out, "output path (default stdout)");

  // geodesy
  CLI::App* geo = app.add_subcommand("geodesy", "geodesic distance and chart maps");
  std::string d_point;
  CLI::App* g_dist = geo->add_subcommand("dist", "distance from the identity");
  g_dist->add_option("--point", d_point, "2n+m coordinates, comma separated")->required();
  std::string p_u, p_eta;
  CLI::App* g_phi = geo->add_subcommand("phi", "chart point from (u, eta)");
  g_phi->add_option("--u", p_u, "horizontal chart coordinates")->required();
  g_phi->add_option("--eta", p_eta, "central chart coordinates")->required();
  std::string pi_point;
  CLI::App* g_phinv = geo->add_subcommand("phi-inv", "chart coordinates of a point");
  g_phinv->add_option("--point", pi_point, "2n+m coordinates, comma separated")->required();
  double j_r = 1.0, j_rho = 1.0;
  CLI::App* g_jac = geo->add_subcommand("jacobian", "chart measure density A(r, rho)");
  g_jac->add_option("--r", j_r, "radial coordinate |u|")->required();
  g_jac->add_option("--rho", j_rho, "angular coordinate |eta| in (0, 2 pi)")->required();

  // poly
  CLI::App* poly = app.add_subcommand("poly", "exact polynomial semigroup");
  std::string k2_t = "1/3";
  CLI::App* p_k2 = poly->add_subcommand(
      "k2", "exact ratio |grad P_t f(0)|^2 / P_t(|grad f|^2)(0) for f = x1 + z1 x2");
  p_k2->add_option("--t", k2_t, "time as an exact rational, e.g. 1/3")->capture_default_str();

  // verify
  CLI::App* verify = app.add_subcommand("verify", "numerical verification suites");
  std::string v_check = "all";
  verify
      ->add_option("--check", v_check,
                   "envelope | gradients | jacobian | lemma | calculus | scan | constants | all")
      ->capture_default_str();
  double v_t = 1.0;
  verify->add_option("--t", v_t, "time for the gradient inequality scan")->capture_default_str();
  int v_random = 10;
  verify->add_option("--n-random", v_random, "random fields in the scan family")
      ->capture_default_str();
  std::uint64_t v_seed = 12345;
  verify->add_option("--seed", v_seed, "family and sample seed")->capture_default_str();
  std::string v_out;
  verify->add_option("--out", v_out, "write all results as JSON");

  // global options may follow the subcommand name
  for (CLI::App* s : {group, g_validate, g_export, kernel, k_eval, k_mass, k_grid, geo, g_dist,
                      g_phi, g_phinv, g_jac, poly, p_k2, verify})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // collapse parser codes: success or usage error
  }

  try {
    HTypeGroup G = group_from_spec(group_spec);
    QuadratureConfig cfg;
    cfg.sphere_rule_degree = sphere_degree;

    if (g_validate->parsed()) {
      std::printf("ok\n");
      return 0;
    }
    if (g_export->parsed()) {
      nlohmann::json j = group_to_json(G);
      if (g_out.empty())
        std::printf("%s\n", j.dump(2).c_str());
      else
        write_json(j, g_out);
      return 0;
    }
    if (k_eval->parsed()) {
      KernelEvaluator E(G, cfg);
      Vec x = to_vec(parse_csv_doubles(k_x)), z = to_vec(parse_csv_doubles(k_z));
      std::printf("%.17g\n", E.kernel(k_t, G.point(x, z)));
      return 0;
    }
    if (k_mass->parsed()) {
      KernelEvaluator E(G, cfg);
      const double mass = E.total_mass(m_t);
      std::printf("%.17g\n", mass);
      return std::isfinite(mass) ? 0 : 2;
    }
    if (k_grid->parsed()) {
      KernelEvaluator E(G, cfg);
      std::ostringstream csv;
      csv << "r,zeta,p\n";
      char line[96];
      for (int i = 0; i < gr_n; ++i)
        for (int j = 0; j < gr_n; ++j) {
          const double r = gr_rmax * i / (gr_n - 1.0), z = gr_zmax * j / (gr_n - 1.0);
          std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", r, z,
                        E.kernel_radial(gr_t, r, z));
          csv << line;
        }
      if (gr_out.empty()) {
        std::fputs(csv.str().c_str(), stdout);
      } else {
        std::ofstream out(gr_out);
        if (!out) throw std::invalid_argument("cannot open for writing: " + gr_out);
        out << csv.str();
      }
      return 0;
    }
    if (g_dist->parsed()) {
      std::printf("%.17g\n", cc_distance_from_identity(G, parse_point(G, d_point)));
      return 0;
    }
    if (g_phi->parsed()) {
      GeodesicCoords c{to_vec(parse_csv_doubles(p_u)), to_vec(parse_csv_doubles(p_eta))};
      Point g = phi(G, c);
      std::printf("x:");
      for (int i = 0; i < g.x.size(); ++i) std::printf(" %.17g", g.x[i]);
      std::printf("\nz:");
      for (int i = 0; i < g.z.size(); ++i) std::printf(" %.17g", g.z[i]);
      std::printf("\n");
      return 0;
    }
    if (g_phinv->parsed()) {
      GeodesicCoords c = phi_inverse(G, parse_point(G, pi_point));
      std::printf("u:");
      for (int i = 0; i < c.u.size(); ++i) std::printf(" %.17g", c.u[i]);
      std::printf("\neta:");
      for (int i = 0; i < c.eta.size(); ++i) std::printf(" %.17g", c.eta[i]);
      std::printf("\n");
      return 0;
    }
    if (g_jac->parsed()) {
      std::printf("%.17g\n", jacobian_A(G, j_r, j_rho));
      return 0;
    }
    if (p_k2->parsed()) {
      std::printf("%s\n", to_string(k2_ratio(G, parse_rational(k2_t))).c_str());
      return 0;
    }
    if (verify->parsed()) {
      KernelEvaluator E(G, cfg);
      VerifyOutcome out;
      out.json["group"] = group_spec;
      const bool all = v_check == "all";
      bool matched = false;
      if (all || v_check == "envelope") run_envelope(out, E), matched = true;
      if (all || v_check == "gradients") run_gradients(out, E), matched = true;
      if (all || v_check == "jacobian") run_jacobian(out, G), matched = true;
      if (all || v_check == "lemma") run_lemma(out, E), matched = true;
      if (all || v_check == "calculus") run_calculus(out, E, v_seed), matched = true;
      if (all || v_check == "scan") run_scan(out, E, v_t, v_random, v_seed), matched = true;
      if (all || v_check == "constants") run_constants(out, G), matched = true;
      if (!matched) throw std::invalid_argument("unknown check: " + v_check);
      write_json(out.json, v_out);
      std::printf("verify: %s\n", out.ok ? "all checks ok" : "CHECKS FAILED");
      return out.ok ? 0 : 2;
    }
    std::fprintf(stderr, "no action selected; see --help\n");
    return 1;
  } catch (const QuadratureFailure& e) {
    std::fprintf(stderr, "quadrature failure: %s\n", e.what());
    return 2;
  } catch (const DegenerateDenominator& e) {
    std::fprintf(stderr, "degenerate input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
