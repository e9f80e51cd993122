// whgrav: factorize, deform, combine and verify diagonal monodromy solutions.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error,
// 3 precondition violation (contour, group or domain).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "recipe.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/currents.hpp"
#include "whgrav/error.hpp"
#include "whgrav/factorize.hpp"
#include "whgrav/metric.hpp"
#include "whgrav/monodromy.hpp"
#include "whgrav/spectral.hpp"
#include "whgrav/verify.hpp"

using nlohmann::json;
using namespace whgrav;
using namespace whgrav::cli;

namespace {

struct Options {
  std::string preset;
  std::string config;
  std::string contour;
  std::string grid;
  std::string backend;
  std::optional<int> nodes;
  std::optional<double> tol;
  std::string out;

  std::optional<double> k, a, b, c;
  std::optional<int> n_power, lambda;

  std::string omega;
  std::optional<int> mult;
  std::string deformation;

  std::optional<double> step;
  bool no_refine = false;
  std::optional<double> perturb_m;
  std::string fd_mode;

  std::string base;
  std::optional<double> psi0;
  int sigma = 1;
  int epsilon = -1;
  bool line_element = false;

  std::string current_omega = "0.2,1.0";

  std::vector<std::string> files;
  std::string example;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

json json_or_file(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(text);
}

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "expected a number, got '" + item + "'");
    }
  }
  return out;
}

// "RMIN:RMAX:NR,VMIN:VMAX:NV", "RHO,V" or JSON.
Grid parse_grid(const std::string& text) {
  if (!text.empty() && text.front() == '{') return Grid::from_json(json_or_file(text));
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::Config, "grid: expected 'RHO-AXIS,V-AXIS'");
  auto axis = [](const std::string& s, double& lo, double& hi, int& n) {
    const auto v = split_numbers(s, ':');
    if (v.size() == 1) {
      lo = hi = v[0];
      n = 1;
    } else if (v.size() == 3 && v[2] == std::floor(v[2])) {
      lo = v[0];
      hi = v[1];
      n = static_cast<int>(v[2]);
    } else {
      throw Error(ErrorKind::Config, "grid axis '" + s + "': expected MIN:MAX:COUNT or a single value");
    }
  };
  Grid g;
  axis(text.substr(0, comma), g.rho_min, g.rho_max, g.n_rho);
  axis(text.substr(comma + 1), g.v_min, g.v_max, g.n_v);
  g.validate();
  return g;
}

Complex parse_complex(const std::string& text) {
  const auto v = split_numbers(text, ',');
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw Error(ErrorKind::Config, "expected RE or RE,IM, got '" + text + "'");
}

// Effective configuration: --config document overlaid with flags.
struct Run {
  json config = json::object();
  Options opt;

  std::string preset() const {
    if (!opt.preset.empty()) return opt.preset;
    return config.value("preset", std::string());
  }

  json params() const {
    json p = config.value("params", json::object());
    if (opt.k) p["k"] = *opt.k;
    if (opt.a) p["a"] = *opt.a;
    if (opt.b) p["b"] = *opt.b;
    if (opt.c) p["c"] = *opt.c;
    if (opt.n_power) p["N"] = *opt.n_power;
    if (opt.lambda) p["lambda"] = *opt.lambda;
    return p;
  }

  DiagonalMonodromy monodromy() const {
    if (!preset().empty()) return whgrav::preset(preset(), params());
    if (config.contains("monodromy")) return parse_monodromy(config["monodromy"]);
    throw Error(ErrorKind::Config, "no monodromy: give --preset or a config with 'preset' or 'monodromy'");
  }

  Grid grid(const Grid& fallback) const {
    if (!opt.grid.empty()) return parse_grid(opt.grid);
    if (config.contains("grid")) return Grid::from_json(config["grid"]);
    return fallback;
  }

  double tolerance(double fallback) const {
    const double t = opt.tol ? *opt.tol : config.value("tol", fallback);
    if (!(t > 0.0)) throw Error(ErrorKind::Config, "tolerance must be positive", {{"tol", t}});
    return t;
  }

  std::string backend() const {
    if (!opt.backend.empty()) return opt.backend;
    return config.value("backend", std::string("auto"));
  }

  json contour_descriptor(const DiagonalMonodromy& mono, const Grid& grid) const {
    json spec = opt.contour.empty() ? config.value("contour", json("circle")) : json(opt.contour);
    // 0 means unset.
    const int nodes = opt.nodes ? *opt.nodes : config.value("nodes", 0);
    if (nodes != 0 && nodes < 8) throw Error(ErrorKind::Config, "--nodes must be at least 8");
    if (spec.is_object()) {
      auto c = Contour::from_json(spec);
      if (nodes != 0) c = c->with_node_count(nodes);
      return c->descriptor();
    }
    const auto name = spec.get<std::string>();
    if (name == "circle") return unit_circle(mono.lambda, nodes != 0 ? nodes : kDefaultNodeCount)->descriptor();
    if (name == "tau-a-inside" || name == "tau-tilde-inside") {
      const auto p = params();
      if (!p.contains("a")) throw Error(ErrorKind::Config, "contour " + name + " needs the preset parameter a");
      const WeylPoint at = grid.point(0);
      const auto roots = spectral_roots(p["a"].get<double>(), at, mono.lambda);
      Complex tau_a = roots.phi, tau_tilde = roots.phi_tilde;
      if (std::abs(tau_a) < std::abs(tau_tilde)) std::swap(tau_a, tau_tilde);
      const std::vector<Complex> in{name == "tau-a-inside" ? tau_a : tau_tilde};
      const std::vector<Complex> out{name == "tau-a-inside" ? tau_tilde : tau_a};
      return enclosing_contour(in, out, mono.lambda, nodes != 0 ? nodes : 512)->descriptor();
    }
    return Contour::from_json(json_or_file(name))->descriptor();
  }

  std::optional<json> deformation() const {
    if (!opt.deformation.empty()) return json_or_file(opt.deformation);
    if (!opt.omega.empty()) {
      Complex w;
      if (opt.omega == "a") {
        const auto p = params();
        if (!p.contains("a")) throw Error(ErrorKind::Config, "--omega a needs the preset parameter a");
        w = p["a"].get<double>();
      } else {
        w = parse_complex(opt.omega);
      }
      return DeformationSpec::unimodular(w, opt.mult.value_or(1)).to_json();
    }
    if (config.contains("deformation")) return std::optional<json>(config["deformation"]);
    return std::nullopt;
  }

  json recipe(const Grid& grid) const {
    const auto mono = monodromy();
    json r{{"op", "solve"},
           {"monodromy", to_json(mono)},
           {"contour", contour_descriptor(mono, grid)},
           {"backend", std::string(to_string(backend_from_string(backend())))}};
    if (auto d = deformation()) r = {{"op", "deform"}, {"base", r}, {"deformation", *d}};
    return r;
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::Config, "cannot write '" + out + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

void print_solution_table(const json& doc) {
  std::cout << "rho,v";
  const auto& sols = doc["solutions"];
  const std::size_t channels = sols.empty() ? 0 : sols[0]["channels"].size();
  for (std::size_t j = 0; j < channels; ++j) std::cout << ",re_M" << j << ",im_M" << j;
  std::cout << "\n";
  for (const auto& s : sols) {
    std::cout << fmt(s["point"]["rho"].get<double>()) << "," << fmt(s["point"]["v"].get<double>());
    for (const auto& ch : s["channels"]) {
      const auto m = complex_from_json(ch["M"]);
      std::cout << "," << fmt(m.real()) << "," << fmt(m.imag());
    }
    std::cout << "\n";
  }
}

const Grid kPointGrid{1.0, 1.0, 0.0, 0.0, 1, 1};
const Grid kVerifyGrid{0.5, 1.5, -1.0, 1.0, 5, 5};

int cmd_factorize(const Run& run) {
  const Grid grid = run.grid(kPointGrid);
  ContourRegistry reg;
  const auto recipe = run.recipe(grid);
  const auto doc = solution_document(recipe, grid, family_from_recipe(recipe, reg));
  if (run.opt.out.empty()) {
    std::cout << dump(doc);
  } else {
    emit(run.opt.out, dump(doc));
    print_solution_table(doc);
  }
  return 0;
}

int write_solution(const Run& run, const json& recipe, const Grid& grid) {
  ContourRegistry reg;
  const auto doc = solution_document(recipe, grid, family_from_recipe(recipe, reg));
  emit(run.opt.out, dump(doc));
  if (!run.opt.out.empty()) print_solution_table(doc);
  return 0;
}

int cmd_deform(const Run& run) {
  if (!run.deformation()) throw Error(ErrorKind::Config, "deform needs --omega, --deformation or a config deformation");
  const Grid grid = run.grid(kPointGrid);
  return write_solution(run, run.recipe(grid), grid);
}

json load_solution(const std::string& path) {
  auto doc = read_json_file(path);
  if (!doc.contains("recipe") || !doc.contains("grid")) {
    throw Error(ErrorKind::Parse, path + ": not a solution document (missing recipe or grid)");
  }
  return doc;
}

std::vector<json> recipe_contours(const json& recipe) {
  if (recipe.contains("contour")) return {recipe["contour"]};
  std::vector<json> out;
  for (const char* key : {"base", "left", "right"}) {
    if (recipe.contains(key)) {
      for (auto& c : recipe_contours(recipe[key])) out.push_back(std::move(c));
    }
  }
  if (out.empty()) throw Error(ErrorKind::Parse, "recipe names no contour");
  return out;
}

int cmd_compose(const Run& run) {
  if (run.opt.files.size() < 2) throw Error(ErrorKind::Config, "compose needs at least two solution files");
  auto first = load_solution(run.opt.files[0]);
  const Grid grid = Grid::from_json(first["grid"]);
  json recipe = first["recipe"];
  for (std::size_t i = 1; i < run.opt.files.size(); ++i) {
    auto next = load_solution(run.opt.files[i]);
    const auto left = recipe_contours(recipe), right = recipe_contours(next["recipe"]);
    for (const auto& c : right) {
      if (c != left.front()) {
        throw Error(ErrorKind::ContourMismatch, "solutions live on different contours",
                    {{"left", left.front()}, {"right", c}});
      }
    }
    if (next["grid"] != first["grid"]) {
      throw Error(ErrorKind::Validation, "solutions are sampled on different grids",
                  {{"left", first["grid"]}, {"right", next["grid"]}});
    }
    recipe = {{"op", "compose"}, {"left", recipe}, {"right", next["recipe"]}};
  }
  return write_solution(run, recipe, grid);
}

int cmd_invert(const Run& run) {
  if (run.opt.files.size() != 1) throw Error(ErrorKind::Config, "invert needs exactly one solution file");
  auto doc = load_solution(run.opt.files[0]);
  return write_solution(run, {{"op", "invert"}, {"base", doc["recipe"]}}, Grid::from_json(doc["grid"]));
}

// Multiplies channel 0 of M by exp(ερ²): a field-equation violation for tests.
SolutionFamily perturbed(SolutionFamily family, double eps) {
  return [family = std::move(family), eps](const WeylPoint& p) {
    auto s = family(p);
    s.channels[0].log_m += eps * p.rho() * p.rho();
    s.channels[0].a_rho += 2.0 * eps * p.rho();
    return s;
  };
}

SolutionFamily run_family(const Run& run, const Grid& grid, json* recipe_out = nullptr) {
  static ContourRegistry reg;
  const auto recipe = run.recipe(grid);
  if (recipe_out) *recipe_out = recipe;
  auto fam = family_from_recipe(recipe, reg);
  if (run.opt.perturb_m) fam = perturbed(std::move(fam), *run.opt.perturb_m);
  return fam;
}

int cmd_verify(const Run& run) {
  const Grid grid = run.grid(kVerifyGrid);
  CheckOptions opt;
  opt.tolerance = run.tolerance(1e-6);
  opt.step = run.opt.step.value_or(kDefaultStencilStep);
  if (!(opt.step > 0.0)) throw Error(ErrorKind::Config, "--step must be positive");
  opt.refine = !run.opt.no_refine;
  if (run.opt.fd_mode == "fd") opt.mode = AMode::FiniteDifference;
  else if (!run.opt.fd_mode.empty() && run.opt.fd_mode != "analytic") {
    throw Error(ErrorKind::Config, "--a-mode must be analytic or fd");
  }
  json recipe;
  const auto fam = run_family(run, grid, &recipe);
  const auto reports = verify_suite(fam, grid, opt);
  const auto norm = normalization_and_symmetry_report(fam(grid.point(0)));

  bool ok = norm.passed();
  json doc{{"recipe", recipe}, {"checks", json::array()}, {"normalization", norm.to_json()}};
  std::cout << "check                 max_residual            tolerance  ratios             result\n";
  for (const auto& r : reports) {
    ok = ok && r.passed;
    doc["checks"].push_back(r.to_json());
    std::ostringstream ratios;
    for (std::size_t i = 0; i < r.refinement_ratios.size(); ++i) {
      ratios << (i ? "/" : "") << std::setprecision(4) << r.refinement_ratios[i];
    }
    std::cout << std::left << std::setw(22) << r.name << std::setw(24) << fmt(r.max_residual) << std::setw(11)
              << r.tolerance << std::setw(19) << (ratios.str().empty() ? "-" : ratios.str())
              << (r.passed ? "PASS" : "FAIL") << "\n";
  }
  std::cout << std::left << std::setw(22) << "normalization" << std::setw(24)
            << fmt(std::max({norm.x0_deviation, norm.factorization_residual, norm.symmetry_residual,
                             norm.determinant_deviation}))
            << std::setw(11) << norm.tolerance << std::setw(19) << "-" << (norm.passed() ? "PASS" : "FAIL")
            << "\n";
  doc["passed"] = ok;
  if (!run.opt.out.empty()) emit(run.opt.out, dump(doc));
  return ok ? 0 : 1;
}

int cmd_metric(const Run& run) {
  if (run.opt.line_element) {
    const auto p = run.params();
    if (run.preset() != "kasner") throw Error(ErrorKind::Config, "--line-element needs the kasner preset");
    int n = run.opt.mult.value_or(0);
    if (n == 0) {
      const int big_n = p.value("N", 0);
      if (big_n % 2 != 0) throw Error(ErrorKind::Config, "--line-element needs an even N (N = 2n)", {{"N", big_n}});
      n = big_n / 2;
    }
    emit(run.opt.out, dump(kasner_line_element(n)));
    return 0;
  }
  const Grid grid = run.grid(kVerifyGrid);
  const auto fam = run_family(run, grid);
  WeylPoint base = grid.point(0);
  if (!run.opt.base.empty()) {
    const auto v = split_numbers(run.opt.base, ',');
    if (v.size() != 2) throw Error(ErrorKind::Config, "--base expects RHO,V");
    base = WeylPoint(v[0], v[1]);
  }
  const auto lambda = run.monodromy().lambda;
  const auto data = assemble_metric(fam, grid, lambda, base, run.opt.psi0.value_or(0.0), run.opt.sigma, run.opt.epsilon);
  std::ostringstream csv;
  write_metric_csv(csv, data);
  emit(run.opt.out, csv.str());
  std::cerr << json{{"psi_path_residual", data.psi_path_residual}, {"base", {base.rho(), base.v()}}}.dump() << "\n";
  return 0;
}

int cmd_current(const Run& run) {
  const Grid grid = run.grid(Grid{0.5, 1.0, -0.5, 0.5, 21, 21});
  const auto fam = run_family(run, grid);
  const auto field = kac_moody_current(fam, grid, parse_complex(run.opt.current_omega),
                                       run.opt.step.value_or(kDefaultStencilStep));
  std::ostringstream csv;
  write_current_csv(csv, field);
  emit(run.opt.out, csv.str());
  double worst = 0.0;
  if (grid.n_rho >= 5 && grid.n_v >= 5) {
    for (double r : current_conservation_residual(field, run.monodromy().lambda)) worst = std::max(worst, r);
  }
  std::cerr << json{{"conservation_residual", worst}}.dump() << "\n";
  return 0;
}

json example_config(const std::string& name) {
  if (name == "einstein_rosen") {
    return {{"preset", "einstein_rosen"}, {"params", {{"k", 1}, {"a", 1}, {"b", 0.5 * std::exp(1.0)}}},
            {"contour", "circle"}, {"nodes", 256}, {"grid", {{"rho", {0.1, 5.0, 50}}, {"v", {-3.0, 3.0, 50}}}}};
  }
  if (name == "kasner") {
    return {{"preset", "kasner"}, {"params", {{"a", 3.56 / 3.2}, {"N", 4}}}, {"contour", "tau-a-inside"},
            {"grid", {{"rho", {1.0, 1.0, 1}}, {"v", {0.0, 0.0, 1}}}}};
  }
  if (name == "kasner_deformed") {
    return {{"preset", "kasner"}, {"params", {{"a", 3.0}, {"N", 4}}}, {"contour", "circle"},
            {"deformation", DeformationSpec::unimodular(3.0, 2).to_json()},
            {"grid", {{"rho", {0.5, 1.0, 11}}, {"v", {-0.5, 0.5, 11}}}}};
  }
  if (name == "pulse") {
    return {{"preset", "pulse"}, {"params", {{"a", 1.0}, {"b", 0.5}}}, {"contour", "circle"},
            {"grid", {{"rho", {0.5, 3.0, 11}}, {"v", {-2.0, 2.0, 11}}}}};
  }
  throw Error(ErrorKind::Config, "unknown example '" + name + "'",
              {{"available", {"einstein_rosen", "kasner", "kasner_deformed", "pulse"}}});
}

int cmd_example(const Run& run) {
  if (run.opt.example.empty()) {
    std::cout << "einstein_rosen\nkasner\nkasner_deformed\npulse\n";
    return 0;
  }
  emit(run.opt.out, dump(example_config(run.opt.example)));
  return 0;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parse:
    case ErrorKind::Validation: return 2;
    case ErrorKind::Verification: return 1;
    default: return 3;
  }
}

void add_source_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "einstein_rosen | kasner | pulse | constant");
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--contour", o.contour, "circle | tau-a-inside | tau-tilde-inside | JSON | file");
  cmd->add_option("--grid", o.grid, "RMIN:RMAX:NR,VMIN:VMAX:NV or RHO,V or JSON");
  cmd->add_option("--nodes", o.nodes, "contour quadrature nodes");
  cmd->add_option("--backend", o.backend, "auto | quadrature | partial_fraction | rational");
  cmd->add_option("--tol", o.tol, "tolerance");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--k", o.k);
  cmd->add_option("--a", o.a);
  cmd->add_option("--b", o.b);
  cmd->add_option("--c", o.c);
  cmd->add_option("--N", o.n_power);
  cmd->add_option("--lambda", o.lambda, "+1 or -1");
  cmd->add_option("--omega", o.omega, "deformation point: RE[,IM] or 'a'");
  cmd->add_option("--mult", o.mult, "deformation multiplicity");
  cmd->add_option("--deformation", o.deformation, "deformation JSON or file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener-Hopf factorization solutions of the reduced Einstein equations"};
  app.require_subcommand(1);
  Options o;

  auto* factorize = app.add_subcommand("factorize", "canonical factorization on a grid");
  add_source_options(factorize, o);
  auto* verify = app.add_subcommand("verify", "field equation, Lax pair and A-X checks");
  add_source_options(verify, o);
  verify->add_option("--step", o.step, "stencil step");
  verify->add_flag("--no-refine", o.no_refine, "skip the step-halving study");
  verify->add_option("--perturb-m", o.perturb_m, "multiply M_0 by exp(eps rho^2)");
  verify->add_option("--a-mode", o.fd_mode, "analytic | fd");
  auto* deform_cmd = app.add_subcommand("deform", "meromorphic deformation");
  add_source_options(deform_cmd, o);
  auto* compose = app.add_subcommand("compose", "channelwise product of solution files");
  compose->add_option("files", o.files)->required();
  compose->add_option("--out", o.out);
  auto* invert = app.add_subcommand("invert", "inverse of a solution file");
  invert->add_option("file", o.files)->required();
  invert->add_option("--out", o.out);
  auto* metric = app.add_subcommand("metric", "CSV of rho,v,delta,B,psi");
  add_source_options(metric, o);
  metric->add_option("--base", o.base, "RHO,V where psi = --psi0");
  metric->add_option("--psi0", o.psi0);
  metric->add_option("--sigma", o.sigma);
  metric->add_option("--epsilon", o.epsilon);
  metric->add_flag("--line-element", o.line_element, "Kasner line element descriptor");
  auto* current = app.add_subcommand("current", "Kac-Moody current CSV");
  add_source_options(current, o);
  current->add_option("--at", o.current_omega, "spectral point RE,IM");
  current->add_option("--step", o.step, "stencil step");
  auto* example = app.add_subcommand("example", "print an example configuration");
  example->add_option("name", o.example);
  example->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    Run run;
    run.opt = o;
    if (!o.config.empty()) run.config = read_json_file(o.config);
    const auto* sub = app.get_subcommands().front();
    const auto name = sub->get_name();
    if (name == "factorize") return cmd_factorize(run);
    if (name == "verify") return cmd_verify(run);
    if (name == "deform") return cmd_deform(run);
    if (name == "compose") return cmd_compose(run);
    if (name == "invert") return cmd_invert(run);
    if (name == "metric") return cmd_metric(run);
    if (name == "current") return cmd_current(run);
    if (name == "example") return cmd_example(run);
  } catch (const Error& e) {
    std::cerr << e.to_json().dump() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "parse"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
  return 2;
}
