#include "lcq_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lcq/errors.hpp"
#include "lcq/function_io.hpp"
#include "lcq/legendre.hpp"
#include "lcq/projection.hpp"
#include "lcq/quermass.hpp"

namespace lcq::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSchema = "lcq/1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string f, g, out;
  std::optional<std::size_t> dim;
  std::optional<double> box;
  std::size_t nodes = 65;
  std::optional<double> dual_box;
  std::size_t dual_nodes = 0;
  bool refine = false;
  std::size_t j = 0;
  std::size_t i = 0;
  std::string mode = "axis";
  std::size_t samples = 256;
  std::optional<std::uint64_t> seed;
  std::uint64_t index = 0;
  std::vector<std::size_t> axes;
  std::vector<double> t_steps{0.08, 0.04, 0.02};
  std::string method = "fd";
  std::string route = "grid";
  std::string mass_rule = "automatic";
  double alpha = 1.0;
  double beta = 1.0;
  double tail = 1e-6;
};

json config_json(const Options& o) {
  json c;
  c["command"] = o.command;
  if (!o.f.empty()) c["f"] = o.f;
  if (!o.g.empty()) c["g"] = o.g;
  if (o.dim) c["dim"] = *o.dim;
  if (o.box) c["box"] = *o.box;
  c["nodes"] = o.nodes;
  if (o.command == "conjugate") {
    if (o.dual_box) c["dual_box"] = *o.dual_box;
    c["dual_nodes"] = o.dual_nodes;
    c["refine"] = o.refine;
  }
  if (o.command == "quermass" || o.command == "mixed-quermass") c["j"] = o.j;
  if (o.command == "bp-check" || o.command == "project") c["i"] = o.i;
  if (o.command == "project") {
    if (!o.axes.empty()) c["axes"] = o.axes;
    c["index"] = o.index;
  }
  if (o.command == "quermass" || o.command == "mixed-quermass" || o.command == "bp-check") {
    c["mode"] = o.mode;
    if (o.mode == "mc") c["samples"] = o.samples;
    c["mass_rule"] = o.mass_rule;
    c["tail_tolerance"] = o.tail;
  }
  if (o.seed) c["seed"] = *o.seed;
  if (o.command == "mixed-quermass") {
    c["t_steps"] = o.t_steps;
    c["method"] = o.method;
    c["route"] = o.route;
  }
  if (o.command == "asplund-sum") {
    c["alpha"] = o.alpha;
    c["beta"] = o.beta;
    c["route"] = o.route;
  }
  if (o.command == "total-mass") c["mass_rule"] = o.mass_rule;
  return c;
}

ConvexFunction load(const std::string& path, const char* which) {
  if (path.empty()) throw ConfigError(std::string("missing --") + which);
  return load_function(path);
}

void check_dim(const Options& o, const ConvexFunction& u) {
  if (o.dim && *o.dim != u.dim())
    throw ConfigError("--dim " + std::to_string(*o.dim) + " does not match the function (" +
                      std::to_string(u.dim()) + ")");
}

GridSpec working_box(const Options& o, const ConvexFunction& u) {
  if (o.nodes < 2) throw ConfigError("--nodes must be >= 2");
  if (o.box) {
    if (!(*o.box > 0.0)) throw ConfigError("--box must be positive");
    return GridSpec::cube(u.dim(), *o.box, o.nodes);
  }
  if (u.is_grid()) return u.samples().grid;
  return LogConcaveFunction(u).suggested_box(o.nodes);
}

SubspaceMode parse_mode(const Options& o) {
  if (o.mode == "axis") return SubspaceMode::axis;
  if (o.mode == "mc") {
    if (!o.seed) throw ConfigError("--seed is required with --mode mc");
    return SubspaceMode::mc;
  }
  throw ConfigError("--mode must be axis or mc");
}

Route parse_route(const std::string& r) {
  if (r == "grid") return Route::grid;
  if (r == "analytic") return Route::analytic;
  throw ConfigError("--route must be grid or analytic");
}

EngineConfig engine(const Options& o, const ConvexFunction& u) {
  EngineConfig cfg;
  cfg.mode = parse_mode(o);
  cfg.samples = o.samples;
  cfg.seed = o.seed.value_or(0);
  cfg.count = o.nodes;
  if (o.box || u.is_grid()) cfg.ambient = working_box(o, u);
  if (o.mass_rule == "automatic") {
    cfg.mass_rule = MassRule::automatic;
  } else if (o.mass_rule == "quadrature") {
    cfg.mass_rule = MassRule::quadrature;
  } else {
    throw ConfigError("--mass-rule must be automatic or quadrature");
  }
  cfg.tail_tolerance = o.tail;
  cfg.t_steps = o.t_steps;
  cfg.route = parse_route(o.route);
  return cfg;
}

json result_json(const QuermassResult& r) {
  json j;
  j["value"] = r.value;
  j["stderr"] = r.std_error;
  j["method"] = std::string(to_string(r.method));
  j["subspaces"] = r.subspaces;
  if (r.method == Method::fd) j["extrapolation_residual"] = r.residual;
  json p;
  p["mode"] = r.config.mode;
  p["samples"] = r.config.samples;
  p["seed"] = r.config.seed;
  p["ambient"] = r.config.ambient;
  p["mass_rule"] = r.config.mass_rule;
  if (!r.config.t_steps.empty()) p["t_steps"] = r.config.t_steps;
  if (!r.config.route.empty()) p["route"] = r.config.route;
  j["provenance"] = p;
  j["warnings"] = r.warnings;
  return j;
}

json envelope(const Options& o) {
  json j;
  j["schema"] = kSchema;
  j["command"] = o.command;
  j["config"] = config_json(o);
  return j;
}

// Function-valued result: spec JSON plus a CSV sidecar for grid forms.
json function_value(const ConvexFunction& u, const Options& o) {
  if (!u.is_grid()) return json::parse(function_to_json(u));
  std::ostringstream csv;
  write_grid_csv(u.samples(), csv);
  if (o.out.empty()) {
    json v = json::parse(function_to_json(u));
    v.erase("file");
    v["grid_csv"] = csv.str();
    return v;
  }
  fs::path sidecar = o.out;
  sidecar.replace_extension(".csv");
  std::ofstream f(sidecar);
  if (!f) throw ConfigError("cannot write " + sidecar.string());
  f << csv.str();
  return json::parse(function_to_json(u, sidecar.filename().string()));
}

void emit(const json& j, const Options& o, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw ConfigError("cannot write " + o.out);
  f << text;
}

json function_result(const Flagged<ConvexFunction>& r, const Options& o, const char* method) {
  json j = envelope(o);
  j["value"] = function_value(r.value, o);
  j["stderr"] = 0.0;
  j["method"] = r.value.is_grid() ? method : "closed_form";
  j["warnings"] = r.warnings;
  return j;
}

int cmd_conjugate(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  check_dim(o, u);
  const GridSpec primal = working_box(o, u);
  const std::size_t count = o.dual_nodes ? o.dual_nodes : o.nodes;
  const GridSpec dual = o.dual_box ? GridSpec::cube(u.dim(), *o.dual_box, count)
                                   : suggest_dual_grid(u, primal, count);
  const ConvexFunction ug = u.is_grid() ? u : sample_to_grid(u, primal);
  const auto r = o.refine || u.is_grid() ? conjugate(ug, dual, {.refine = o.refine})
                                         : conjugate(u, dual);
  emit(function_result(r, o, "grid"), o, out);
  return 0;
}

int cmd_inf_conv(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  const ConvexFunction v = load(o.g, "g");
  check_dim(o, u);
  check_dim(o, v);
  const GridSpec grid = working_box(o, u);
  emit(function_result(inf_convolution(u, v, grid), o, "grid"), o, out);
  return 0;
}

int cmd_asplund(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  const ConvexFunction v = load(o.g, "g");
  check_dim(o, u);
  check_dim(o, v);
  if (!(o.alpha >= 0.0) || !(o.beta >= 0.0)) throw ConfigError("--alpha/--beta must be >= 0");
  const GridSpec grid = working_box(o, u);
  emit(function_result(asplund_potential(u, v, o.alpha, o.beta, grid, parse_route(o.route)), o,
                       "grid"),
       o, out);
  return 0;
}

int cmd_project(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  check_dim(o, u);
  const std::size_t n = u.dim();
  std::optional<Subspace> xi;
  if (!o.axes.empty()) {
    const std::size_t i = o.axes.size();
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < i; ++k) {
      if (o.axes[k] >= n) throw ConfigError("--axes entries must be < dim");
      b(static_cast<Eigen::Index>(o.axes[k]), static_cast<Eigen::Index>(k)) = 1.0;
    }
    try {
      xi = Subspace::from_basis(b);
    } catch (const InvalidArgument&) {
      throw ConfigError("--axes must be distinct");
    }
  } else {
    if (!o.seed) throw ConfigError("project needs --axes or --seed (with --i and --index)");
    if (o.i == 0 || o.i > n) throw ConfigError("--i must satisfy 1 <= i <= dim");
    xi = HaarSampler{*o.seed, 0}.sample(o.index, n, o.i);
  }
  const GridSpec ambient = working_box(o, u);
  const GridSpec target = subspace_grid(ambient, xi->basis());
  std::optional<GridSpec> fiber;
  if (xi->sub_dim() < n) fiber = subspace_grid(ambient, xi->complement());
  json j = function_result(project_potential(u, *xi, target, fiber), o, "grid");
  std::vector<std::vector<double>> basis;
  for (Eigen::Index c = 0; c < xi->basis().cols(); ++c) {
    const Vector col = xi->basis().col(c);
    basis.emplace_back(col.data(), col.data() + col.size());
  }
  j["subspace_basis"] = basis;
  emit(j, o, out);
  return 0;
}

int cmd_total_mass(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  check_dim(o, u);
  Options copy = o;
  copy.mode = "axis";
  const EngineConfig cfg = engine(copy, u);
  const auto r = total_mass(LogConcaveFunction(u), working_box(o, u), cfg);
  json j = envelope(o);
  j.update(result_json(r));
  emit(j, o, out);
  return 0;
}

int cmd_quermass(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  check_dim(o, u);
  const EngineConfig cfg = engine(o, u);
  if (o.j >= u.dim()) throw ConfigError("--j must satisfy 0 <= j <= dim-1");
  const auto r = quermassintegral(LogConcaveFunction(u), o.j, cfg);
  json j = envelope(o);
  j.update(result_json(r));
  emit(j, o, out);
  return 0;
}

int cmd_mixed(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  const ConvexFunction v = load(o.g, "g");
  check_dim(o, u);
  check_dim(o, v);
  if (v.dim() != u.dim()) throw ConfigError("f and g must have the same dimension");
  if (o.j >= u.dim()) throw ConfigError("--j must satisfy 0 <= j <= dim-1");
  if (o.method != "fd" && o.method != "representation" && o.method != "both")
    throw ConfigError("--method must be fd, representation or both");
  const EngineConfig cfg = engine(o, u);
  const LogConcaveFunction f(u), g(v);
  json j = envelope(o);
  std::optional<QuermassResult> fd, rep;
  if (o.method != "representation") fd = mixed_quermass_fd(f, g, o.j, cfg);
  if (o.method != "fd") rep = mixed_quermass_representation(f, g, o.j, cfg);
  if (fd && rep) {
    j["value"] = fd->value;
    j["stderr"] = fd->std_error;
    j["method"] = "fd";
    j["results"] = {{"fd", result_json(*fd)}, {"representation", result_json(*rep)}};
    const double gap = std::abs(fd->value - rep->value);
    j["gap"] = gap;
    j["relative_gap"] = gap / std::max(std::abs(fd->value), 1e-300);
    std::vector<std::string> w = fd->warnings;
    merge_warnings(w, rep->warnings);
    j["warnings"] = w;
  } else {
    j.update(result_json(fd ? *fd : *rep));
  }
  emit(j, o, out);
  return 0;
}

int cmd_bp(const Options& o, std::ostream& out) {
  const ConvexFunction u = load(o.f, "f");
  check_dim(o, u);
  if (o.i == 0 || o.i > u.dim()) throw ConfigError("--i must satisfy 1 <= i <= dim");
  const EngineConfig cfg = engine(o, u);
  const auto r = blaschke_petkantschin_check(LogConcaveFunction(u), o.i, cfg);
  json j = envelope(o);
  j["value"] = r.rhs;
  j["stderr"] = r.std_error;
  j["method"] = "quadrature";
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["rhs_alt_constant"] = r.rhs_alt_constant;
  j["relative_gap"] = r.relative_gap;
  j["budget"] = r.budget;
  j["pass"] = r.pass;
  j["warnings"] = r.warnings;
  emit(j, o, out);
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto rows = verify_battery(o.seed.value_or(42));
  const std::string csv = verify_csv(rows);
  if (o.out.empty()) {
    out << csv;
  } else {
    std::ofstream f(o.out);
    if (!f) throw ConfigError("cannot write " + o.out);
    f << csv;
  }
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; });
  return ok ? 0 : 1;
}

void error_json(std::ostream& err, const std::string& type, const std::string& message) {
  json j;
  j["schema"] = kSchema;
  j["error"] = {{"type", type}, {"message", message}};
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quermassintegrals and the operator algebra of log-concave functions", "lcq"};
  app.require_subcommand(1);
  Options o;

  auto file_opts = [&](CLI::App* s, bool with_g) {
    s->add_option("--f", o.f, "function spec JSON for f = e^{-u}")->required();
    if (with_g) s->add_option("--g", o.g, "function spec JSON for g = e^{-v}")->required();
    s->add_option("--dim", o.dim, "expected dimension");
    s->add_option("--box", o.box, "half-width of the working cube");
    s->add_option("--nodes", o.nodes, "nodes per axis")->capture_default_str();
    s->add_option("--out", o.out, "result file (default: stdout)");
  };
  auto engine_opts = [&](CLI::App* s) {
    s->add_option("--mode", o.mode, "axis or mc")->capture_default_str();
    s->add_option("--samples", o.samples, "Haar samples in mc mode")->capture_default_str();
    s->add_option("--seed", o.seed, "seed (required for mc)");
    s->add_option("--mass-rule", o.mass_rule, "automatic or quadrature")->capture_default_str();
    s->add_option("--tail", o.tail, "boundary mass budget")->capture_default_str();
  };

  auto* conj = app.add_subcommand("conjugate", "Fenchel conjugate u*");
  file_opts(conj, false);
  conj->add_option("--dual-box", o.dual_box, "half-width of the dual cube (default: slope range)");
  conj->add_option("--dual-nodes", o.dual_nodes, "dual nodes per axis (default: --nodes)");
  conj->add_flag("--refine", o.refine, "sub-cell parabolic refinement");

  auto* infc = app.add_subcommand("inf-conv", "infimal convolution u box v");
  file_opts(infc, true);

  auto* asp = app.add_subcommand("asplund-sum", "potential of alpha.f (+) beta.g");
  file_opts(asp, true);
  asp->add_option("--alpha", o.alpha)->capture_default_str();
  asp->add_option("--beta", o.beta)->capture_default_str();
  asp->add_option("--route", o.route, "grid or analytic")->capture_default_str();

  auto* proj = app.add_subcommand("project", "projection f|xi");
  file_opts(proj, false);
  proj->add_option("--axes", o.axes, "coordinate subspace axes")->delimiter(',');
  proj->add_option("--i", o.i, "subspace dimension for a Haar sample");
  proj->add_option("--seed", o.seed, "Haar seed");
  proj->add_option("--index", o.index, "Haar sample index")->capture_default_str();

  auto* mass = app.add_subcommand("total-mass", "J(f)");
  file_opts(mass, false);
  mass->add_option("--mass-rule", o.mass_rule, "automatic or quadrature")->capture_default_str();
  mass->add_option("--tail", o.tail, "boundary mass budget")->capture_default_str();

  auto* quer = app.add_subcommand("quermass", "W_j(f)");
  file_opts(quer, false);
  engine_opts(quer);
  quer->add_option("--j", o.j)->required();

  auto* mixed = app.add_subcommand("mixed-quermass", "W_j(f, g)");
  file_opts(mixed, true);
  engine_opts(mixed);
  mixed->add_option("--j", o.j)->required();
  mixed->add_option("--t-steps", o.t_steps)->delimiter(',')->capture_default_str();
  mixed->add_option("--method", o.method, "fd, representation or both")->capture_default_str();
  mixed->add_option("--route", o.route, "grid or analytic")->capture_default_str();

  auto* bp = app.add_subcommand("bp-check", "Blaschke-Petkantschin identity");
  file_opts(bp, false);
  engine_opts(bp);
  bp->add_option("--i", o.i)->required();

  auto* ver = app.add_subcommand("verify", "run the invariant battery");
  ver->add_option("--seed", o.seed, "seed (default 42)");
  ver->add_option("--out", o.out, "CSV file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "config", e.what());
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  o.command = chosen->get_name();
  try {
    if (chosen == conj) return cmd_conjugate(o, out);
    if (chosen == infc) return cmd_inf_conv(o, out);
    if (chosen == asp) return cmd_asplund(o, out);
    if (chosen == proj) return cmd_project(o, out);
    if (chosen == mass) return cmd_total_mass(o, out);
    if (chosen == quer) return cmd_quermass(o, out);
    if (chosen == mixed) return cmd_mixed(o, out);
    if (chosen == bp) return cmd_bp(o, out);
    return cmd_verify(o, out);
  } catch (const ConfigError& e) {
    error_json(err, "config", e.what());
  } catch (const InvalidArgument& e) {
    error_json(err, "config", e.what());
  } catch (const DimensionMismatch& e) {
    error_json(err, "config", e.what());
  } catch (const Error& e) {
    error_json(err, "computation", e.what());
  }
  return 2;
}

}  // namespace lcq::cli
