#include "lcq/function_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lcq/errors.hpp"

namespace lcq {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vector vector_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw InvalidArgument(std::string("function spec: missing array '") + key + "'");
  const auto& a = j[key];
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_number()) throw InvalidArgument(std::string("function spec: '") + key + "' must be numeric");
    v[static_cast<Eigen::Index>(k)] = a[k].get<double>();
  }
  return v;
}

std::size_t dim_field(const json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
    throw InvalidArgument("function spec: 'dim' must be a positive integer");
  return j["dim"].get<std::size_t>();
}

double number_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw InvalidArgument(std::string("function spec: '") + key + "' must be a number");
  return j[key].get<double>();
}

ConvexFunction quadratic_from(const json& j) {
  Matrix Q;
  if (j.contains("Q")) {
    const auto& rows = j["Q"];
    if (!rows.is_array() || rows.empty()) throw InvalidArgument("function spec: 'Q' must be a matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Q.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw InvalidArgument("function spec: 'Q' must be square");
      for (Eigen::Index c = 0; c < n; ++c) Q(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    if (j.contains("dim") && dim_field(j) != static_cast<std::size_t>(n))
      throw InvalidArgument("function spec: 'dim' does not match 'Q'");
  } else {
    const auto n = static_cast<Eigen::Index>(dim_field(j));
    Q = Matrix::Identity(n, n);
  }
  Vector b = j.contains("b") ? vector_field(j, "b") : Vector::Zero(Q.rows());
  return ConvexFunction::quadratic(std::move(Q), std::move(b), number_field(j, "c", 0.0));
}

}  // namespace

ConvexFunction function_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("function spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InvalidArgument("function spec: expected an object with a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const double offset = number_field(j, "offset", 0.0);
  try {
    if (kind == "quadratic") return add_constant(quadratic_from(j), offset);
    if (kind == "indicator_ball")
      return ConvexFunction::indicator_ball(dim_field(j), number_field(j, "radius", 1.0), offset);
    if (kind == "indicator_box") return ConvexFunction::indicator_box(vector_field(j, "halfwidths"), offset);
    if (kind == "norm_multiple")
      return ConvexFunction::norm_multiple(dim_field(j), number_field(j, "a", 1.0), offset);
    if (kind == "weighted_l1") return ConvexFunction::weighted_l1(vector_field(j, "weights"), offset);
    if (kind == "grid") {
      if (!j.contains("file") || !j["file"].is_string())
        throw InvalidArgument("function spec: grid kind needs a 'file'");
      std::filesystem::path p = j["file"].get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      std::ifstream in(p);
      if (!in) throw InvalidArgument("function spec: cannot open grid file " + p.string());
      return add_constant(read_grid_csv(in), offset);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("function spec: ") + e.what());
  }
  throw InvalidArgument("function spec: unknown kind '" + kind + "'");
}

ConvexFunction load_function(const std::filesystem::path& spec_path) {
  std::ifstream in(spec_path);
  if (!in) throw InvalidArgument("cannot open function spec " + spec_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return function_from_json(ss.str(), spec_path.parent_path());
}

std::string function_to_json(const ConvexFunction& u, const std::string& grid_file) {
  json j;
  auto vec = [](const Vector& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return out;
  };
  if (const auto* q = u.get_if<Quadratic>()) {
    j["kind"] = "quadratic";
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < q->Q.rows(); ++r) rows.push_back(vec(q->Q.row(r).transpose()));
    j["Q"] = rows;
    j["b"] = vec(q->b);
    j["c"] = q->c;
  } else if (const auto* b = u.get_if<IndicatorBall>()) {
    j = {{"kind", "indicator_ball"}, {"dim", b->dim}, {"radius", b->radius}, {"offset", b->offset}};
  } else if (const auto* b = u.get_if<IndicatorBox>()) {
    j = {{"kind", "indicator_box"}, {"halfwidths", vec(b->halfwidths)}, {"offset", b->offset}};
  } else if (const auto* nm = u.get_if<NormMultiple>()) {
    j = {{"kind", "norm_multiple"}, {"dim", nm->dim}, {"a", nm->a}, {"offset", nm->offset}};
  } else if (const auto* w = u.get_if<WeightedL1>()) {
    j = {{"kind", "weighted_l1"}, {"weights", vec(w->weights)}, {"offset", w->offset}};
  } else {
    j = {{"kind", "grid"}, {"file", grid_file}};
  }
  return j.dump(2);
}

void write_grid_csv(const GridSamples& s, std::ostream& out) {
  const GridSpec& g = s.grid;
  out << g.dim();
  for (const Axis& a : g.axes()) out << ',' << format_double(a.lo) << ',' << format_double(a.hi) << ',' << a.count;
  out << '\n';
  const std::size_t row = g.count(g.dim() - 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    out << (s.finite[k] ? format_double(s.values[k]) : "inf");
    out << ((k + 1) % row == 0 ? '\n' : ',');
  }
}

ConvexFunction read_grid_csv(std::istream& in, GridCheck check) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("grid csv: empty input");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) head.push_back(tok);
  }
  std::size_t n = 0;
  try {
    n = std::stoul(head.at(0));
  } catch (const std::exception&) {
    throw InvalidArgument("grid csv: malformed header");
  }
  if (n == 0 || head.size() != 1 + 3 * n) throw InvalidArgument("grid csv: header must be n,lo,hi,count per axis");
  std::vector<Axis> axes;
  try {
    for (std::size_t k = 0; k < n; ++k)
      axes.push_back({std::stod(head[1 + 3 * k]), std::stod(head[2 + 3 * k]), std::stoul(head[3 + 3 * k])});
  } catch (const std::exception&) {
    throw InvalidArgument("grid csv: malformed header");
  }
  GridSpec grid(std::move(axes));
  std::vector<double> values;
  std::vector<std::uint8_t> finite;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
      while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
      if (tok == "inf" || tok == "+inf" || tok == "Infinity") {
        values.push_back(kInf);
        finite.push_back(0);
        continue;
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
        values.push_back(v);
        finite.push_back(1);
      } catch (const std::exception&) {
        throw InvalidArgument("grid csv: bad value '" + tok + "'");
      }
    }
  }
  if (values.size() != grid.size())
    throw InvalidArgument("grid csv: expected " + std::to_string(grid.size()) + " values, got " +
                          std::to_string(values.size()));
  return ConvexFunction::from_grid(std::move(grid), std::move(values), std::move(finite), check);
}

void save_function(const ConvexFunction& u, const std::filesystem::path& spec_path) {
  std::string sidecar;
  if (u.is_grid()) {
    std::filesystem::path csv = spec_path;
    csv.replace_extension(".csv");
    sidecar = csv.filename().string();
    std::ofstream out(csv);
    if (!out) throw InvalidArgument("cannot write " + csv.string());
    write_grid_csv(u.samples(), out);
  }
  std::ofstream out(spec_path);
  if (!out) throw InvalidArgument("cannot write " + spec_path.string());
  out << function_to_json(u, sidecar) << '\n';
}

}  // namespace lcq
