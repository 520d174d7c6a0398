#include "dimerhole/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::string where = path;
    const std::string key = path.substr(path.find_last_of('.') + 1);
    const std::string bare = key.substr(0, key.find('['));
    const auto pos = text_.find("\"" + bare + "\"");
    if (pos != std::string::npos) {
      const long line = 1 + std::count(text_.begin(), text_.begin() + pos, '\n');
      where += " (line " + std::to_string(line) + ")";
    }
    throw Error(ErrorCode::kConfig, where + ": " + msg);
  }

  const json& require(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.is_object() || !obj.contains(key)) fail(join(path, key), "missing field");
    return obj.at(key);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  Point point(const json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  Shape shape(const json& v, const std::string& path) const {
    const std::string type = string(require(v, path, "type"), join(path, "type"));
    if (type == "rectangle") {
      const Point lo = point(require(v, path, "min"), join(path, "min"));
      const Point hi = point(require(v, path, "max"), join(path, "max"));
      if (!(lo.x < hi.x && lo.y < hi.y)) fail(join(path, "max"), "max must exceed min");
      return RectilinearPolygon::rectangle(lo.x, lo.y, hi.x, hi.y);
    }
    if (type == "circle") {
      Circle c{point(require(v, path, "center"), join(path, "center")),
               number(require(v, path, "radius"), join(path, "radius"))};
      if (!(c.radius > 0)) fail(join(path, "radius"), "radius must be > 0");
      return c;
    }
    if (type == "polygon") {
      const json& vs = require(v, path, "vertices");
      if (!vs.is_array() || vs.size() < 4) {
        fail(join(path, "vertices"), "expected at least 4 vertices");
      }
      RectilinearPolygon p;
      for (std::size_t k = 0; k < vs.size(); ++k) {
        p.vertices.push_back(point(vs[k], join(path, "vertices") + "[" + std::to_string(k) + "]"));
      }
      for (std::size_t k = 0; k < p.vertices.size(); ++k) {
        const Point a = p.vertices[k], b = p.vertices[(k + 1) % p.vertices.size()];
        if ((a.x == b.x) == (a.y == b.y)) {
          fail(join(path, "vertices"), "edges must be axis-aligned and non-degenerate");
        }
      }
      return p;
    }
    fail(join(path, "type"), "unknown shape type '" + type + "'");
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  const std::string& text_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + pos, '\n');
    throw Error(ErrorCode::kConfig,
                "line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  const Parser p(text);
  if (!root.is_object()) p.fail("(root)", "expected an object");
  ExperimentConfig c;
  c.source = text;
  c.name = root.contains("name") ? p.string(root["name"], "name") : "experiment";

  const json& dom = p.require(root, "", "domain");
  c.domain.outer = p.shape(p.require(dom, "domain", "outer"), "domain.outer");
  if (dom.contains("holes")) {
    if (!dom["holes"].is_array()) p.fail("domain.holes", "expected an array");
    for (std::size_t k = 0; k < dom["holes"].size(); ++k) {
      c.domain.holes.push_back(
          p.shape(dom["holes"][k], "domain.holes[" + std::to_string(k) + "]"));
    }
  }
  const json& marks = p.require(dom, "domain", "marked_points");
  if (!marks.is_array()) p.fail("domain.marked_points", "expected an array");
  for (std::size_t k = 0; k < marks.size(); ++k) {
    c.domain.marked_points.push_back(
        p.point(marks[k], "domain.marked_points[" + std::to_string(k) + "]"));
  }
  try {
    c.domain.check();
  } catch (const Error& e) {
    p.fail("domain", e.what());
  }

  const json& scales = p.require(root, "", "scales");
  if (!scales.is_array() || scales.empty()) p.fail("scales", "expected a non-empty array");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double eps = p.number(scales[k], "scales[" + std::to_string(k) + "]");
    if (!(eps > 0)) p.fail("scales", "lattice spacing must be > 0");
    c.scales.push_back(eps);
  }

  const json& n = p.require(root, "", "samples");
  if (!n.is_number_integer() || n.get<long long>() < 1) p.fail("samples", "N must be ≥ 1");
  c.samples = n.get<std::size_t>();

  const json& seed = p.require(root, "", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    p.fail("seed", "expected a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();

  if (root.contains("queries")) {
    const json& qs = root["queries"];
    if (!qs.is_array()) p.fail("queries", "expected an array");
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const std::string path = "queries[" + std::to_string(k) + "]";
      QueryWindow w;
      w.center = p.point(p.require(qs[k], path, "center"), path + ".center");
      if (qs[k].contains("radius")) w.radius = p.number(qs[k]["radius"], path + ".radius");
      if (w.radius < 0) p.fail(path + ".radius", "radius must be ≥ 0");
      c.queries.push_back(w);
    }
  }
  if (root.contains("mesh_cells")) {
    const json& m = root["mesh_cells"];
    if (!m.is_number_integer() || m.get<int>() < 16) p.fail("mesh_cells", "must be ≥ 16");
    c.mesh_cells = m.get<int>();
  }
  if (root.contains("threads")) {
    const json& t = root["threads"];
    if (!t.is_number_integer() || t.get<int>() < 1) p.fail("threads", "must be ≥ 1");
    c.threads = t.get<int>();
  }
  if (root.contains("output_dir")) c.output_dir = p.string(root["output_dir"], "output_dir");
  if (root.contains("gates")) {
    const json& g = root["gates"];
    if (!g.is_object()) p.fail("gates", "expected an object");
    for (const auto& [key, val] : g.items()) {
      const std::string path = "gates." + key;
      if (key == "z") {
        c.gates.z = p.number(val, path);
      } else if (key == "tv") {
        c.gates.tv = p.number(val, path);
      } else if (key == "p_value") {
        c.gates.p_value = p.number(val, path);
      } else if (key == "min_moment_samples" || key == "min_gof_samples") {
        if (!val.is_number_integer() || val.get<long long>() < 1) p.fail(path, "must be ≥ 1");
        (key == "min_moment_samples" ? c.gates.min_moment_samples : c.gates.min_gof_samples) =
            val.get<std::size_t>();
      } else if (key == "require_trend") {
        if (!val.is_boolean()) p.fail(path, "expected true or false");
        c.gates.require_trend = val.get<bool>();
      } else {
        p.fail(path, "unknown gate");
      }
    }
  }
  for (const auto& [key, val] : root.items()) {
    static const char* known[] = {"name",       "domain",  "scales",     "samples",
                                  "seed",       "queries", "mesh_cells", "threads",
                                  "output_dir", "gates"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      p.fail(key, "unknown field");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json shape_json(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) {
    return {{"type", "circle"}, {"center", {c->center.x, c->center.y}}, {"radius", c->radius}};
  }
  json vs = json::array();
  for (const auto& v : std::get<RectilinearPolygon>(s).vertices) vs.push_back({v.x, v.y});
  return {{"type", "polygon"}, {"vertices", vs}};
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json holes = json::array(), marks = json::array(), queries = json::array();
  for (const auto& h : c.domain.holes) holes.push_back(shape_json(h));
  for (const auto& m : c.domain.marked_points) marks.push_back({m.x, m.y});
  for (const auto& q : c.queries) {
    queries.push_back({{"center", {q.center.x, q.center.y}}, {"radius", q.radius}});
  }
  const json out = {
      {"name", c.name},
      {"domain", {{"outer", shape_json(c.domain.outer)}, {"holes", holes}, {"marked_points", marks}}},
      {"scales", c.scales},
      {"samples", c.samples},
      {"seed", c.seed},
      {"queries", queries},
      {"mesh_cells", c.mesh_cells},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
      {"gates",
       {{"z", c.gates.z},
        {"tv", c.gates.tv},
        {"p_value", c.gates.p_value},
        {"min_moment_samples", c.gates.min_moment_samples},
        {"min_gof_samples", c.gates.min_gof_samples},
        {"require_trend", c.gates.require_trend}}}};
  return out.dump(2);
}

}  // namespace dimerhole
