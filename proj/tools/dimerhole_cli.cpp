#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimerhole/config.hpp"
#include "dimerhole/error.hpp"
#include "dimerhole/experiment.hpp"
#include "dimerhole/harmonic.hpp"
#include "dimerhole/height.hpp"
#include "dimerhole/kasteleyn.hpp"
#include "dimerhole/region.hpp"
#include "dimerhole/render.hpp"
#include "dimerhole/riemann.hpp"
#include "dimerhole/sampler.hpp"
#include "dimerhole/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dimerhole;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string input;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
  int eps_index = 0;
};

ExperimentConfig load(const Flags& f) {
  if (f.config.empty()) throw Error(ErrorCode::kConfig, "--config is required");
  ExperimentConfig c = load_config(f.config);
  if (f.has_seed) c.seed = f.seed;
  if (f.threads > 0) c.threads = f.threads;
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

double scale_of(const ExperimentConfig& c, const Flags& f) {
  if (f.eps_index < 0 || f.eps_index >= static_cast<int>(c.scales.size())) {
    throw Error(ErrorCode::kConfig, "--eps-index out of range");
  }
  return c.scales[f.eps_index];
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
}

std::string tag(const Flags& f) { return std::to_string(f.eps_index); }

double mesh_size(const DomainSpec& d, int cells) {
  const Box b = d.bounding_box();
  return std::max(b.xmax - b.xmin, b.ymax - b.ymin) / cells;
}

std::vector<Tiling> draw(const ExperimentConfig& c, const Flags& f, const KasteleynSystem& s,
                         std::size_t count) {
  return sample_many(s, scale_seed(c.seed, f.eps_index), 0, count, c.threads);
}

int cmd_validate(const Flags& f) {
  const ExperimentConfig c = load(f);
  std::cout << "config ok, hash " << config_hash(c) << "\n";
  bool ok = true;
  for (std::size_t k = 0; k < c.scales.size(); ++k) {
    const auto region = build_temperleyan(c.domain, c.scales[k]);
    const auto diag = validate_region(region);
    std::cout << "scale " << k << " (eps " << format_double(c.scales[k]) << "): " << diag.summary()
              << "\n";
    ok = ok && diag.pass();
  }
  return ok ? 0 : 1;
}

int cmd_build(const Flags& f) {
  const ExperimentConfig c = load(f);
  const auto region = build_temperleyan(c.domain, scale_of(c, f));
  std::cerr << validate_region(region).summary() << "\n";
  if (f.out.empty()) {
    std::cout << region.dump();
  } else {
    write_file(fs::path(f.out) / ("region_" + tag(f) + ".txt"), region.dump());
  }
  return 0;
}

int cmd_count(const Flags& f) {
  const ExperimentConfig c = load(f);
  const auto system = KasteleynSystem::build(build_temperleyan(c.domain, scale_of(c, f)));
  const TilingCount n = count_tilings(system);
  std::cout << "white squares " << system.size() << "\nlog count " << format_double(n.log_count)
            << "\n";
  if (n.exact) std::cout << "count " << *n.exact << "\n";
  return 0;
}

int cmd_sample(const Flags& f) {
  const ExperimentConfig c = load(f);
  const auto system = KasteleynSystem::build(build_temperleyan(c.domain, scale_of(c, f)));
  std::string text;
  for (const auto& t : draw(c, f, system, c.samples)) text += t.to_text() + "\n";
  write_file(fs::path(c.output_dir) / ("tilings_" + tag(f) + ".txt"), text);
  return 0;
}

int cmd_heights(const Flags& f) {
  const ExperimentConfig c = load(f);
  const auto region = build_temperleyan(c.domain, scale_of(c, f));
  const auto system = KasteleynSystem::build(region);
  const HeightLattice lattice(region);
  std::string csv = "sample,x,y,h\n";
  const auto tilings = draw(c, f, system, c.samples);
  for (std::size_t s = 0; s < tilings.size(); ++s) {
    const HeightField h = height_field(lattice, tilings[s]);
    for (std::size_t v = 0; v < h.values.size(); ++v) {
      const Point p = vertex_position(lattice.vertices()[v], region.scale());
      csv += std::to_string(s) + "," + format_double(p.x) + "," + format_double(p.y) + "," +
             std::to_string(h.values[v]) + "\n";
    }
  }
  write_file(fs::path(c.output_dir) / ("heights_" + tag(f) + ".csv"), csv);
  return 0;
}

int cmd_harmonic(const Flags& f) {
  const ExperimentConfig c = load(f);
  const HarmonicSolver solver(c.domain, mesh_size(c.domain, c.mesh_cells));
  const auto fields = solver.harmonic_measures();
  const MeshGeometry& m = solver.mesh();
  std::string csv = "x,y";
  for (std::size_t j = 1; j <= fields.size(); ++j) csv += ",f" + std::to_string(j);
  csv += "\n";
  for (int u = 0; u < m.size(); ++u) {
    const Point p = m.position(u);
    csv += format_double(p.x) + "," + format_double(p.y);
    for (const auto& fld : fields) csv += "," + format_double(fld.values()[u]);
    csv += "\n";
  }
  write_file(fs::path(c.output_dir) / "harmonic.csv", csv);
  if (!fields.empty()) std::cout << "tau =\n" << scale_matrix(fields) << "\n";
  return 0;
}

Eigen::MatrixXcd complex_matrix_of(const json& j) {
  const int n = static_cast<int>(j.size());
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) m(r, s) = {j[r][s][0].get<double>(), j[r][s][1].get<double>()};
  }
  return m;
}

// Theta evaluation from a JSON request, or the surface data of the
// configured domain when no request is given.
int cmd_riemann(const Flags& f) {
  if (!f.input.empty()) {
    std::ifstream in(f.input);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + f.input);
    const json req = json::parse(in);
    const Theta theta(complex_matrix_of(req.at("period")));
    json values = json::array();
    const std::vector<int> alpha = req.value("alpha", std::vector<int>{});
    for (const auto& zj : req.at("points")) {
      Eigen::VectorXcd z(theta.genus());
      for (int i = 0; i < theta.genus(); ++i) z[i] = {zj[i][0].get<double>(), zj[i][1].get<double>()};
      const auto v = theta(z, alpha);
      values.push_back(json::array({v.real(), v.imag()}));
    }
    std::cout << json{{"values", values}}.dump(2) << "\n";
    return 0;
  }
  const ExperimentConfig c = load(f);
  const HarmonicSolver solver(c.domain, mesh_size(c.domain, c.mesh_cells));
  SurfaceData s = surface_data(solver.harmonic_measures());
  const ShiftResult shift = compute_shift(s);
  const std::string doc = surface_json(s, shift.e);
  std::cout << doc;
  write_file(fs::path(c.output_dir) / "surface.json", doc);
  return 0;
}

int cmd_predict(const Flags& f) {
  const ExperimentConfig c = load(f);
  const PredictionBundle b = predict(c.domain, c.queries, mesh_size(c.domain, c.mesh_cells));
  json qs = json::array();
  for (int i = 0; i < static_cast<int>(b.queries.size()); ++i) {
    json fvals = json::array();
    for (int j = 0; j < b.genus(); ++j) fvals.push_back(b.harmonic(i, j));
    const double var = b.greens(i, i);
    qs.push_back({{"center", {b.queries[i].center.x, b.queries[i].center.y}},
                  {"radius", b.queries[i].radius},
                  {"harmonic", fvals},
                  {"variance", std::isfinite(var) ? json(predicted_covariance(b, i, i)) : json()},
                  {"variance_uncorrected",
                   std::isfinite(var) ? json(predicted_covariance(b, i, i, true)) : json()}});
  }
  json doc = {{"genus", b.genus()}, {"queries", qs}};
  if (b.genus() >= 1) {
    doc["surface"] = json::parse(surface_json(b.surface, b.e));
    json cov = json::array();
    for (int i = 0; i < b.x_covariance.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < b.x_covariance.cols(); ++j) row.push_back(b.x_covariance(i, j));
      cov.push_back(row);
    }
    doc["x_covariance"] = cov;
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_run(const Flags& f, bool render) {
  const ExperimentConfig c = load(f);
  RunOptions o;
  o.render = render;
  const ExperimentResult r = run_experiment(c, o);
  for (const auto& s : r.scales) {
    std::cout << "eps " << format_double(s.eps) << ", " << s.whites << " white squares\n"
              << s.moments.table();
    if (s.gof) std::cout << gof_report_table(*s.gof);
    std::cout << (s.pass ? "scale PASS\n" : "scale FAIL\n");
  }
  if (r.variance_trend) {
    std::cout << "trend (exact variance gap shrinks): " << (*r.variance_trend ? "yes" : "no")
              << "\ntrend (TV shrinks): " << (*r.tv_trend ? "yes" : "no") << "\n";
  }
  std::cout << "manifest " << (fs::path(r.output_dir) / "manifest.json").string() << "\n"
            << (r.pass ? "PASS" : "FAIL") << "\n";
  return r.pass ? 0 : 1;
}

int cmd_render(const Flags& f) {
  const ExperimentConfig c = load(f);
  const auto region = build_temperleyan(c.domain, scale_of(c, f));
  const auto system = KasteleynSystem::build(region);
  const HeightLattice lattice(region);
  const Tiling t = draw(c, f, system, 1).front();
  const HeightField h = height_field(lattice, t);
  RenderOptions ro;
  ro.lattice = &lattice;
  ro.heights = &h;
  const fs::path path = fs::path(c.output_dir) / ("render_" + tag(f) + ".svg");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  render_tiling(region, t, path.string(), ro);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact domino tilings of multiply connected regions and their height statistics"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "experiment config (JSON)");
    sub->add_option("--out", f.out, "output directory (overrides the config)");
    sub->add_option("--seed", f.seed, "master seed (overrides the config)")
        ->each([&](const std::string&) { f.has_seed = true; });
    sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--eps-index", f.eps_index, "index into the configured scales");
    return sub;
  };
  std::map<std::string, std::function<int()>> commands = {
      {"validate", [&] { return cmd_validate(f); }},
      {"build", [&] { return cmd_build(f); }},
      {"count", [&] { return cmd_count(f); }},
      {"sample", [&] { return cmd_sample(f); }},
      {"heights", [&] { return cmd_heights(f); }},
      {"harmonic", [&] { return cmd_harmonic(f); }},
      {"riemann", [&] { return cmd_riemann(f); }},
      {"predict", [&] { return cmd_predict(f); }},
      {"verify", [&] { return cmd_run(f, false); }},
      {"render", [&] { return cmd_render(f); }},
      {"run", [&] { return cmd_run(f, true); }},
  };
  const std::map<std::string, std::string> help = {
      {"validate", "check the config and the region at every scale"},
      {"build", "print or write the region dump"},
      {"count", "log number of tilings"},
      {"sample", "write N sampled tilings"},
      {"heights", "write height CSV of N samples"},
      {"harmonic", "harmonic measures and tau on the configured domain"},
      {"riemann", "surface data and shift, or theta values for --input"},
      {"predict", "continuum predictions at the query windows"},
      {"verify", "sample and verify every scale (no renders)"},
      {"render", "SVG of one sample with height overlay"},
      {"run", "end-to-end experiment with manifest"},
  };
  for (const auto& [name, text] : help) {
    auto* sub = common(app.add_subcommand(name, text));
    if (name == "riemann") sub->add_option("--input", f.input, "theta request (JSON)");
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return commands.at(app.get_subcommands().front()->get_name())();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
