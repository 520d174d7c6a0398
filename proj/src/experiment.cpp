#include "dimerhole/experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "dimerhole/error.hpp"
#include "dimerhole/height.hpp"
#include "dimerhole/kasteleyn.hpp"
#include "dimerhole/region.hpp"
#include "dimerhole/render.hpp"
#include "dimerhole/riemann.hpp"
#include "dimerhole/sampler.hpp"

namespace dimerhole {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kTvNote =
    "TV tolerance is an engineering gate at the configured scale, not a convergence rate";

json complex_pair(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_pair(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json real_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json real_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json moments_json(const MomentReport& r) {
  json stats = json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"name", s.name},
                     {"empirical", s.empirical},
                     {"standard_error", s.standard_error},
                     {"predicted", s.predicted},
                     {"z", s.z},
                     {"gate", s.gate},
                     {"pass", s.pass}});
  }
  return {{"samples", r.samples}, {"pass", r.pass()}, {"stats", stats}};
}

json gof_json(const GofReport& r, double tv_gate, double p_gate) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json n = json::array();
    for (int i = 0; i < c.n.size(); ++i) n.push_back(c.n[i]);
    cells.push_back({{"n", n}, {"observed", c.observed}, {"expected", c.expected}});
  }
  const bool pass = r.support_ok && r.total_variation < tv_gate && r.p_value > p_gate;
  return {{"samples", r.samples},
          {"total_variation", r.total_variation},
          {"tv_gate", tv_gate},
          {"tv_gate_note", kTvNote},
          {"chi_square", r.chi_square},
          {"dof", r.dof},
          {"p_value", r.p_value},
          {"p_gate", p_gate},
          {"support_ok", r.support_ok},
          {"offsets", real_vector(r.offsets)},
          {"pass", pass},
          {"cells", cells}};
}

bool gof_pass(const GofReport& r, const Gates& g) {
  return r.support_ok && r.total_variation < g.tv && r.p_value > g.p_value;
}

// Runs `body`, relabelling library errors with the stage they came from.
template <class F>
auto stage(const std::string& label, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::string msg = e.what();
    const auto cut = msg.find(": ");
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw Error(e.code(), label + ": " + msg);
  }
}

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    entries_.push_back({name, sha256_hex(content), content.size()});
  }

  // JSON documents carry the config hash as a field, text files as a
  // leading comment line.
  void write_json(const std::string& name, json doc) {
    doc["config_hash"] = hash_;
    write(name, doc.dump(2) + "\n");
  }
  void write_text(const std::string& name, const std::string& body) {
    write(name, "# config_hash=" + hash_ + "\n" + body);
  }

  const std::vector<ArtifactEntry>& entries() const { return entries_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string hash_;
  std::vector<ArtifactEntry> entries_;
};

std::string samples_csv(const std::vector<SampleRecord>& records, int g, std::size_t q) {
  std::string out = "sample";
  for (int j = 1; j <= g; ++j) out += ",z" + std::to_string(j);
  for (std::size_t i = 0; i < q; ++i) out += ",corrected" + std::to_string(i);
  for (std::size_t i = 0; i < q; ++i) out += ",uncorrected" + std::to_string(i);
  out += "\n";
  for (std::size_t s = 0; s < records.size(); ++s) {
    out += std::to_string(s);
    for (double v : records[s].z) out += "," + format_double(v);
    for (double v : records[s].centered) out += "," + format_double(v);
    for (double v : records[s].uncentered) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string heights_csv(const HeightLattice& lattice, const HeightField& h) {
  std::string out = "x,y,h\n";
  const double scale = lattice.region().scale();
  for (std::size_t v = 0; v < lattice.vertices().size(); ++v) {
    const Point p = vertex_position(lattice.vertices()[v], scale);
    out += format_double(p.x) + "," + format_double(p.y) + "," +
           std::to_string(h.values[v]) + "\n";
  }
  return out;
}

// The canonical config without the fields that cannot change results.
std::string result_relevant_config(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.threads = 1;
  c.output_dir.clear();
  return config_to_json(c);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  return sha256_hex(result_relevant_config(config));
}

std::uint64_t scale_seed(std::uint64_t master, std::size_t scale_index) {
  return derive_seed(master, scale_index);
}

std::string surface_json(const SurfaceData& s, const Eigen::VectorXd& e) {
  json doc = {{"genus", s.genus},
              {"tau", real_matrix(s.tau)},
              {"a_periods", complex_matrix(s.a_periods)},
              {"omega_coeffs", complex_matrix(s.omega_coeffs)},
              {"period_matrix", complex_matrix(s.period_matrix)},
              {"abel", complex_matrix(s.abel)},
              {"riemann_constants", complex_matrix(s.riemann_constants)},
              {"shift", real_vector(e)}};
  return doc.dump(2) + "\n";
}

std::string moment_report_json(const MomentReport& r) { return moments_json(r).dump(2) + "\n"; }

std::string gof_report_json(const GofReport& r, double tv_gate, double p_gate) {
  return gof_json(r, tv_gate, p_gate).dump(2) + "\n";
}

std::string gof_report_table(const GofReport& r) {
  std::ostringstream os;
  os << "N = " << r.samples << "\n"
     << "total variation = " << format_double(r.total_variation) << "\n"
     << "chi-square = " << format_double(r.chi_square) << " (dof " << r.dof
     << "), p = " << format_double(r.p_value) << "\n"
     << "support on a translate of Z^g: " << (r.support_ok ? "yes" : "no") << "\n"
     << kTvNote << "\n"
     << "cell            observed    expected\n";
  for (const auto& c : r.cells) {
    std::string n = "(";
    for (int i = 0; i < c.n.size(); ++i) n += (i ? "," : "") + std::to_string(c.n[i]);
    n += ")";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-14s %10.5f %11.5f\n", n.c_str(), c.observed, c.expected);
    os << buf;
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig cfg = config;
  if (options.threads) cfg.threads = *options.threads;
  if (options.seed) cfg.seed = *options.seed;
  if (options.output_dir) cfg.output_dir = *options.output_dir;
  if (cfg.threads < 1) throw Error(ErrorCode::kConfig, "threads: must be ≥ 1");
  const int nscales = static_cast<int>(cfg.scales.size());
  if (options.eps_index >= nscales) {
    throw Error(ErrorCode::kConfig, "eps-index " + std::to_string(options.eps_index) +
                                        " out of range (" + std::to_string(nscales) + " scales)");
  }

  ExperimentResult res;
  res.config_hash = config_hash(cfg);
  res.output_dir = cfg.output_dir;
  ArtifactWriter out(cfg.output_dir, res.config_hash);
  out.write("config.json", result_relevant_config(cfg) + "\n");

  for (int k = 0; k < nscales; ++k) {
    if (options.eps_index >= 0 && k != options.eps_index) continue;
    const double eps = cfg.scales[k];
    const std::string tag = std::to_string(k);
    const std::string at = " (scale " + tag + ", eps " + format_double(eps) + ")";
    ScaleResult sr;
    sr.eps = eps;

    const PolyominoRegion region =
        stage("region" + at, [&] { return build_temperleyan(cfg.domain, eps); });
    out.write_text("region_" + tag + ".txt", region.dump());
    const KasteleynSystem system =
        stage("kasteleyn" + at, [&] { return KasteleynSystem::build(region); });
    sr.whites = system.size();
    sr.genus = region.genus();
    const HeightLattice lattice(region);
    const ExpectedHeightField expected =
        stage("heights" + at, [&] { return expected_height_field(system, lattice); });
    const std::vector<Tiling> tilings = stage("sampling" + at, [&] {
      return sample_many(system, scale_seed(cfg.seed, k), 0, cfg.samples, cfg.threads);
    });

    const PredictionBundle bundle = stage("predictions" + at, [&] {
      const DomainSpec dom = lattice_domain(region);
      const Box box = dom.bounding_box();
      const double h = std::max(box.xmax - box.xmin, box.ymax - box.ymin) / cfg.mesh_cells;
      return predict(dom, cfg.queries, h);
    });
    const int g = bundle.genus();
    if (g >= 1) out.write_json("surface_" + tag + ".json", json::parse(surface_json(bundle.surface, bundle.e)));

    std::vector<SampleRecord> records = stage("heights" + at, [&] {
      const auto harmonic = harmonic_on_vertices(bundle.fields, lattice);
      std::vector<std::vector<std::pair<int, double>>> windows;
      for (const auto& q : cfg.queries) windows.push_back(window_weights(lattice, q));
      std::vector<SampleRecord> rs;
      rs.reserve(tilings.size());
      for (const auto& t : tilings) {
        rs.push_back(record_sample(lattice, height_field(lattice, t), expected, harmonic, windows));
      }
      return rs;
    });
    out.write_text("samples_" + tag + ".csv", samples_csv(records, g, cfg.queries.size()));
    const HeightField first = height_field(lattice, tilings.front());
    out.write_text("heights_" + tag + ".csv", heights_csv(lattice, first));

    sr.moments = stage("verification" + at, [&] {
      return moment_suite(records, bundle, {cfg.gates.z, cfg.gates.min_moment_samples});
    });
    json mj = moments_json(sr.moments);
    mj["eps"] = eps;
    mj["seed"] = scale_seed(cfg.seed, k);
    mj["master_seed"] = cfg.seed;
    out.write_json("moments_" + tag + ".json", mj);
    out.write_text("moments_" + tag + ".txt", sr.moments.table());
    sr.pass = sr.moments.pass();

    if (g >= 1) {
      const DiscreteGaussian law(bundle.surface.tau, bundle.e);
      std::vector<std::vector<double>> z;
      for (const auto& r : records) z.push_back(r.z);
      sr.gof = stage("verification" + at,
                     [&] { return gof_hole_law(z, law, cfg.gates.min_gof_samples); });
      json gj = gof_json(*sr.gof, cfg.gates.tv, cfg.gates.p_value);
      gj["eps"] = eps;
      gj["seed"] = scale_seed(cfg.seed, k);
      gj["master_seed"] = cfg.seed;
      gj["tau"] = real_matrix(bundle.surface.tau);
      gj["e"] = real_vector(bundle.e);
      out.write_json("gof_" + tag + ".json", gj);
      out.write_text("gof_" + tag + ".txt", gof_report_table(*sr.gof));
      sr.pass = sr.pass && gof_pass(*sr.gof, cfg.gates);

      // Exact lattice variance of Z_j / 4 against Var(X_j): a noise-free
      // measure of the distance to the limit law at this scale.
      const Eigen::MatrixXd xcov = law.covariance();
      for (int j = 1; j <= g; ++j) {
        const int v = lattice.nearest_on_loop(j, region.marked_points()[j]);
        const std::vector<std::pair<int, double>> at_v{{v, 1.0}};
        const double var = exact_height_covariance(system, lattice, at_v, at_v) / 16.0;
        sr.variance_gap = std::max(sr.variance_gap, std::abs(var - xcov(j - 1, j - 1)));
      }
    }
    if (options.render) {
      RenderOptions ro;
      ro.lattice = &lattice;
      ro.heights = &first;
      out.write("render_" + tag + ".svg",
                "<!-- config_hash=" + res.config_hash + " -->\n" +
                    render_svg(region, tilings.front(), ro));
    }
    res.scales.push_back(std::move(sr));
  }

  res.pass = !res.scales.empty();
  for (const auto& s : res.scales) res.pass = res.pass && s.pass;
  if (res.scales.size() >= 2 && res.scales.front().genus >= 1) {
    // Scales are compared coarsest to finest.
    const auto [lo, hi] = std::minmax_element(
        res.scales.begin(), res.scales.end(),
        [](const ScaleResult& a, const ScaleResult& b) { return a.eps < b.eps; });
    res.variance_trend = lo->variance_gap < hi->variance_gap;
    res.tv_trend = lo->gof->total_variation < hi->gof->total_variation;
    if (cfg.gates.require_trend) res.pass = res.pass && *res.variance_trend;
  }

  json scales = json::array();
  for (const auto& s : res.scales) {
    json entry = {{"eps", s.eps},
                  {"white_squares", s.whites},
                  {"genus", s.genus},
                  {"moments_pass", s.moments.pass()},
                  {"pass", s.pass}};
    if (s.gof) {
      entry["total_variation"] = s.gof->total_variation;
      entry["p_value"] = s.gof->p_value;
      entry["variance_gap"] = s.variance_gap;
    }
    scales.push_back(entry);
  }
  json summary = {{"name", cfg.name},
                  {"samples", cfg.samples},
                  {"master_seed", cfg.seed},
                  {"scales", scales},
                  {"pass", res.pass}};
  if (res.variance_trend) {
    summary["variance_trend"] = *res.variance_trend;
    summary["tv_trend"] = *res.tv_trend;
  }
  out.write_json("summary.json", summary);

  res.artifacts = out.entries();
  json files = json::array();
  for (const auto& a : res.artifacts) {
    files.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  const json manifest = {{"config_hash", res.config_hash},
                         {"pass", res.pass},
                         {"artifacts", files}};
  const fs::path mpath = out.dir() / "manifest.json";
  std::ofstream mf(mpath, std::ios::binary);
  if (!mf || !(mf << manifest.dump(2) << "\n")) {
    throw Error(ErrorCode::kIo, "cannot write " + mpath.string());
  }
  return res;
}

}  // namespace dimerhole
