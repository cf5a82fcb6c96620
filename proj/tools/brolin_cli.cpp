// brolin command-line front end.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brolin/io.hpp"
#include "brolin/suite.hpp"
#include "brolin/verdict.hpp"

namespace {

using brolin::io::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string tol_file;
  unsigned threads = 0;
  std::string out;
};

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

brolin::Tolerances load_tolerances(const Globals& g) {
  brolin::Tolerances t;
  if (!g.tol_file.empty()) brolin::io::apply_tolerances(brolin::io::read_json(g.tol_file), t, g.tol_file);
  return t;
}

std::optional<brolin::BBox> to_bbox(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  brolin::BBox b{v[0], v[1], v[2], v[3]};
  if (!(b.width() > 0.0 && b.height() > 0.0)) throw brolin::ValidationError("bbox is degenerate");
  return b;
}

void require_out(const Globals& g) {
  if (g.out.empty()) throw brolin::ValidationError("--out is required for this command");
}

void write_report(const std::string& path, const json& config, const json& payload, const json& timings) {
  brolin::io::write_text(path, brolin::io::envelope(config, payload, timings).dump(2) + "\n");
}

std::string lower_ext(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string e = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return e;
}

// ---- escape-rate ----

struct EscapeArgs {
  std::string map;
  std::vector<int> grid{256, 256};
  std::vector<double> bbox{-2.0, -2.0, 2.0, 2.0};
};

int run_escape(const Globals& g, const EscapeArgs& a) {
  require_out(g);
  Clock clk;
  const auto tol = load_tolerances(g);
  const auto mf = brolin::io::read_map_file(a.map);
  const auto f = mf.build(tol);
  const brolin::EscapeRateEvaluator ev(f.lift(), tol);
  const auto box = *to_bbox(a.bbox);
  const int nx = a.grid[0], ny = a.grid[1];
  if (nx < 1 || ny < 1) throw brolin::ValidationError("grid must be positive");
  // row 0 is the top edge (largest imaginary part), as in the raster
  std::vector<double> p(static_cast<std::size_t>(nx) * ny);
  auto at = [&](int i, int j) {
    return brolin::Complex(box.x0 + (i + 0.5) * box.width() / nx, box.y1 - (j + 0.5) * box.height() / ny);
  };
  brolin::parallel_for(p.size(), g.threads, [&](std::size_t k) {
    p[k] = ev.potential(at(static_cast<int>(k % nx), static_cast<int>(k / nx)));
  });
  json payload{{"map_id", mf.id}, {"output", g.out}, {"base_height", ev.base_height()}};
  if (lower_ext(g.out) == "csv") {
    std::string s = "x,y,p\n";
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto z = at(static_cast<int>(k % nx), static_cast<int>(k / nx));
      s += brolin::io::fmt(z.real()) + "," + brolin::io::fmt(z.imag()) + "," + brolin::io::fmt(p[k]) + "\n";
    }
    brolin::io::write_text(g.out, s);
  } else {
    const auto sidecar = g.out + ".scale.json";
    brolin::io::emit_raster(p, nx, ny, g.out, sidecar);
    payload["sidecar"] = sidecar;
  }
  json config{{"map", brolin::io::map_to_json(mf)},
              {"grid", {nx, ny}},
              {"bbox", brolin::io::bbox_to_json(box)},
              {"tolerances", brolin::io::tolerances_to_json(tol)}};
  write_report(g.out + ".report.json", config, payload, {{"total", clk.seconds()}});
  return 0;
}

// ---- julia-sample ----

struct SampleArgs {
  std::string map;
  std::size_t samples = 100000;
  int burn_in = 30;
  int tree_depth = 0;
};

int run_julia(const Globals& g, const SampleArgs& a) {
  require_out(g);
  Clock clk;
  const auto tol = load_tolerances(g);
  const auto mf = brolin::io::read_map_file(a.map);
  const auto f = mf.build(tol);
  brolin::SamplerConfig sc;
  sc.n_samples = a.samples;
  sc.burn_in = a.burn_in;
  sc.seed = g.seed.value_or(1);
  sc.full_tree_depth = a.tree_depth;
  sc.threads = g.threads;
  const auto mu = brolin::sample_julia(f, sc);
  brolin::io::write_measure_csv(g.out, mu);
  json config{{"map", brolin::io::map_to_json(mf)},
              {"samples", a.samples},
              {"burn_in", a.burn_in},
              {"full_tree_depth", a.tree_depth},
              {"seed", sc.seed},
              {"chains", sc.chains},
              {"tolerances", brolin::io::tolerances_to_json(tol)}};
  write_report(g.out + ".report.json", config,
               {{"map_id", mf.id}, {"output", g.out}, {"count", mu.size()}, {"max_modulus", mu.max_modulus()}},
               {{"total", clk.seconds()}});
  return 0;
}

// ---- harmonic-sample ----

struct HarmonicArgs {
  std::string map;
  std::size_t walkers = 100000;
  std::size_t witnesses = 1000000;
  std::vector<int> grid{1024, 1024};
  std::vector<double> bbox;
  double r_launch = 0.0;
};

int run_harmonic(const Globals& g, const HarmonicArgs& a) {
  require_out(g);
  Clock clk;
  const auto tol = load_tolerances(g);
  const auto mf = brolin::io::read_map_file(a.map);
  const auto f = mf.build(tol);
  const std::uint64_t seed = g.seed.value_or(1);
  brolin::SamplerConfig sc;
  sc.n_samples = a.witnesses;
  sc.seed = seed;
  sc.threads = g.threads;
  const auto mu = brolin::sample_julia(f, sc);
  const auto box = to_bbox(a.bbox).value_or(brolin::auto_bbox(mu));
  const auto grid = brolin::label_grid(f, mu, box, a.grid[0], a.grid[1]);
  brolin::HarmonicConfig hc;
  hc.n_walkers = a.walkers;
  hc.seed = brolin::harmonic_seed(seed);
  hc.r_launch = a.r_launch;
  hc.threads = g.threads;
  const auto nu = brolin::sample_harmonic(grid, hc);
  brolin::io::write_measure_csv(g.out, nu.hits);
  json config{{"map", brolin::io::map_to_json(mf)},
              {"walkers", a.walkers},
              {"witnesses", a.witnesses},
              {"grid", {a.grid[0], a.grid[1]}},
              {"bbox", brolin::io::bbox_to_json(box)},
              {"seed", seed},
              {"harmonic_seed", hc.seed},
              {"tolerances", brolin::io::tolerances_to_json(tol)}};
  json payload{{"map_id", mf.id},
               {"output", g.out},
               {"hits", nu.hits.size()},
               {"mean_steps", nu.walker_stats.mean_steps},
               {"max_steps", nu.walker_stats.max_steps},
               {"abandoned", nu.walker_stats.abandoned},
               {"R_launch", nu.r_launch},
               {"eps_hit", nu.eps_hit},
               {"delta", grid.delta}};
  write_report(g.out + ".report.json", config, payload, {{"total", clk.seconds()}});
  return 0;
}

// ---- lemniscate ----

struct LemniscateArgs {
  std::string map;
  int order = 1;
  std::vector<int> grid{256, 256};
  std::vector<double> bbox;
  std::size_t witnesses = 100000;
  bool checks = false;
};

int run_lemniscate(const Globals& g, const LemniscateArgs& a) {
  require_out(g);
  Clock clk;
  const auto tol = load_tolerances(g);
  const auto mf = brolin::io::read_map_file(a.map);
  const auto f = mf.build(tol);
  const brolin::EscapeRateEvaluator ev(f.lift(), tol);
  const std::uint64_t seed = g.seed.value_or(1);
  brolin::SamplerConfig sc;
  sc.n_samples = a.witnesses;
  sc.seed = seed;
  sc.threads = g.threads;
  const auto mu = brolin::sample_julia(f, sc);
  const double I = brolin::energy(mu, ev);
  const auto L = brolin::make_lemniscate(ev, I, a.order);
  const auto box = to_bbox(a.bbox).value_or(brolin::auto_bbox(mu));
  const auto trace = brolin::trace_level_set(L, box, a.grid[0], a.grid[1], tol.trace);
  brolin::io::write_text(g.out, brolin::io::trace_to_csv(trace));
  json payload{{"map_id", mf.id},
               {"output", g.out},
               {"order", a.order},
               {"c", brolin::io::complex_to_json(L.c)},
               {"energy", I},
               {"polylines", trace.polylines.size()},
               {"vertices", trace.vertex_count()}};
  if (a.checks) {
    if (a.order != 1) throw brolin::ValidationError("--checks runs on the order-1 lemniscate");
    payload["checks"] = brolin::io::claims_to_json(brolin::claim_checks(f, L, mu, trace, ev, I));
  }
  json config{{"map", brolin::io::map_to_json(mf)},
              {"order", a.order},
              {"grid", {a.grid[0], a.grid[1]}},
              {"bbox", brolin::io::bbox_to_json(box)},
              {"witnesses", a.witnesses},
              {"seed", seed},
              {"tolerances", brolin::io::tolerances_to_json(tol)}};
  write_report(g.out + ".report.json", config, payload, {{"total", clk.seconds()}});
  return 0;
}

// ---- classify ----

int run_classify(const Globals& g, const std::string& map) {
  const auto tol = load_tolerances(g);
  const auto mf = brolin::io::read_map_file(map);
  const auto f = mf.build(tol);
  json payload = brolin::io::algebraic_to_json(brolin::classify(f));
  payload["map_id"] = mf.id;
  payload["d"] = f.degree();
  const json config{{"map", brolin::io::map_to_json(mf)}, {"tolerances", brolin::io::tolerances_to_json(tol)}};
  const auto text = brolin::io::envelope(config, payload).dump(2) + "\n";
  if (g.out.empty())
    std::cout << text;
  else
    brolin::io::write_text(g.out, text);
  return 0;
}

// ---- verdict / suite ----

brolin::Config load_config(const Globals& g, const std::string& path) {
  brolin::Config c = path.empty() ? brolin::Config{} : brolin::io::config_from_json(brolin::io::read_json(path), path);
  if (!g.tol_file.empty()) brolin::io::apply_tolerances(brolin::io::read_json(g.tol_file), c.tolerances, g.tol_file);
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = g.threads;
  c.validate();
  return c;
}

int status_exit(const brolin::VerdictReport& r) {
  if (!r.failure || r.failure->stage == "lemniscate") return 0;
  return r.failure->category == "numerical" ? 3 : r.failure->category == "io" ? 4 : 2;
}

int run_verdict_cmd(const Globals& g, const std::string& map, const std::string& config_path) {
  require_out(g);
  const auto cfg = load_config(g, config_path);
  const auto mf = brolin::io::read_map_file(map);
  const auto r = brolin::run_verdict(mf.build(cfg.tolerances), cfg, mf.id);
  auto echo = brolin::io::config_to_json(cfg);
  echo["map"] = brolin::io::map_to_json(mf);
  write_report(g.out, echo, brolin::io::report_to_json(r), brolin::io::timings_to_json(r));
  std::printf("%s: %s\n", mf.id.c_str(), brolin::to_string(r.status));
  return status_exit(r);
}

int run_suite(const Globals& g, const std::string& config_path) {
  require_out(g);
  const auto cfg = load_config(g, config_path);
  json payload = json::array(), timings = json::object();
  int code = 0;
  const auto reports = brolin::run_suite(cfg, [&](const brolin::VerdictReport& r) {
    std::printf("%-14s %s\n", r.map_id.c_str(), brolin::to_string(r.status));
    std::fflush(stdout);
    payload.push_back(brolin::io::report_to_json(r));
    timings[r.map_id] = brolin::io::timings_to_json(r);
    code = std::max(code, status_exit(r));
  });
  brolin::io::write_text(g.out, brolin::io::suite_csv(reports));
  write_report(g.out + ".report.json", brolin::io::config_to_json(cfg), payload, timings);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brolin: escape rates, equilibrium and harmonic measures, and the square-polynomial verdict"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(brolin::io::kToolVersion));

  Globals g;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--tol-file", g.tol_file, "JSON object of tolerance overrides")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--out", g.out, "output path");

  auto add_grid = [](CLI::App* s, std::vector<int>& v) {
    return s->add_option("--grid", v, "NX,NY")->delimiter(',')->expected(2);
  };
  auto add_bbox = [](CLI::App* s, std::vector<double>& v) {
    return s->add_option("--bbox", v, "X0,Y0,X1,Y1")->delimiter(',')->expected(4);
  };

  EscapeArgs ea;
  auto* esc = app.add_subcommand("escape-rate", "potential of the equilibrium measure on a grid (.pgm or .csv)");
  esc->add_option("--map", ea.map, "map JSON")->required()->check(CLI::ExistingFile);
  add_grid(esc, ea.grid);
  add_bbox(esc, ea.bbox);

  SampleArgs sa;
  auto* jul = app.add_subcommand("julia-sample", "equilibrium-measure witnesses by inverse iteration");
  jul->add_option("--map", sa.map, "map JSON")->required()->check(CLI::ExistingFile);
  jul->add_option("--samples", sa.samples, "number of witnesses");
  jul->add_option("--burn-in", sa.burn_in, "inverse-iteration burn-in");
  jul->add_option("--tree-depth", sa.tree_depth, "full preimage tree depth (0 = random branches)");

  HarmonicArgs ha;
  auto* har = app.add_subcommand("harmonic-sample", "harmonic measure from infinity by walk-on-spheres");
  har->add_option("--map", ha.map, "map JSON")->required()->check(CLI::ExistingFile);
  har->add_option("--walkers", ha.walkers, "number of walkers");
  har->add_option("--witnesses", ha.witnesses, "Julia witnesses used to label the grid");
  har->add_option("--r-launch", ha.r_launch, "launch radius (0 = 4x hull radius)");
  add_grid(har, ha.grid);
  add_bbox(har, ha.bbox);

  LemniscateArgs la;
  auto* lem = app.add_subcommand("lemniscate", "trace the normalized lemniscate |cF_0^(n)(1,z)| = 1");
  lem->add_option("--map", la.map, "map JSON")->required()->check(CLI::ExistingFile);
  lem->add_option("--order", la.order, "iterate order n")->check(CLI::PositiveNumber);
  lem->add_option("--witnesses", la.witnesses, "Julia witnesses for the energy and the checks");
  lem->add_flag("--checks", la.checks, "add the claim statistics to the report");
  add_grid(lem, la.grid);
  add_bbox(lem, la.bbox);

  std::string cmap;
  auto* cls = app.add_subcommand("classify", "algebraic classification");
  cls->add_option("--map", cmap, "map JSON")->required()->check(CLI::ExistingFile);

  std::string vmap, vconfig;
  auto* ver = app.add_subcommand("verdict", "full pipeline on one map");
  ver->add_option("--map", vmap, "map JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("--config", vconfig, "config JSON")->check(CLI::ExistingFile);

  std::string sconfig;
  auto* sui = app.add_subcommand("suite", "full pipeline on the built-in calibration set; CSV summary");
  sui->add_option("--config", sconfig, "config JSON")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*esc) return run_escape(g, ea);
    if (*jul) return run_julia(g, sa);
    if (*har) return run_harmonic(g, ha);
    if (*lem) return run_lemniscate(g, la);
    if (*cls) return run_classify(g, cmap);
    if (*ver) return run_verdict_cmd(g, vmap, vconfig);
    if (*sui) return run_suite(g, sconfig);
  } catch (const brolin::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return brolin::exit_code(e.category());
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return 3;
  }
  return 2;
}
