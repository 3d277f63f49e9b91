// comb_entangler CLI: spectral sweeps, Duan variances, disorder ensembles,
// and figure-reproduction presets on top of the C API.

#include <algorithm>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "comb_entangler.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void die(const std::string& msg, int code = 2) {
  std::cerr << "comb_entangler: " << msg << "\n";
  std::exit(code);
}

void check(combent_status s) {
  if (s != COMBENT_OK) die(combent_last_error());
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

struct ConfigHandle {
  combent_config* ptr = nullptr;
  ~ConfigHandle() { combent_config_free(ptr); }
  combent_config* get() const { return ptr; }
};

void load_config(const std::string& path, ConfigHandle& h) {
  check(combent_config_load(path.c_str(), &h.ptr));
}

void parse_config_text(const std::string& text, ConfigHandle& h) {
  check(combent_config_parse(text.c_str(), &h.ptr));
}

struct RunContext {
  std::string command_line;
  std::vector<std::string> outputs;
  combent_config* cfg = nullptr;
  json extra;
};

void write_manifest(const RunContext& ctx, const std::string& anchor_path) {
  json m;
  m["tool"] = "comb_entangler";
  m["version"] = combent_version();
  m["command"] = ctx.command_line;
  if (ctx.cfg) {
    char* text = nullptr;
    check(combent_config_serialize(ctx.cfg, &text));
    m["config"] = json::parse(text);
    combent_string_free(text);
    uint64_t h = 0;
    check(combent_config_hash(ctx.cfg, &h));
    m["config_hash"] = h;
  }
  m["outputs"] = ctx.outputs;
  for (auto& [k, v] : ctx.extra.items()) m[k] = v;
  const std::string path = anchor_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) die("cannot write " + path);
  out << m.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty())
    fs::create_directories(dir);
  std::ofstream out(path);
  if (!out) die("cannot write " + path);
  return out;
}

double omega_m_of(combent_config* cfg) {
  double om = 0.0;
  check(combent_config_omega_m(cfg, &om));
  return om;
}

combent_route parse_route(const std::string& name) {
  if (name == "full") return COMBENT_ROUTE_FULL;
  if (name == "simplified") return COMBENT_ROUTE_SIMPLIFIED;
  if (name == "oracle") return COMBENT_ROUTE_ORACLE;
  die("unknown route '" + name + "' (expected full|simplified|oracle)");
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text, int m) {
  std::vector<std::pair<int, int>> pairs;
  if (text == "all") {
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) pairs.emplace_back(j, l);
    return pairs;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    int j, l;
    if (std::sscanf(tok.c_str(), "%d,%d", &j, &l) != 2 || j < 0 || l < 0 || j >= m || l >= m)
      die("bad --pairs entry '" + tok + "'");
    pairs.emplace_back(j, l);
  }
  if (pairs.empty()) die("--pairs selected nothing");
  return pairs;
}

// ---- spectrum -------------------------------------------------------

int cmd_spectrum(const std::string& config_path, double wmin, double wmax, int wpoints,
                 std::optional<double> theta, const std::string& pairs_text,
                 const std::string& route_name, const std::string& out_path,
                 RunContext& ctx) {
  ConfigHandle base;
  load_config(config_path, base);
  ConfigHandle themed;
  combent_config* cfg = base.get();
  if (theta) {
    check(combent_config_with_theta(base.get(), *theta, &themed.ptr));
    cfg = themed.get();
  }
  ctx.cfg = cfg;
  int m = 0;
  check(combent_config_mode_count(cfg, &m));
  const double om = omega_m_of(cfg);
  const auto pairs = parse_pairs(pairs_text, m);
  const auto grid = linspace(wmin * om, wmax * om, wpoints);
  const combent_route route = parse_route(route_name);

  const std::size_t per_point = static_cast<std::size_t>(m) * m;
  std::vector<double> values(grid.size() * per_point * 4);
  std::vector<int> valid(grid.size());
  check(combent_spectrum_run(cfg, grid.data(), grid.size(), route, values.data(),
                             valid.data()));

  auto out = open_out(out_path);
  out << "omega,omega_over_omega_m,j,l,xx_re,xx_im,yy_re,yy_im,validity\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (auto [j, l] : pairs) {
      const double* slot =
          values.data() + (i * per_point + static_cast<std::size_t>(j) * m + l) * 4;
      out << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ',' << j << ',' << l << ','
          << fmt(slot[0]) << ',' << fmt(slot[1]) << ',' << fmt(slot[2]) << ','
          << fmt(slot[3]) << ',' << valid[i] << "\n";
    }
  }
  ctx.outputs.push_back(out_path);
  ctx.extra["grid"] = {{"omega_min", wmin}, {"omega_max", wmax}, {"points", wpoints},
                       {"unit", "omega_m"}};
  ctx.extra["route"] = route_name;
  write_manifest(ctx, out_path);
  return 0;
}

// ---- variance -------------------------------------------------------

int cmd_variance(const std::string& config_path, double wmin, double wmax, int wpoints,
                 std::optional<double> theta, const std::string& route_name,
                 std::optional<double> matrix_at, const std::string& out_path,
                 RunContext& ctx) {
  ConfigHandle base;
  load_config(config_path, base);
  ConfigHandle themed;
  combent_config* cfg = base.get();
  if (theta) {
    check(combent_config_with_theta(base.get(), *theta, &themed.ptr));
    cfg = themed.get();
  }
  ctx.cfg = cfg;
  int m = 0;
  check(combent_config_mode_count(cfg, &m));
  if (m < 2) die("variance needs at least two modes");
  const double om = omega_m_of(cfg);
  const auto grid = linspace(wmin * om, wmax * om, wpoints);
  const combent_route route = parse_route(route_name);
  const std::size_t pairs = static_cast<std::size_t>(m) * (m - 1) / 2;

  std::vector<double> v(grid.size() * pairs);
  std::vector<int> valid(grid.size());
  check(combent_variance_grid(cfg, grid.data(), grid.size(), route, v.data(), valid.data()));

  auto out = open_out(out_path);
  out << "omega,omega_over_omega_m,j,l,v,validity\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t p = 0;
    for (int j = 0; j < m; ++j)
      for (int l = j + 1; l < m; ++l) {
        out << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ',' << j << ',' << l << ','
            << fmt(v[i * pairs + p++]) << ',' << valid[i] << "\n";
      }
  }
  ctx.outputs.push_back(out_path);

  if (matrix_at) {
    const double w = *matrix_at * om;
    std::vector<double> vm(static_cast<std::size_t>(m) * m);
    check(combent_variance_matrix(cfg, w, vm.data()));
    const std::string mpath = out_path + ".matrix.csv";
    auto mout = open_out(mpath);
    mout << "j";
    for (int l = 0; l < m; ++l) mout << ",l" << l;
    mout << "\n";
    for (int j = 0; j < m; ++j) {
      mout << j;
      for (int l = 0; l < m; ++l) mout << ',' << fmt(vm[static_cast<std::size_t>(j) * m + l]);
      mout << "\n";
    }
    ctx.outputs.push_back(mpath);
    ctx.extra["matrix_at_omega_over_omega_m"] = *matrix_at;
  }
  ctx.extra["grid"] = {{"omega_min", wmin}, {"omega_max", wmax}, {"points", wpoints},
                       {"unit", "omega_m"}};
  ctx.extra["route"] = route_name;
  write_manifest(ctx, out_path);
  return 0;
}

// ---- ensemble -------------------------------------------------------

int cmd_ensemble(const std::string& config_path, double sigma, uint32_t samples,
                 uint64_t seed, double wmin, double wmax, int wpoints,
                 std::optional<double> theta_opt, const std::string& out_path,
                 RunContext& ctx) {
  ConfigHandle base;
  load_config(config_path, base);
  ctx.cfg = base.get();
  int m = 0;
  check(combent_config_mode_count(base.get(), &m));
  const double om = omega_m_of(base.get());
  double theta = 0.0;
  if (theta_opt)
    theta = *theta_opt;
  else
    check(combent_config_theta(base.get(), &theta));
  const auto grid = linspace(wmin * om, wmax * om, wpoints);

  combent_ensemble* ens = nullptr;
  check(combent_ensemble_run(base.get(), sigma, seed, samples, 3u, grid.data(), grid.size(),
                             theta, &ens));
  std::size_t pairs = 0;
  check(combent_ensemble_pair_count(ens, &pairs));

  auto out = open_out(out_path);
  out << "omega,omega_over_omega_m,j,l,v_min,v_max,v_mean\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t p = 0; p < pairs; ++p) {
      int j, l;
      check(combent_ensemble_pair(ens, p, &j, &l));
      double lo, hi, mean;
      check(combent_ensemble_stat(ens, COMBENT_STAT_MIN, p, i, &lo));
      check(combent_ensemble_stat(ens, COMBENT_STAT_MAX, p, i, &hi));
      check(combent_ensemble_stat(ens, COMBENT_STAT_MEAN, p, i, &mean));
      out << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ',' << j << ',' << l << ','
          << fmt(lo) << ',' << fmt(hi) << ',' << fmt(mean) << "\n";
    }
  }
  combent_ensemble_free(ens);
  ctx.outputs.push_back(out_path);
  ctx.extra["grid"] = {{"omega_min", wmin}, {"omega_max", wmax}, {"points", wpoints},
                       {"unit", "omega_m"}};
  ctx.extra["sigma_rel"] = sigma;
  ctx.extra["samples"] = samples;
  ctx.extra["seed"] = seed;
  ctx.extra["theta"] = theta;
  write_manifest(ctx, out_path);
  return 0;
}

// ---- reproduce ------------------------------------------------------

std::string identical_config_json(int modes, double omega_m, double q_m, double n_th,
                                  double g, double kappa_e, double kappa_i, double theta) {
  json mode = {{"delta", 0.0}, {"kappa_e", kappa_e}, {"kappa_i", kappa_i}, {"g", g}};
  json doc = {{"unit", "dimensionless"},
              {"theta", theta},
              {"mechanical", {{"omega_m", omega_m}, {"q_m", q_m}, {"n_th", n_th}}},
              {"modes", json::array()}};
  for (int i = 0; i < modes; ++i) doc["modes"].push_back(mode);
  return doc.dump();
}

struct CheckList {
  json entries = json::array();
  bool all_pass = true;
  void add(const std::string& name, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    all_pass = all_pass && ok;
    entries.push_back({{"name", name}, {"value", value}, {"expected_low", lo},
                       {"expected_high", hi}, {"pass", ok}});
  }
};

std::vector<double> variance_curve(combent_config* cfg, const std::vector<double>& grid,
                                   double theta) {
  ConfigHandle themed;
  check(combent_config_with_theta(cfg, theta, &themed.ptr));
  std::vector<double> v(grid.size());
  check(combent_variance_grid(themed.get(), grid.data(), grid.size(), COMBENT_ROUTE_FULL,
                              v.data(), nullptr));
  return v;  // single pair expected (M=2) or caller slices
}

void write_curve_csv(const std::string& path, const std::vector<double>& grid, double om,
                     const std::vector<std::pair<std::string, const std::vector<double>*>>& cols,
                     RunContext& ctx) {
  auto out = open_out(path);
  out << "omega,omega_over_omega_m";
  for (const auto& c : cols) out << ',' << c.first;
  out << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << fmt(grid[i]) << ',' << fmt(grid[i] / om);
    for (const auto& c : cols) out << ',' << fmt((*c.second)[i]);
    out << "\n";
  }
  ctx.outputs.push_back(path);
}

// Contiguous below-2 interval of `v` containing index `anchor`; returns
// [lo, hi] indices or nothing if v[anchor] >= 2.
std::optional<std::pair<std::size_t, std::size_t>> below_two_interval(
    const std::vector<double>& v, std::size_t anchor) {
  if (!(v[anchor] < 2.0)) return std::nullopt;
  std::size_t lo = anchor, hi = anchor;
  while (lo > 0 && v[lo - 1] < 2.0) --lo;
  while (hi + 1 < v.size() && v[hi + 1] < 2.0) ++hi;
  return std::make_pair(lo, hi);
}

int preset_fig1b(const std::string& dir, RunContext& ctx) {
  const std::string cfg_json = identical_config_json(2, 0.1, 1e6, 1e3, 0.03, 1.0, 0.0, kPi / 4);
  ConfigHandle cfg;
  parse_config_text(cfg_json, cfg);
  ctx.cfg = cfg.get();
  const double om = omega_m_of(cfg.get());
  const auto grid = linspace(0.01 * om, 2.5 * om, 2001);

  // theta x omega map on the default angle grid
  std::vector<double> thetas(181);
  for (int i = 0; i < 181; ++i) thetas[i] = -kPi + 2.0 * kPi * i / 181;
  auto heat = open_out(dir + "/fig1b_map.csv");
  heat << "theta,omega,omega_over_omega_m,v\n";
  double min_near_half_pi = std::numeric_limits<double>::infinity();
  for (double th : thetas) {
    const auto v = variance_curve(cfg.get(), grid, th);
    for (std::size_t i = 0; i < grid.size(); ++i)
      heat << fmt(th) << ',' << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ',' << fmt(v[i])
           << "\n";
    if (std::fabs(th - kPi / 2) <= 0.06 * kPi)
      for (double x : v) min_near_half_pi = std::min(min_near_half_pi, x);
  }
  ctx.outputs.push_back(dir + "/fig1b_map.csv");

  // band edges at the two quadrature angles
  const auto v_plus = variance_curve(cfg.get(), grid, kPi / 4);
  const auto v_minus = variance_curve(cfg.get(), grid, -kPi / 4);
  std::size_t anchor_inner = 0, anchor_outer = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0.5 * om) anchor_inner = i;
    if (grid[i] <= 2.2 * om) anchor_outer = i;
  }
  const bool plus_is_inner = v_plus[anchor_inner] < 2.0;
  const auto& v_inner = plus_is_inner ? v_plus : v_minus;
  const auto& v_outer = plus_is_inner ? v_minus : v_plus;
  const double theta_inner = plus_is_inner ? kPi / 4 : -kPi / 4;

  CheckList checks;
  checks.add("min_v_theta_half_pi", min_near_half_pi, 1.0, 1.1);
  double b1 = std::numeric_limits<double>::quiet_NaN();
  if (auto band = below_two_interval(v_inner, anchor_inner)) {
    b1 = grid[band->second] / om;
    checks.add("inner_band_upper_edge", b1, 0.88, 1.02);
    checks.add("inner_band_lower_edge", grid[band->first] / om, 0.0, 0.2);
  } else {
    checks.add("inner_band_upper_edge", b1, 0.88, 1.02);
  }
  double b2 = std::numeric_limits<double>::quiet_NaN();
  if (auto band = below_two_interval(v_outer, anchor_outer)) {
    b2 = grid[band->first] / om;
    checks.add("outer_region_lower_edge", b2, 0.96, 1.10);
    checks.add("outer_region_reaches_grid_end", grid[band->second] / om, 2.45, 2.5);
  } else {
    checks.add("outer_region_lower_edge", b2, 0.96, 1.10);
  }

  write_curve_csv(dir + "/fig1b_band_curves.csv", grid, om,
                  {{"v_theta_plus_quarter_pi", &v_plus}, {"v_theta_minus_quarter_pi", &v_minus}},
                  ctx);

  json summary;
  summary["preset"] = "fig1b";
  summary["min_v_near_theta_half_pi"] = min_near_half_pi;
  summary["inner_band_theta"] = theta_inner;
  summary["inner_band_upper_edge_over_omega_m"] = b1;
  summary["outer_region_lower_edge_over_omega_m"] = b2;
  summary["checks"] = checks.entries;
  summary["pass"] = checks.all_pass;
  auto out = open_out(dir + "/fig1b_summary.json");
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back(dir + "/fig1b_summary.json");
  write_manifest(ctx, dir + "/fig1b_summary.json");
  return checks.all_pass ? 0 : 3;
}

int preset_fig2(const std::string& dir, uint64_t seed, RunContext& ctx) {
  const std::string cfg_json = identical_config_json(4, 0.1, 1e6, 1e3, 0.05, 1.0, 0.0, kPi / 4);
  ConfigHandle cfg;
  parse_config_text(cfg_json, cfg);
  ctx.cfg = cfg.get();
  const double om = omega_m_of(cfg.get());
  const auto grid = linspace(0.01 * om, 2.5 * om, 2001);

  // identical-mode curve: every pair coincides, keep pair (0,1)
  std::vector<double> v(grid.size() * 6);
  check(combent_variance_grid(cfg.get(), grid.data(), grid.size(), COMBENT_ROUTE_FULL,
                              v.data(), nullptr));
  std::vector<double> ident(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ident[i] = v[i * 6];
  write_curve_csv(dir + "/fig2_identical.csv", grid, om, {{"v", &ident}}, ctx);
  const double vmin_ident = *std::min_element(ident.begin(), ident.end());

  combent_ensemble* ens = nullptr;
  check(combent_ensemble_run(cfg.get(), 0.10, seed, 10, 3u, grid.data(), grid.size(),
                             kPi / 4, &ens));
  auto env = open_out(dir + "/fig2_ensemble.csv");
  env << "omega,omega_over_omega_m,j,l,v_min,v_max,v_mean\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t p = 0; p < 6; ++p) {
      int j, l;
      check(combent_ensemble_pair(ens, p, &j, &l));
      double lo, hi, mean;
      check(combent_ensemble_stat(ens, COMBENT_STAT_MIN, p, i, &lo));
      check(combent_ensemble_stat(ens, COMBENT_STAT_MAX, p, i, &hi));
      check(combent_ensemble_stat(ens, COMBENT_STAT_MEAN, p, i, &mean));
      env << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ',' << j << ',' << l << ','
          << fmt(lo) << ',' << fmt(hi) << ',' << fmt(mean) << "\n";
    }
  ctx.outputs.push_back(dir + "/fig2_ensemble.csv");

  // per sample: do all six pairs dip below 1.85 somewhere on the grid
  int samples_ok = 0;
  for (uint32_t s = 0; s < 10; ++s) {
    bool all_pairs = true;
    for (std::size_t p = 0; p < 6; ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double x;
        check(combent_ensemble_sample_value(ens, s, p, i, &x));
        best = std::min(best, x);
      }
      if (!(best < 1.85)) all_pairs = false;
    }
    if (all_pairs) ++samples_ok;
  }
  combent_ensemble_free(ens);

  CheckList checks;
  checks.add("identical_min_v", vmin_ident, 1.70, 1.80);
  checks.add("samples_with_all_pairs_below_1.85", samples_ok, 9, 10);

  json summary;
  summary["preset"] = "fig2";
  summary["identical_min_v"] = vmin_ident;
  summary["samples_with_all_pairs_below_1.85"] = samples_ok;
  summary["seed"] = seed;
  summary["checks"] = checks.entries;
  summary["pass"] = checks.all_pass;
  auto out = open_out(dir + "/fig2_summary.json");
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back(dir + "/fig2_summary.json");
  ctx.extra["seed"] = seed;
  write_manifest(ctx, dir + "/fig2_summary.json");
  return checks.all_pass ? 0 : 3;
}

int preset_fig3(const std::string& dir, uint64_t seed, RunContext& ctx) {
  const double om = 0.1;
  const std::vector<double> g_over_om = {0.02, 0.05, 0.08, 0.1, 0.2, 0.3, 0.4};
  const auto grid = linspace(0.01 * om, 2.5 * om, 2001);

  auto curves = open_out(dir + "/fig3_curves.csv");
  curves << "g_over_omega_m,omega,omega_over_omega_m,v\n";
  json minima = json::array();
  double v_at_104_g01 = 0.0, vmin_g04 = 0.0;
  ConfigHandle cfg_g01;
  for (double gf : g_over_om) {
    const std::string cfg_json =
        identical_config_json(10, om, 1e6, 1e3, gf * om, 1.0, 0.0, -kPi / 4);
    ConfigHandle cfg;
    parse_config_text(cfg_json, cfg);
    std::vector<double> v(grid.size() * 45);
    check(combent_variance_grid(cfg.get(), grid.data(), grid.size(), COMBENT_ROUTE_FULL,
                                v.data(), nullptr));
    double best = std::numeric_limits<double>::infinity(), best_w = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      curves << fmt(gf) << ',' << fmt(grid[i]) << ',' << fmt(grid[i] / om) << ','
             << fmt(v[i * 45]) << "\n";
      if (v[i * 45] < best) {
        best = v[i * 45];
        best_w = grid[i] / om;
      }
    }
    minima.push_back({{"g_over_omega_m", gf}, {"v_min", best}, {"omega_opt_over_omega_m", best_w}});
    if (gf == 0.1) {
      double vv;
      check(combent_duan_variance(cfg.get(), 0, 1, 1.04 * om, COMBENT_ROUTE_FULL, &vv, nullptr));
      v_at_104_g01 = vv;
      cfg_g01.ptr = cfg.ptr;
      cfg.ptr = nullptr;  // keep alive for the ensemble below
    }
    if (gf == 0.4) vmin_g04 = best;
  }
  ctx.outputs.push_back(dir + "/fig3_curves.csv");
  ctx.cfg = cfg_g01.get();

  // variance matrix at 1.04 Omega_m for G = 0.1 Omega_m
  std::vector<double> vm(100);
  check(combent_variance_matrix(cfg_g01.get(), 1.04 * om, vm.data()));
  auto mout = open_out(dir + "/fig3_matrix.csv");
  mout << "j";
  for (int l = 0; l < 10; ++l) mout << ",l" << l;
  mout << "\n";
  for (int j = 0; j < 10; ++j) {
    mout << j;
    for (int l = 0; l < 10; ++l) mout << ',' << fmt(vm[static_cast<std::size_t>(j) * 10 + l]);
    mout << "\n";
  }
  ctx.outputs.push_back(dir + "/fig3_matrix.csv");

  // S=100 ensemble at omega = 1.04 Omega_m
  const double w104 = 1.04 * om;
  combent_ensemble* ens = nullptr;
  check(combent_ensemble_run(cfg_g01.get(), 0.05, seed, 100, 3u, &w104, 1, -kPi / 4, &ens));
  auto eout = open_out(dir + "/fig3_ensemble.csv");
  eout << "j,l,v_min,v_max,v_mean\n";
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < 45; ++p) {
    int j, l;
    check(combent_ensemble_pair(ens, p, &j, &l));
    double lo, hi, mean;
    check(combent_ensemble_stat(ens, COMBENT_STAT_MIN, p, 0, &lo));
    check(combent_ensemble_stat(ens, COMBENT_STAT_MAX, p, 0, &hi));
    check(combent_ensemble_stat(ens, COMBENT_STAT_MEAN, p, 0, &mean));
    worst = std::max(worst, hi);
    eout << j << ',' << l << ',' << fmt(lo) << ',' << fmt(hi) << ',' << fmt(mean) << "\n";
  }
  combent_ensemble_free(ens);
  ctx.outputs.push_back(dir + "/fig3_ensemble.csv");

  CheckList checks;
  checks.add("v_at_1.04_omega_m_g_0.1", v_at_104_g01, 1.85, 1.95);
  checks.add("v_min_g_0.4", vmin_g04, 1.90, 1.93);
  checks.add("ensemble_max_pair_variance", worst, 0.0, 2.0);

  json summary;
  summary["preset"] = "fig3";
  summary["v_at_1.04_omega_m_g_0.1"] = v_at_104_g01;
  summary["v_min_g_0.4"] = vmin_g04;
  summary["minima_vs_g"] = minima;
  summary["ensemble_max_pair_variance"] = worst;
  summary["seed"] = seed;
  summary["checks"] = checks.entries;
  summary["pass"] = checks.all_pass;
  auto out = open_out(dir + "/fig3_summary.json");
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back(dir + "/fig3_summary.json");
  ctx.extra["seed"] = seed;
  write_manifest(ctx, dir + "/fig3_summary.json");
  return checks.all_pass ? 0 : 3;
}

int preset_optical(const std::string& dir, RunContext& ctx) {
  // kappa/2pi = 1 MHz, Omega_m/2pi = 134 kHz -> Omega_m = 0.134 kappa
  const double om = 0.134;
  const std::string cfg_json =
      identical_config_json(10, om, 4e6, 8e3, 0.1 * om, 1.0, 0.0, -kPi / 4);
  ConfigHandle cfg;
  parse_config_text(cfg_json, cfg);
  ctx.cfg = cfg.get();
  const auto grid = linspace(0.5 * om, 1.5 * om, 8001);
  std::vector<double> v(grid.size() * 45);
  check(combent_variance_grid(cfg.get(), grid.data(), grid.size(), COMBENT_ROUTE_FULL,
                              v.data(), nullptr));
  double vmin = std::numeric_limits<double>::infinity(), wopt = 0.0;
  std::vector<double> pair01(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pair01[i] = v[i * 45];
    if (pair01[i] < vmin) {
      vmin = pair01[i];
      wopt = grid[i] / om;
    }
  }
  write_curve_csv(dir + "/experiment_optical_curve.csv", grid, om, {{"v", &pair01}}, ctx);

  double n_cav = 0.0;
  const double kappa_rad = 2.0 * kPi * 1e6;
  check(combent_photon_number(80e-6, 1064e-9, kappa_rad, 0.0, 0.0, &n_cav));

  CheckList checks;
  checks.add("v_min", vmin, 1.86, 1.92);
  checks.add("omega_opt_over_omega_m", wopt, 1.032, 1.072);
  checks.add("photon_number", n_cav, 1.4e8 * 0.9, 1.4e8 * 1.1);

  json summary;
  summary["preset"] = "experiment-optical";
  summary["v_min"] = vmin;
  summary["omega_opt_over_omega_m"] = wopt;
  summary["photon_number"] = n_cav;
  summary["checks"] = checks.entries;
  summary["pass"] = checks.all_pass;
  auto out = open_out(dir + "/experiment_optical_summary.json");
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back(dir + "/experiment_optical_summary.json");
  write_manifest(ctx, dir + "/experiment_optical_summary.json");
  return checks.all_pass ? 0 : 3;
}

int preset_microwave(const std::string& dir, RunContext& ctx) {
  // Omega_m/kappa = 0.25; the reference microwave resonator is overcoupled,
  // kappa_e = 0.75 kappa. Largest two-mode violation sits near theta = pi/2.
  const double om = 0.25;
  const std::string cfg_json =
      identical_config_json(2, om, 1e7, 2.2e3, 0.1 * om, 0.75, 0.25, kPi / 2);
  ConfigHandle cfg;
  parse_config_text(cfg_json, cfg);
  ctx.cfg = cfg.get();

  std::vector<double> grid;
  for (double x : linspace(0.80, 0.999, 400)) grid.push_back(x * om);
  for (double x : linspace(0.999, 1.001, 2001)) grid.push_back(x * om);
  for (double x : linspace(1.001, 1.20, 400)) grid.push_back(x * om);
  const auto thetas = linspace(0.40 * kPi, 0.60 * kPi, 81);

  double vmin, wopt, topt;
  int j, l;
  check(combent_scan_minimum(cfg.get(), grid.data(), grid.size(), thetas.data(),
                             thetas.size(), &vmin, &wopt, &topt, &j, &l));

  CheckList checks;
  checks.add("v_min", vmin, 1.2, 1.4);

  json summary;
  summary["preset"] = "experiment-microwave";
  summary["v_min"] = vmin;
  summary["omega_opt_over_omega_m"] = wopt / om;
  summary["theta_opt"] = topt;
  summary["checks"] = checks.entries;
  summary["pass"] = checks.all_pass;
  auto out = open_out(dir + "/experiment_microwave_summary.json");
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back(dir + "/experiment_microwave_summary.json");
  write_manifest(ctx, dir + "/experiment_microwave_summary.json");
  return checks.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Quadrature noise correlations and multicolor CV entanglement for a "
               "comb-driven multimode optomechanical cavity"};
  app.require_subcommand(1);

  std::string config_path, out_path, pairs_text = "all", route_name = "full";
  double wmin = 0.01, wmax = 2.5;
  int wpoints = 2001;
  std::optional<double> theta, matrix_at;
  double sigma = 0.05;
  uint32_t samples = 10;
  uint64_t seed = 2;

  auto add_grid = [&](CLI::App* c) {
    c->add_option("--omega-min", wmin, "grid start, in units of Omega_m");
    c->add_option("--omega-max", wmax, "grid end, in units of Omega_m");
    c->add_option("--omega-points", wpoints, "grid size")->check(CLI::PositiveNumber);
    c->add_option("--theta", theta, "override the config's quadrature angle (radians)");
  };

  auto* spectrum = app.add_subcommand("spectrum", "XX/YY correlation spectra");
  spectrum->add_option("config", config_path)->required();
  add_grid(spectrum);
  spectrum->add_option("--pairs", pairs_text, "'all' or 'j,l;j,l;...'");
  spectrum->add_option("--route", route_name, "full|simplified|oracle");
  spectrum->add_option("--out", out_path)->required();

  auto* variance = app.add_subcommand("variance", "Duan variance sums V_jl");
  variance->add_option("config", config_path)->required();
  add_grid(variance);
  variance->add_option("--route", route_name, "full|simplified|oracle");
  variance->add_option("--matrix-at", matrix_at, "also dump the MxM matrix at this omega/Omega_m");
  variance->add_option("--out", out_path)->required();

  auto* ensemble = app.add_subcommand("ensemble", "disorder Monte Carlo envelopes");
  ensemble->add_option("config", config_path)->required();
  add_grid(ensemble);
  ensemble->add_option("--sigma", sigma, "relative std of G_j and kappa_e,j");
  ensemble->add_option("--samples", samples, "sample count");
  ensemble->add_option("--seed", seed, "RNG seed");
  ensemble->add_option("--out", out_path)->required();

  std::string preset, out_dir = ".";
  bool check_flag = false;
  auto* reproduce = app.add_subcommand("reproduce", "figure/experiment reproduction presets");
  reproduce->add_option("preset", preset, "fig1b|fig2|fig3|experiment-optical|experiment-microwave")
      ->required();
  reproduce->add_option("--out-dir", out_dir);
  reproduce->add_option("--seed", seed, "RNG seed for disorder presets");
  reproduce->add_flag("--check", check_flag, "exit nonzero if a reproduction check fails");

  CLI11_PARSE(app, argc, argv);

  RunContext ctx;
  {
    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    ctx.command_line = cmd.str();
  }

  try {
    if (*spectrum)
      return cmd_spectrum(config_path, wmin, wmax, wpoints, theta, pairs_text, route_name,
                          out_path, ctx);
    if (*variance)
      return cmd_variance(config_path, wmin, wmax, wpoints, theta, route_name, matrix_at,
                          out_path, ctx);
    if (*ensemble)
      return cmd_ensemble(config_path, sigma, samples, seed, wmin, wmax, wpoints, theta,
                          out_path, ctx);
    if (*reproduce) {
      fs::create_directories(out_dir);
      int rc = 0;
      if (preset == "fig1b")
        rc = preset_fig1b(out_dir, ctx);
      else if (preset == "fig2")
        rc = preset_fig2(out_dir, seed, ctx);
      else if (preset == "fig3")
        rc = preset_fig3(out_dir, seed, ctx);
      else if (preset == "experiment-optical")
        rc = preset_optical(out_dir, ctx);
      else if (preset == "experiment-microwave")
        rc = preset_microwave(out_dir, ctx);
      else
        die("unknown preset '" + preset + "'");
      return check_flag ? rc : 0;
    }
  } catch (const std::exception& e) {
    die(e.what());
  }
  return 0;
}
