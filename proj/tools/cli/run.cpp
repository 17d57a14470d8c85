#include "run.hpp"

#include "effeq/chm_cluster.hpp"
#include "effeq/errors.hpp"
#include "effeq/random.hpp"
#include "effeq/resonance.hpp"
#include "effeq/snapshot.hpp"
#include "effeq/stats.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace effeq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha1_hex(std::string_view content) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_sha1(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob.append(content);
  return sha1_hex(blob);
}

namespace {

// Shortest round-trip representation; identical bytes for identical doubles.
std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json vec_json(const WaveVector& k) {
  json a = json::array();
  for (int c : k.components()) a.push_back(c);
  return a;
}

// Collects artifacts of one run and writes them with their digests.
class RunDir {
 public:
  explicit RunDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& path() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    outputs_.push_back({{"path", name}, {"sha1", sha1_hex(content)}, {"bytes", content.size()}});
  }

  const json& outputs() const { return outputs_; }

 private:
  fs::path dir_;
  json outputs_ = json::array();
};

std::string k_header(int dim) {
  std::string h;
  for (int i = 0; i < dim; ++i) h += ",k" + std::to_string(i);
  return h;
}

std::string k_columns(const WaveVector& k) {
  std::string s;
  for (int c : k.components()) s += "," + std::to_string(c);
  return s;
}

std::vector<ResonantTuple> resonant_tuples(const RunConfig& c, FrequencyFilter filter = FrequencyFilter::Resonant) {
  if (c.model.type == "nls")
    return enumerate_nls_quadruples(c.model.dim, c.numeric.cutoff, {c.numeric.max_pairs}, filter);
  const Rational rho = parse_rational(c.model.rho);
  return enumerate_chm_triads(rho * rho, parse_rational(c.model.froude), c.numeric.cutoff);
}

// ---- resonances ----

void cmd_resonances(const RunConfig& c, RunDir& dir, json& results) {
  if (c.model.type == "chm" && c.resonances.filter == "all")
    throw ConfigError("/resonances/filter", "'all' is only available for the NLS model");
  const auto filter = c.resonances.filter == "all" ? FrequencyFilter::All : FrequencyFilter::Resonant;
  const auto tuples = resonant_tuples(c, filter);
  std::string lines;
  std::map<std::string, std::size_t> by_kind;
  std::size_t vanishing = 0;
  for (const auto& t : tuples) {
    json row;
    row["inputs"] = json::array();
    for (const auto& k : t.inputs) row["inputs"].push_back(vec_json(k));
    row["outputs"] = json::array();
    for (const auto& k : t.outputs) row["outputs"].push_back(vec_json(k));
    row["kind"] = to_string(t.kind);
    row["vanishing"] = t.vanishing_coefficient;
    lines += row.dump() + "\n";
    ++by_kind[to_string(t.kind)];
    if (t.vanishing_coefficient) ++vanishing;
  }
  dir.write("tuples.jsonl", lines);
  results["count"] = tuples.size();
  results["vanishing"] = vanishing;
  results["by_kind"] = by_kind;

  if (c.model.type == "chm") {
    const Rational rho = parse_rational(c.model.rho);
    const Rational F = parse_rational(c.model.froude);
    results["typical"] = is_typical(rho * rho, F, c.numeric.cutoff);
    if (c.resonances.exceptional) {
      const auto ex = exceptional_rhos(F, c.numeric.cutoff);
      std::string csv = "rho_squared,value,k1_m,k1_n,k2_m,k2_n,k_m,k_n\n";
      for (const auto& r : ex.roots) {
        csv += "\"" + r.rho_squared.to_string() + "\"," + num(r.rho_squared.to_double()) + "," +
               std::to_string(r.k1.m()) + "," + std::to_string(r.k1.n()) + "," + std::to_string(r.k2.m()) + "," +
               std::to_string(r.k2.n()) + "," + std::to_string(r.k.m()) + "," + std::to_string(r.k.n()) + "\n";
      }
      dir.write("exceptional.csv", csv);
      results["exceptional_roots"] = ex.roots.size();
      results["exceptional_distinct"] = ex.distinct_values().size();
    }
  }
}

// ---- clusters ----

void cmd_clusters(const RunConfig& c, RunDir& dir, json& results) {
  const auto p = model_params(c);
  const auto part = clusters(resonant_tuples(c), p.box(), {c.model.type == "chm"});
  std::string lines;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < part.cluster_count(); ++i) {
    json row{{"cluster", i}, {"size", part.cluster_size(i)}};
    row["members"] = json::array();
    for (const auto& k : part.members(i)) row["members"].push_back(vec_json(k));
    row["catalysts"] = json::array();
    for (const auto& k : part.catalysts(i)) row["catalysts"].push_back(vec_json(k));
    lines += row.dump() + "\n";
    largest = std::max(largest, part.cluster_size(i));
  }
  dir.write("clusters.jsonl", lines);
  json hist = json::object();
  for (const auto& [size, count] : part.size_histogram()) hist[std::to_string(size)] = count;
  results["cluster_count"] = part.cluster_count();
  results["largest"] = largest;
  results["size_histogram"] = hist;
  results["conjugates_identified"] = part.conjugates_identified();
}

// ---- simulate / moments ----

struct SimulationSetup {
  ModelParams params;
  std::vector<ResonantTuple> tuples;
  SemilinearSystem system;
  FieldState initial;
  IntegratorConfig integrator;
};

SimulationSetup simulation_setup(const RunConfig& c, const std::vector<InputRecord>& inputs) {
  SimulationSetup s;
  s.params = model_params(c);
  const auto& sim = c.simulate;
  if (sim.system == "effective") {
    s.tuples = active_tuples(resonant_tuples(c));
    s.system = effective_system(s.params, EffectiveNonlinearity(s.params, s.tuples));
  } else if (sim.system == "original") {
    s.system = original_system(s.params);
  } else {
    s.system = interaction_system(s.params);
  }
  s.initial = zero_state(s.params);
  if (sim.initial.kind == "random") {
    // Dedicated stream, disjoint from the noise streams of the trajectories.
    PhiloxEngine rng(c.numeric.seed, 0xffff'ffff'ffff'ffffull);
    for (auto& z : s.initial.amp) z = sim.initial.scale * Complex(rng.normal(), rng.normal());
    if (s.initial.real) s.initial.enforce_reality();
  } else if (sim.initial.kind == "file") {
    std::string text;
    for (const auto& in : inputs)
      if (in.name == sim.initial.path) text = in.content;
    const auto snap = read_snapshot(text);
    if (!(snap.state.box == s.params.box()))
      throw ConfigError("/simulate/initial/path", "snapshot box does not match the configured model and cutoff");
    s.initial = snap.state;
  }
  s.integrator = {parse_scheme(sim.scheme), sim.dt, sim.t_final, sim.record_stride};
  return s;
}

EnsembleResult run_ensemble(const RunConfig& c, const SimulationSetup& s, bool keep_states) {
  return ensemble({s.initial}, s.system, s.integrator,
                  {c.simulate.trajectories, c.numeric.seed, c.numeric.workers, keep_states});
}

void cmd_simulate(const RunConfig& c, const std::vector<InputRecord>& inputs, RunDir& dir, json& results) {
  const auto s = simulation_setup(c, inputs);
  const auto ens = run_ensemble(c, s, c.simulate.raw_actions);
  const LatticeBox box = s.params.box();
  std::string csv = "record,tau,mode" + k_header(box.dim()) + ",mean_action,stderr_action\n";
  for (std::size_t r = 0; r < ens.times.size(); ++r) {
    const auto se = ens.stderr_action(r);
    for (std::size_t i = 0; i < box.size(); ++i) {
      csv += std::to_string(r) + "," + num(ens.times[r]) + "," + std::to_string(i) + k_columns(box.vector(i)) + "," +
             num(ens.mean_action[r][i]) + "," + num(se[i]) + "\n";
    }
  }
  dir.write("actions.csv", csv);
  if (c.simulate.raw_actions) {
    std::string raw = "trajectory,record,tau,mode,action\n";
    for (std::size_t t = 0; t < ens.states.size(); ++t)
      for (std::size_t r = 0; r < ens.states[t].size(); ++r)
        for (std::size_t i = 0; i < box.size(); ++i)
          raw += std::to_string(t) + "," + std::to_string(r) + "," + num(ens.times[r]) + "," + std::to_string(i) +
                 "," + num(action(ens.states[t][r][i])) + "\n";
    dir.write("raw_actions.csv", raw);
    FieldState last(box, s.initial.real);
    last.amp = ens.states.front().back();
    last.tau = s.initial.tau + ens.times.back();
    dir.write("final_state.json", write_snapshot(last, model_name(s.params.model)));
  }
  results["records"] = ens.times.size();
  results["trajectories"] = ens.trajectories;
  results["modes"] = box.size();
  results["tuples"] = s.tuples.size();
  results["steps"] = s.integrator.step_count();
}

void cmd_moments(const RunConfig& c, const std::vector<InputRecord>& inputs, RunDir& dir, json& results) {
  if (c.simulate.trajectories < 2) throw ConfigError("/simulate/trajectories", "moments need at least 2 trajectories");
  const auto s = simulation_setup(c, inputs);
  const auto ens = run_ensemble(c, s, true);
  const LatticeBox box = s.params.box();
  std::vector<WaveVector> modes;
  for (std::size_t i = 0; i < box.size(); ++i) modes.push_back(box.vector(i));

  const bool chain2 = c.moments.chain2 && c.model.type == "nls" && c.simulate.system == "effective";
  std::vector<MomentIndex> indices;
  if (chain2) {
    indices = chain2_indices(modes, s.tuples);
  } else {
    for (const auto& k : modes) indices.push_back(action_moment(k));
  }
  std::vector<MomentTable> tables;
  for (std::size_t r = 0; r < ens.times.size(); ++r) {
    std::vector<ComplexVector> samples;
    samples.reserve(ens.states.size());
    for (const auto& traj : ens.states) samples.push_back(traj[r]);
    tables.push_back(estimate_moments(samples, box, indices));
  }

  std::string csv = "record,tau,mode" + k_header(box.dim()) + ",second_moment,stderr\n";
  for (std::size_t r = 0; r < tables.size(); ++r)
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& e = tables[r].at(action_moment(modes[i]));
      csv += std::to_string(r) + "," + num(ens.times[r]) + "," + std::to_string(i) + k_columns(modes[i]) + "," +
             num(e.value.real()) + "," + num(e.stderr_re) + "\n";
    }
  dir.write("moments.csv", csv);

  if (chain2 && tables.size() >= 3) {
    const double h = ens.times[1] - ens.times[0];
    std::string out = "record,tau,mode" + k_header(box.dim()) + ",derivative,rhs,residual,stderr\n";
    double worst = 0.0;
    for (std::size_t r = 1; r + 1 < tables.size(); ++r) {
      const auto res = chain2_residual(tables[r - 1], tables[r], tables[r + 1], h, s.params, s.tuples, modes);
      for (std::size_t i = 0; i < res.size(); ++i) {
        out += std::to_string(r) + "," + num(ens.times[r]) + "," + std::to_string(i) + k_columns(res[i].k) + "," +
               num(res[i].derivative) + "," + num(res[i].rhs) + "," + num(res[i].residual) + "," +
               num(res[i].stderr) + "\n";
        if (res[i].stderr > 0.0) worst = std::max(worst, std::abs(res[i].residual) / res[i].stderr);
      }
    }
    dir.write("chain2.csv", out);
    results["chain2_max_abs_z"] = worst;
  }
  results["chain2"] = chain2 ? "checked" : "skipped (needs the NLS effective system)";
  results["records"] = ens.times.size();
  results["trajectories"] = ens.trajectories;
}

// ---- chm-oracle ----

void cmd_chm_oracle(const RunConfig& c, RunDir& dir, json& results) {
  if (c.model.type != "chm") throw ConfigError("/model/type", "chm-oracle needs the chm model");
  const auto& o = c.chm_oracle;
  const WaveVector k{o.mode[0], o.mode[1]};
  const WaveVector kbar{o.mode[0], -o.mode[1]};
  const WaveVector cat{0, 2 * o.mode[1]};
  if (o.mode[0] == 0 || o.mode[1] == 0) throw ConfigError("/chm_oracle/mode", "needs m != 0 and n != 0");
  auto p = model_params(c);
  if (!p.box().contains(k) || !p.box().contains(cat))
    throw ConfigError("/numeric/cutoff", "the box does not contain the mode and its catalyst");
  const Rational rho = parse_rational(c.model.rho);
  const Rational F = parse_rational(c.model.froude);
  const auto cp = coupling(k, rho, F);
  const Cluster3State init{{o.a_k[0], o.a_k[1]}, {o.a_kbar[0], o.a_kbar[1]}, {o.a_c[0], o.a_c[1]},
                           effective_coupling_factor(rho) * cp.value};
  results["coupling"] = init.coupling;
  results["frozen"] = cp.frozen || std::abs(init.a_c) == 0.0;
  const double T = period(init);
  results["period"] = std::isfinite(T) ? json(T) : json("inf");

  // Undamped effective flow of the full box started on the triple.
  auto sys = effective_system(p, EffectiveNonlinearity(p, active_tuples(resonant_tuples(c))));
  std::fill(sys.linear.begin(), sys.linear.end(), Complex(0.0));
  FieldState s(p.box(), true);
  s.set(k, init.a_k);
  s.set(kbar, init.a_kbar);
  s.set(cat, init.a_c);
  const double dt = std::isfinite(T) ? T / static_cast<double>(o.steps_per_period) : 1.0 / o.steps_per_period;
  const auto steps = static_cast<std::uint64_t>(std::llround(o.periods * static_cast<double>(o.steps_per_period)));
  const auto traj = simulate(s, sys, {Scheme::Rk4, dt, static_cast<double>(steps) * dt, 1}, {});

  std::string csv =
      "step,t,closed_k_re,closed_k_im,closed_kbar_re,closed_kbar_im,rk4_k_re,rk4_k_im,rk4_kbar_re,rk4_kbar_im,error\n";
  double sup = 0.0, drift = 0.0;
  const double pair0 = std::norm(init.a_k) + std::norm(init.a_kbar);
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& rec = traj.records[i];
    const double t = rec.tau - s.tau;
    const auto ex = closed_form(init, t).state;
    const double err = std::max(std::abs(rec.at(k) - ex.a_k), std::abs(rec.at(kbar) - ex.a_kbar));
    sup = std::max(sup, err);
    drift = std::max(drift, std::abs(std::norm(rec.at(k)) + std::norm(rec.at(kbar)) - pair0));
    csv += std::to_string(i) + "," + num(t) + "," + num(ex.a_k.real()) + "," + num(ex.a_k.imag()) + "," +
           num(ex.a_kbar.real()) + "," + num(ex.a_kbar.imag()) + "," + num(rec.at(k).real()) + "," +
           num(rec.at(k).imag()) + "," + num(rec.at(kbar).real()) + "," + num(rec.at(kbar).imag()) + "," + num(err) +
           "\n";
  }
  dir.write("oracle.csv", csv);
  results["sup_error"] = sup;
  results["pair_invariant_drift"] = drift;
  results["dt"] = dt;
  results["steps"] = steps;
}

// ---- kinetic ----

void cmd_kinetic(const RunConfig& c, RunDir& dir, json& results) {
  const auto& kc = c.kinetic;
  const auto p = kinetic_params(c);
  if (kc.task == "scan") {
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((kc.exponent_max - kc.exponent_min) / kc.exponent_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(kc.exponent_min + static_cast<double>(i) * kc.exponent_step);
    const auto scan = stationarity_scan(grid, p);
    std::string csv = "exponent,estimate,stderr\n";
    for (const auto& pt : scan.points) csv += num(pt.exponent) + "," + num(pt.estimate) + "," + num(pt.stderr) + "\n";
    dir.write("scan.csv", csv);
    const auto ex = power_law_exponents(kc.dim, kc.damping_exponent);
    results["roots"] = scan.roots;
    results["inconclusive"] = scan.inconclusive;
    results["reference_k"] = scan.reference_k;
    results["phi"] = scan.phi;
    results["phi_bounds"] = {scan.bounds.lower, scan.bounds.upper};
    results["predicted"] = {{"flux_action", ex.flux_action},
                            {"flux_energy", ex.flux_energy},
                            {"equilibria", ex.equilibria}};
    results["nearest_root_flux_action"] = nearest_root(scan, ex.flux_action);
    results["nearest_root_flux_energy"] = nearest_root(scan, ex.flux_energy);
  } else if (kc.task == "collision") {
    const auto n = Spectrum::power_law(kc.spectrum_scale, kc.spectrum_exponent, p.annulus);
    const auto e = collision_integral(n, radial_point(kc.k), p);
    dir.write("collision.csv", "k,exponent,value,stderr,samples\n" + num(kc.k) + "," + num(kc.spectrum_exponent) +
                                   "," + num(e.value) + "," + num(e.stderr) + "," + std::to_string(e.samples) + "\n");
    results["value"] = e.value;
    results["stderr"] = e.stderr;
  } else {
    std::vector<double> radii, values;
    const double step = std::log(kc.k_max / kc.k_min) / static_cast<double>(kc.grid_points - 1);
    for (std::uint64_t i = 0; i < kc.grid_points; ++i) {
      const double r = i + 1 == kc.grid_points ? kc.k_max : kc.k_min * std::exp(step * static_cast<double>(i));
      radii.push_back(r);
      values.push_back(kc.spectrum_scale * std::pow(r, kc.spectrum_exponent));
    }
    const auto traj =
        integrate_kinetic(Spectrum::tabulated(radii, values), p, kc.t_final, kc.dt, kc.record_stride);
    std::string csv = "record,tau,k,n\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r)
      for (std::size_t i = 0; i < traj.radii.size(); ++i)
        csv += std::to_string(r) + "," + num(traj.times[r]) + "," + num(traj.radii[i]) + "," +
               num(traj.values[r][i]) + "\n";
    dir.write("spectrum.csv", csv);
    results["clip_events"] = traj.clip_events;
    results["unresolved"] = traj.unresolved;
    results["final_residual"] = traj.final_residual;
  }
}

json input_hashes(const std::vector<InputRecord>& inputs, const json& resolved) {
  json out = json::array();
  out.push_back({{"name", "resolved-config"}, {"sha1", git_blob_sha1(resolved.dump(2))}});
  for (const auto& in : inputs) out.push_back({{"name", in.name}, {"sha1", git_blob_sha1(in.content)}});
  return out;
}

void write_manifest(const fs::path& dir, json manifest) {
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
}

}  // namespace

int run(const RunConfig& config, const std::vector<InputRecord>& inputs, std::ostream& log) {
  const json resolved = to_json(config);
  json manifest{{"tool", "effeq"},
                {"version", EFFEQ_VERSION},
                {"subcommand", to_string(config.command)},
                {"config", resolved},
                {"inputs", input_hashes(inputs, resolved)}};
  json results = json::object();
  int code = kOk;
  std::string error;
  fs::path out_dir = config.out;
  json outputs = json::array();
  try {
    RunDir dir(out_dir);
    try {
      switch (config.command) {
        case Command::Resonances: cmd_resonances(config, dir, results); break;
        case Command::Clusters: cmd_clusters(config, dir, results); break;
        case Command::Simulate: cmd_simulate(config, inputs, dir, results); break;
        case Command::Moments: cmd_moments(config, inputs, dir, results); break;
        case Command::ChmOracle: cmd_chm_oracle(config, dir, results); break;
        case Command::Kinetic: cmd_kinetic(config, dir, results); break;
      }
    } catch (const SimulationFailure& e) {
      dir.write("failure_state.json", write_snapshot(e.last_good(), config.model.type));
      outputs = dir.outputs();
      throw;
    }
    outputs = dir.outputs();
  } catch (const ConfigError& e) {
    code = kConfigError;
    error = e.what();
    manifest["error_path"] = e.path();
  } catch (const std::invalid_argument& e) {
    code = kConfigError;
    error = e.what();
  } catch (const std::out_of_range& e) {
    code = kConfigError;
    error = e.what();
  } catch (const std::exception& e) {
    code = kNumericError;
    error = e.what();
  }
  manifest["outputs"] = outputs;
  manifest["results"] = results;
  manifest["status"] = code == kOk ? "ok" : (code == kConfigError ? "config-error" : "numeric-error");
  manifest["exit_code"] = code;
  if (!error.empty()) {
    manifest["error"] = error;
    log << "effeq " << to_string(config.command) << ": " << error << "\n";
  }
  try {
    write_manifest(out_dir, manifest);
  } catch (const std::exception& e) {
    log << "effeq: cannot write manifest: " << e.what() << "\n";
    if (code == kOk) code = kNumericError;
  }
  return code;
}

// ---- report ----

namespace {

using Table = std::vector<std::vector<std::string>>;

// Minimal reader for the CSV files written above (no quoted commas).
Table read_csv(const fs::path& path, std::vector<std::string>& header) {
  std::istringstream in(read_file(path));
  std::string line;
  Table rows;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      header = cells;
      first = false;
    } else if (!cells.empty()) {
      rows.push_back(std::move(cells));
    }
  }
  if (header.empty()) throw std::invalid_argument(path.string() + " is empty");
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name, const fs::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument(path.string() + " has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string scan_table(const fs::path& path) {
  std::vector<std::string> h;
  auto rows = read_csv(path, h);
  const auto ce = column(h, "exponent", path), cv = column(h, "estimate", path), cs = column(h, "stderr", path);
  std::sort(rows.begin(), rows.end(),
            [&](const auto& a, const auto& b) { return std::stod(a[ce]) < std::stod(b[ce]); });
  std::string out = "exponent,estimate,stderr,sign\n";
  for (const auto& r : rows) {
    const double v = std::stod(r[cv]), s = std::stod(r[cs]);
    const int sign = std::abs(v) <= 2.0 * s ? 0 : (v > 0 ? 1 : -1);
    out += r[ce] + "," + r[cv] + "," + r[cs] + "," + std::to_string(sign) + "\n";
  }
  return out;
}

// Per-(record, mode) mean and standard error, recomputed from raw actions.
std::string action_summary(const fs::path& path) {
  std::vector<std::string> h;
  const auto rows = read_csv(path, h);
  const auto cr = column(h, "record", path), ct = column(h, "tau", path), cm = column(h, "mode", path),
             ca = column(h, "action", path);
  struct Acc {
    std::string tau;
    std::vector<double> x;
  };
  std::map<std::pair<long, long>, Acc> acc;
  for (const auto& r : rows) {
    auto& a = acc[{std::stol(r[cr]), std::stol(r[cm])}];
    a.tau = r[ct];
    a.x.push_back(std::stod(r[ca]));
  }
  std::string out = "record,tau,mode,mean_action,stderr_action,samples\n";
  for (const auto& [key, a] : acc) {
    const double n = static_cast<double>(a.x.size());
    double mean = 0.0;
    for (double v : a.x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : a.x) ss += (v - mean) * (v - mean);
    const double se = a.x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    out += std::to_string(key.first) + "," + a.tau + "," + std::to_string(key.second) + "," + num(mean) + "," +
           num(se) + "," + std::to_string(a.x.size()) + "\n";
  }
  return out;
}

// Initial and final spectrum side by side.
std::string spectrum_table(const fs::path& path) {
  std::vector<std::string> h;
  const auto rows = read_csv(path, h);
  const auto cr = column(h, "record", path), ck = column(h, "k", path), cn = column(h, "n", path);
  long last = 0;
  for (const auto& r : rows) last = std::max(last, std::stol(r[cr]));
  std::map<double, std::pair<std::string, std::string>> by_k;
  for (const auto& r : rows) {
    const long rec = std::stol(r[cr]);
    if (rec == 0) by_k[std::stod(r[ck])].first = r[cn];
    if (rec == last) by_k[std::stod(r[ck])].second = r[cn];
  }
  std::string out = "k,n_initial,n_final\n";
  for (const auto& [k, v] : by_k) out += num(k) + "," + v.first + "," + v.second + "\n";
  return out;
}

}  // namespace

int report(const fs::path& dir, std::ostream& log) {
  try {
    if (!fs::is_directory(dir)) throw std::invalid_argument("run directory " + dir.string() + " does not exist");
    RunDir out(dir);
    bool any = false;
    if (fs::exists(dir / "scan.csv")) {
      out.write("scan_table.csv", scan_table(dir / "scan.csv"));
      any = true;
    }
    if (fs::exists(dir / "raw_actions.csv")) {
      out.write("action_summary.csv", action_summary(dir / "raw_actions.csv"));
      any = true;
    }
    if (fs::exists(dir / "spectrum.csv")) {
      out.write("spectrum_table.csv", spectrum_table(dir / "spectrum.csv"));
      any = true;
    }
    if (!any)
      throw std::invalid_argument("no artifacts to report in " + dir.string() +
                                  " (expected scan.csv, raw_actions.csv or spectrum.csv)");
    std::ofstream m(dir / "report_manifest.json", std::ios::binary | std::ios::trunc);
    m << json{{"tool", "effeq"}, {"version", EFFEQ_VERSION}, {"outputs", out.outputs()}}.dump(2) << "\n";
    return kOk;
  } catch (const std::invalid_argument& e) {
    log << "effeq report: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    log << "effeq report: " << e.what() << "\n";
    return kNumericError;
  }
}

// ---- command line ----

namespace {

const char* describe(Command c) {
  switch (c) {
    case Command::Resonances: return "Enumerate resonant tuples (and exceptional CHM aspect ratios)";
    case Command::Clusters: return "Partition the box into resonance clusters";
    case Command::Simulate: return "Integrate an ensemble of trajectories";
    case Command::ChmOracle: return "Closed-form solution of a catalytic CHM cluster";
    case Command::Kinetic: return "Collision integrals, exponent scans and kinetic relaxation";
    case Command::Moments: return "Ensemble moments and second-moment chain residuals";
  }
  return "";
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective equations for weakly nonlinear waves on truncated lattices", "effeq"};
  app.set_version_flag("--version", std::string(EFFEQ_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (auto c : {Command::Resonances, Command::Clusters, Command::Simulate, Command::ChmOracle, Command::Kinetic,
                 Command::Moments}) {
    auto* sub = app.add_subcommand(to_string(c), describe(c));
    sub->add_option("--config", config_path, "JSON run configuration")->envname("EFFEQ_CONFIG");
    sub->add_option("--seed", seed, "Base seed (overrides numeric.seed)")->envname("EFFEQ_SEED");
    sub->add_option("--workers", workers, "Worker threads (overrides numeric.workers)")
        ->envname("EFFEQ_WORKERS")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", out_dir, "Output directory (overrides out)")->envname("EFFEQ_OUT");
    subs.emplace_back(to_string(c), sub);
  }
  auto* rep = app.add_subcommand("report", "Aggregate the artifacts of a run directory");
  rep->add_option("dir", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << EFFEQ_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "effeq: " << e.what() << "\n";
    return kConfigError;
  }

  if (rep->parsed()) return report(report_dir, err);

  std::string name;
  CLI::App* sub = nullptr;
  for (const auto& [n, s] : subs)
    if (s->parsed()) {
      name = n;
      sub = s;
    }

  json j = json::object();
  std::vector<InputRecord> inputs;
  std::string fallback_out = RunConfig{}.out;
  try {
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      inputs.push_back({"config:" + fs::path(config_path).filename().string(), text});
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
      }
      if (!j.is_object()) throw ConfigError("/", "expected an object");
    }
    if (j.contains("out") && j["out"].is_string()) fallback_out = j["out"].get<std::string>();
    if (sub->count("--out") > 0) fallback_out = out_dir;
    if (j.contains("subcommand") && j["subcommand"] != name)
      throw ConfigError("/subcommand", "config is for '" + j["subcommand"].dump() + "' but '" + name + "' was invoked");
    j["subcommand"] = name;
    if (sub->count("--seed") > 0) j["numeric"]["seed"] = seed;
    if (sub->count("--workers") > 0) j["numeric"]["workers"] = workers;
    if (sub->count("--out") > 0) j["out"] = out_dir;
    const RunConfig config = parse_config(j);
    if (config.simulate.initial.kind == "file" &&
        (config.command == Command::Simulate || config.command == Command::Moments)) {
      inputs.push_back({config.simulate.initial.path, read_file(config.simulate.initial.path)});
    }
    return run(config, inputs, err);
  } catch (const std::invalid_argument& e) {
    // Configuration rejected before any computation; still leave a manifest.
    err << "effeq " << name << ": " << e.what() << "\n";
    json manifest{{"tool", "effeq"},
                  {"version", EFFEQ_VERSION},
                  {"subcommand", name},
                  {"status", "config-error"},
                  {"exit_code", int(kConfigError)},
                  {"error", e.what()},
                  {"raw_config", j}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) manifest["error_path"] = ce->path();
    json in = json::array();
    for (const auto& r : inputs) in.push_back({{"name", r.name}, {"sha1", git_blob_sha1(r.content)}});
    manifest["inputs"] = in;
    try {
      write_manifest(fallback_out, manifest);
    } catch (const std::exception&) {
    }
    return kConfigError;
  }
}

}  // namespace effeq::cli
