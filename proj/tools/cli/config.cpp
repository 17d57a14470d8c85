#include "config.hpp"

#include "effeq/rational.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace effeq::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Resonances: return "resonances";
    case Command::Clusters: return "clusters";
    case Command::Simulate: return "simulate";
    case Command::ChmOracle: return "chm-oracle";
    case Command::Kinetic: return "kinetic";
    case Command::Moments: return "moments";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (auto c : {Command::Resonances, Command::Clusters, Command::Simulate, Command::ChmOracle, Command::Kinetic,
                 Command::Moments})
    if (to_string(c) == name) return c;
  throw ConfigError("/subcommand", "unknown subcommand '" + name + "'");
}

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
    return x;
  }

  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) throw ConfigError(at(key), "must be > 0");
    return x;
  }

  double non_negative(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x >= 0.0)) throw ConfigError(at(key), "must be >= 0");
    return x;
  }

  std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi)
      throw ConfigError(at(key), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def, std::uint64_t lo) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError(at(key), "expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < lo) throw ConfigError(at(key), "must be >= " + std::to_string(lo));
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) throw ConfigError(at(key), "expected a boolean");
    return j_.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    if (!j_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> options) {
    const std::string s = string(key, def);
    std::string list;
    for (const char* o : options) {
      if (s == o) return s;
      list += std::string(list.empty() ? "" : ", ") + o;
    }
    throw ConfigError(at(key), "must be one of " + list);
  }

  // Exact rational given as a string ("3/2") or an integer.
  std::string rational(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    std::string s;
    if (v.is_number_integer()) {
      s = std::to_string(v.get<std::int64_t>());
    } else if (v.is_string()) {
      s = v.get<std::string>();
    } else {
      throw ConfigError(at(key), "expected a rational as a string such as \"3/2\"");
    }
    try {
      parse_rational(s);
    } catch (const std::exception& e) {
      throw ConfigError(at(key), std::string("not a rational: ") + e.what());
    }
    return s;
  }

  template <std::size_t N, class T>
  std::array<T, N> array(const std::string& key, std::array<T, N> def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() != N) throw ConfigError(at(key), "expected an array of " + std::to_string(N));
    std::array<T, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
      if (!ok) throw ConfigError(at(key) + "/" + std::to_string(i), "wrong element type");
      out[i] = v[i].get<T>();
    }
    return out;
  }

  Reader object(const std::string& key) {
    static const json empty = json::object();
    return has(key) ? Reader(j_.at(key), at(key)) : Reader(empty, at(key));
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Profile read_profile(Reader r, Profile def) {
  Profile p;
  p.scale = r.non_negative("scale", def.scale);
  p.exponent = r.number("exponent", def.exponent);
  r.finish();
  return p;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader root(j, "");
  c.command = parse_command(root.string("subcommand", to_string(c.command)));
  c.out = root.string("out", c.out);
  if (c.out.empty()) throw ConfigError("/out", "must not be empty");

  {
    Reader r = root.object("model");
    c.model.type = r.choice("type", c.model.type, {"nls", "chm"});
    if (c.model.type == "nls") {
      c.model.dim = static_cast<int>(r.integer("dim", c.model.dim, 1, kMaxDim));
      c.model.box_size = r.rational("box_size", c.model.box_size);
      if (!(parse_rational(c.model.box_size) > 0)) throw ConfigError(r.at("box_size"), "must be > 0");
      c.model.delta = r.number("delta", c.model.delta);
    } else {
      c.model.dim = 2;
      c.model.rho = r.rational("rho", c.model.rho);
      if (!(parse_rational(c.model.rho) > 0)) throw ConfigError(r.at("rho"), "must be > 0");
      c.model.froude = r.rational("froude", c.model.froude);
      if (parse_rational(c.model.froude) < 0) throw ConfigError(r.at("froude"), "must be >= 0");
    }
    r.finish();
  }
  {
    Reader r = root.object("numeric");
    auto& n = c.numeric;
    n.cutoff = static_cast<int>(r.integer("cutoff", n.cutoff, 0, 1000));
    n.nu = r.positive("nu", n.nu);
    n.forcing_switch = static_cast<int>(r.integer("forcing_switch", n.forcing_switch, 0, 1));
    n.damping = read_profile(r.object("damping"), n.damping);
    if (!(n.damping.scale > 0.0)) throw ConfigError("/numeric/damping/scale", "must be > 0");
    n.forcing = read_profile(r.object("forcing"), n.forcing);
    n.seed = r.unsigned_integer("seed", n.seed, 0);
    n.workers = static_cast<unsigned>(r.integer("workers", n.workers, 1, 1024));
    n.max_pairs = r.unsigned_integer("max_pairs", n.max_pairs, 1);
    r.finish();
  }
  {
    Reader r = root.object("resonances");
    c.resonances.filter = r.choice("filter", c.resonances.filter, {"resonant", "all"});
    c.resonances.exceptional = r.boolean("exceptional", c.resonances.exceptional);
    r.finish();
  }
  {
    Reader r = root.object("simulate");
    auto& s = c.simulate;
    s.system = r.choice("system", s.system, {"effective", "original", "interaction"});
    s.scheme = r.choice("scheme", s.scheme, {"exponential-euler", "rk4", "if-rk4", "splitting"});
    s.dt = r.positive("dt", s.dt);
    s.t_final = r.non_negative("t_final", s.t_final);
    s.record_stride = r.unsigned_integer("record_stride", s.record_stride, 1);
    s.trajectories = r.unsigned_integer("trajectories", s.trajectories, 1);
    {
      Reader i = r.object("initial");
      s.initial.kind = i.choice("kind", s.initial.kind, {"zero", "random", "file"});
      s.initial.scale = i.non_negative("scale", s.initial.scale);
      s.initial.path = i.string("path", s.initial.path);
      if (s.initial.kind == "file" && s.initial.path.empty()) throw ConfigError(i.at("path"), "required for kind 'file'");
      i.finish();
    }
    s.raw_actions = r.boolean("raw_actions", s.raw_actions);
    r.finish();
  }
  {
    Reader r = root.object("chm_oracle");
    auto& o = c.chm_oracle;
    o.mode = r.array<2, int>("mode", o.mode);
    o.a_k = r.array<2, double>("a_k", o.a_k);
    o.a_kbar = r.array<2, double>("a_kbar", o.a_kbar);
    o.a_c = r.array<2, double>("a_c", o.a_c);
    o.periods = r.positive("periods", o.periods);
    o.steps_per_period = r.unsigned_integer("steps_per_period", o.steps_per_period, 4);
    r.finish();
  }
  {
    Reader r = root.object("kinetic");
    auto& k = c.kinetic;
    k.task = r.choice("task", k.task, {"scan", "collision", "evolve"});
    k.dim = static_cast<int>(r.integer("dim", k.dim, 2, kMaxKineticDim));
    k.damping_scale = r.positive("damping_scale", k.damping_scale);
    k.damping_exponent = r.number("damping_exponent", k.damping_exponent);
    k.forcing_scale = r.non_negative("forcing_scale", k.forcing_scale);
    k.forcing_exponent = r.number("forcing_exponent", k.forcing_exponent);
    k.coupling = r.non_negative("coupling", k.coupling);
    k.phi = r.non_negative("phi", k.phi);
    k.k_min = r.positive("k_min", k.k_min);
    k.k_max = r.positive("k_max", k.k_max);
    if (!(k.k_max > k.k_min)) throw ConfigError(r.at("k_max"), "must exceed k_min");
    k.samples = r.unsigned_integer("samples", k.samples, 1);
    k.exponent_min = r.number("exponent_min", k.exponent_min);
    k.exponent_max = r.number("exponent_max", k.exponent_max);
    k.exponent_step = r.positive("exponent_step", k.exponent_step);
    if (!(k.exponent_max > k.exponent_min)) throw ConfigError(r.at("exponent_max"), "must exceed exponent_min");
    k.k = r.positive("k", k.k);
    k.spectrum_exponent = r.number("spectrum_exponent", k.spectrum_exponent);
    k.spectrum_scale = r.non_negative("spectrum_scale", k.spectrum_scale);
    k.grid_points = r.unsigned_integer("grid_points", k.grid_points, 2);
    k.t_final = r.non_negative("t_final", k.t_final);
    k.dt = r.positive("dt", k.dt);
    k.record_stride = r.unsigned_integer("record_stride", k.record_stride, 1);
    r.finish();
  }
  {
    Reader r = root.object("moments");
    c.moments.chain2 = r.boolean("chain2", c.moments.chain2);
    r.finish();
  }
  root.finish();
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = to_string(c.command);
  j["out"] = c.out;
  if (c.model.type == "nls") {
    j["model"] = {{"type", "nls"}, {"dim", c.model.dim}, {"box_size", c.model.box_size}, {"delta", c.model.delta}};
  } else {
    j["model"] = {{"type", "chm"}, {"rho", c.model.rho}, {"froude", c.model.froude}};
  }
  const auto& n = c.numeric;
  j["numeric"] = {{"cutoff", n.cutoff},
                  {"nu", n.nu},
                  {"forcing_switch", n.forcing_switch},
                  {"damping", {{"scale", n.damping.scale}, {"exponent", n.damping.exponent}}},
                  {"forcing", {{"scale", n.forcing.scale}, {"exponent", n.forcing.exponent}}},
                  {"seed", n.seed},
                  {"workers", n.workers},
                  {"max_pairs", n.max_pairs}};
  j["resonances"] = {{"filter", c.resonances.filter}, {"exceptional", c.resonances.exceptional}};
  const auto& s = c.simulate;
  j["simulate"] = {{"system", s.system},
                   {"scheme", s.scheme},
                   {"dt", s.dt},
                   {"t_final", s.t_final},
                   {"record_stride", s.record_stride},
                   {"trajectories", s.trajectories},
                   {"initial", {{"kind", s.initial.kind}, {"scale", s.initial.scale}, {"path", s.initial.path}}},
                   {"raw_actions", s.raw_actions}};
  const auto& o = c.chm_oracle;
  j["chm_oracle"] = {{"mode", o.mode},         {"a_k", o.a_k},         {"a_kbar", o.a_kbar},
                     {"a_c", o.a_c},           {"periods", o.periods}, {"steps_per_period", o.steps_per_period}};
  const auto& k = c.kinetic;
  j["kinetic"] = {{"task", k.task},
                  {"dim", k.dim},
                  {"damping_scale", k.damping_scale},
                  {"damping_exponent", k.damping_exponent},
                  {"forcing_scale", k.forcing_scale},
                  {"forcing_exponent", k.forcing_exponent},
                  {"coupling", k.coupling},
                  {"phi", k.phi},
                  {"k_min", k.k_min},
                  {"k_max", k.k_max},
                  {"samples", k.samples},
                  {"exponent_min", k.exponent_min},
                  {"exponent_max", k.exponent_max},
                  {"exponent_step", k.exponent_step},
                  {"k", k.k},
                  {"spectrum_exponent", k.spectrum_exponent},
                  {"spectrum_scale", k.spectrum_scale},
                  {"grid_points", k.grid_points},
                  {"t_final", k.t_final},
                  {"dt", k.dt},
                  {"record_stride", k.record_stride}};
  j["moments"] = {{"chain2", c.moments.chain2}};
  return j;
}

ModelParams model_params(const RunConfig& c) {
  Model model;
  if (c.model.type == "nls") {
    model = NlsModel{c.model.dim, parse_rational(c.model.box_size), c.model.delta};
  } else {
    model = ChmModel{parse_rational(c.model.rho), parse_rational(c.model.froude)};
  }
  return make_params(model, c.numeric.cutoff, c.numeric.nu, c.numeric.damping, c.numeric.forcing,
                     c.numeric.forcing_switch);
}

KineticParams kinetic_params(const RunConfig& c) {
  const auto& k = c.kinetic;
  KineticParams p;
  p.dim = k.dim;
  p.damping_scale = k.damping_scale;
  p.damping_exponent = k.damping_exponent;
  p.forcing_scale = k.forcing_scale;
  p.forcing_exponent = k.forcing_exponent;
  p.coupling = k.coupling;
  p.phi = k.phi;
  p.annulus = {k.k_min, k.k_max};
  p.samples = k.samples;
  p.seed = c.numeric.seed;
  p.workers = c.numeric.workers;
  return p;
}

}  // namespace effeq::cli
