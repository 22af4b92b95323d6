#include "mhom/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "mhom/errors.hpp"
#include "mhom/output.hpp"

namespace mhom {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

double to_double(const std::string &v, const std::string &key, int line) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key, line, "expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string &v, const std::string &key, int line) {
  long long x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key, line, "expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string &v, const std::string &key, int line) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key, line, "expected an unsigned integer, got '" + v + "'");
  return x;
}

struct Entry {
  std::string value;
  int line;
};

using Setter = std::function<void(ExperimentConfig &, const std::string &, int)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = {
      {"geometry.radius", [](ExperimentConfig &c, const std::string &v, int l) { c.radius = to_double(v, "geometry.radius", l); }},
      {"geometry.map",
       [](ExperimentConfig &c, const std::string &v, int l) {
         const auto k = parse_map_kind(v);
         if (!k || *k == MapKind::Scaling) throw ConfigError("geometry.map", l, "expected identity, bump or bernoulli");
         c.map = *k;
       }},
      {"geometry.bump_amplitude",
       [](ExperimentConfig &c, const std::string &v, int l) { c.bump_amplitude = to_double(v, "geometry.bump_amplitude", l); }},
      {"conductivity.preset",
       [](ExperimentConfig &c, const std::string &v, int l) {
         if (!conductivity_from_name(v)) throw ConfigError("conductivity.preset", l, "expected identity or anisotropic");
         c.conductivity = v;
       }},
      {"mesh.h", [](ExperimentConfig &c, const std::string &v, int l) { c.h = to_double(v, "mesh.h", l); }},
      {"mesh.membranes",
       [](ExperimentConfig &c, const std::string &v, int l) {
         if (v == "distance") c.membranes = MembraneRule::Distance;
         else if (v == "all") c.membranes = MembraneRule::All;
         else if (v == "none" || v == "off") c.membranes = MembraneRule::None;
         else throw ConfigError("mesh.membranes", l, "expected distance, all or none");
       }},
      {"corrector.delta", [](ExperimentConfig &c, const std::string &v, int l) { c.delta = to_double(v, "corrector.delta", l); }},
      {"corrector.n", [](ExperimentConfig &c, const std::string &v, int l) { c.n = static_cast<int>(to_int(v, "corrector.n", l)); }},
      {"corrector.m", [](ExperimentConfig &c, const std::string &v, int l) { c.m = static_cast<int>(to_int(v, "corrector.m", l)); }},
      {"corrector.directions",
       [](ExperimentConfig &c, const std::string &v, int l) {
         c.directions = split_list(v);
         for (const auto &d : c.directions)
           if (d != "e1" && d != "e2") throw ConfigError("corrector.directions", l, "directions must be e1 and/or e2");
         if (c.directions.empty()) throw ConfigError("corrector.directions", l, "at least one direction is required");
       }},
      {"monte_carlo.master_seed",
       [](ExperimentConfig &c, const std::string &v, int l) { c.master_seed = to_u64(v, "monte_carlo.master_seed", l); }},
      {"monte_carlo.samples",
       [](ExperimentConfig &c, const std::string &v, int l) { c.samples = static_cast<int>(to_int(v, "monte_carlo.samples", l)); }},
      {"monte_carlo.seeds",
       [](ExperimentConfig &c, const std::string &v, int l) {
         c.seeds.clear();
         for (const auto &s : split_list(v)) c.seeds.push_back(to_u64(s, "monte_carlo.seeds", l));
       }},
      {"homogenize.eps",
       [](ExperimentConfig &c, const std::string &v, int l) {
         c.inv_eps.clear();
         for (const auto &s : split_list(v)) c.inv_eps.push_back(parse_inverse_eps(s, "homogenize.eps", l));
       }},
      {"homogenize.source",
       [](ExperimentConfig &c, const std::string &v, int l) {
         const auto s = parse_source(v);
         if (!s) throw ConfigError("homogenize.source", l, "expected one, tilted or zero");
         c.source = *s;
       }},
      {"homogenize.homog_n",
       [](ExperimentConfig &c, const std::string &v, int l) { c.homog_n = static_cast<int>(to_int(v, "homogenize.homog_n", l)); }},
      {"homogenize.effective", [](ExperimentConfig &c, const std::string &v, int) { c.effective_json = v; }},
      {"verify.induction_instances",
       [](ExperimentConfig &c, const std::string &v, int l) {
         c.induction_instances = static_cast<int>(to_int(v, "verify.induction_instances", l));
       }},
      {"output.dir", [](ExperimentConfig &c, const std::string &v, int) { c.output_dir = v; }},
  };
  return table;
}

ExperimentConfig apply(const std::vector<std::pair<std::string, Entry>> &entries) {
  ExperimentConfig cfg;
  for (const auto &[key, e] : entries) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, e.line, "unknown key");
    if (cfg.lines.count(key)) throw ConfigError(key, e.line, "duplicate key");
    it->second(cfg, e.value, e.line);
    cfg.lines[key] = e.line;
  }
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, Entry>> parse_ini(const std::string &text) {
  std::vector<std::pair<std::string, Entry>> out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto comment = s.find_first_of("#;");
    if (comment != std::string::npos) s = s.substr(0, comment);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("", line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("", line, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key");
    if (section.empty()) throw ConfigError(key, line, "key outside of a section");
    out.push_back({section + "." + key, {value, line}});
  }
  return out;
}

std::string json_scalar(const nlohmann::json &v, const std::string &key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto &x : v) s += (s.empty() ? "" : ",") + json_scalar(x, key);
    return s;
  }
  throw ConfigError(key, 0, "unsupported JSON value");
}

std::vector<std::pair<std::string, Entry>> parse_json(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("", 0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", 0, "JSON config must be an object");
  std::vector<std::pair<std::string, Entry>> out;
  for (const auto &[section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError(section, 0, "section must be an object");
    for (const auto &[k, v] : body.items()) {
      const std::string key = section + "." + k;
      out.push_back({key, {json_scalar(v, key), 0}});
    }
  }
  return out;
}

}  // namespace

int parse_inverse_eps(const std::string &token, const std::string &key, int line) {
  const auto slash = token.find('/');
  double inv = 0.0;
  if (slash != std::string::npos) {
    const double num = to_double(trim(token.substr(0, slash)), key, line);
    const double den = to_double(trim(token.substr(slash + 1)), key, line);
    if (num != 1.0) throw ConfigError(key, line, "eps must have the form 1/n");
    inv = den;
  } else {
    const double e = to_double(token, key, line);
    if (!(e > 0.0)) throw ConfigError(key, line, "eps must be positive");
    inv = 1.0 / e;
  }
  const double r = std::round(inv);
  if (!(r >= 1.0) || std::fabs(inv - r) > 1e-9 * r) throw ConfigError(key, line, "1/eps must be a positive integer");
  return static_cast<int>(r);
}

InterfaceSpec ExperimentConfig::interface_spec() const { return InterfaceSpec{{0.5, 0.5}, radius}; }

DeformationMap ExperimentConfig::deformation() const {
  BumpParams b;
  b.amplitude = bump_amplitude;
  switch (map) {
    case MapKind::Bump: return DeformationMap::bump(b);
    case MapKind::Bernoulli: return DeformationMap::bernoulli(seed_list().front(), b);
    default: return DeformationMap::identity();
  }
}

Conductivity ExperimentConfig::conductivity_field() const { return *conductivity_from_name(conductivity); }

std::vector<Vec2> ExperimentConfig::direction_vectors() const {
  std::vector<Vec2> out;
  for (const auto &d : directions) out.push_back(d == "e1" ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
  return out;
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int i = 0; i < samples; ++i) out.push_back(splitmix64(master_seed + static_cast<std::uint64_t>(i)));
  return out;
}

std::vector<double> ExperimentConfig::eps_list() const {
  std::vector<double> out;
  for (int k : inv_eps) out.push_back(1.0 / k);
  return out;
}

void ExperimentConfig::validate() const {
  const auto line = [this](const std::string &key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  const auto fail = [&](const std::string &key, const std::string &what) { throw ConfigError(key, line(key), what); };
  if (!(radius > 0.0 && radius < 0.5)) fail("geometry.radius", "radius must lie in (0, 0.5)");
  if (!(bump_amplitude >= 0.0 && bump_amplitude <= 0.2)) fail("geometry.bump_amplitude", "amplitude must lie in [0, 0.2]");
  if (!(h > 0.0 && h <= 0.25)) fail("mesh.h", "h must lie in (0, 0.25]");
  if (!(delta > 0.0 && delta <= 1.0)) fail("corrector.delta", "delta must lie in (0, 1]");
  if (n < 1) fail("corrector.n", "n must be at least 1");
  if (m < 1 || m > n - 1) fail("corrector.m", "m must satisfy 1 <= m <= n-1");
  if (seeds.empty() && samples < 1) fail("monte_carlo.samples", "samples must be at least 1");
  if (inv_eps.empty()) fail("homogenize.eps", "at least one eps is required");
  for (std::size_t i = 1; i < inv_eps.size(); ++i)
    if (inv_eps[i] <= inv_eps[i - 1]) fail("homogenize.eps", "eps values must be strictly decreasing");
  if (homog_n < 2) fail("homogenize.homog_n", "homog_n must be at least 2");
  if (induction_instances < 1) fail("verify.induction_instances", "must be at least 1");
  if (output_dir.empty()) fail("output.dir", "output directory must not be empty");
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  const auto join = [](const auto &items, auto fmt) {
    std::string s;
    for (const auto &x : items) s += (s.empty() ? "" : ",") + fmt(x);
    return s;
  };
  kv["geometry.radius"] = format_double(radius);
  kv["geometry.map"] = to_string(map);
  kv["geometry.bump_amplitude"] = format_double(bump_amplitude);
  kv["conductivity.preset"] = conductivity;
  kv["mesh.h"] = format_double(h);
  kv["mesh.membranes"] = to_string(membranes);
  kv["corrector.delta"] = format_double(delta);
  kv["corrector.n"] = std::to_string(n);
  kv["corrector.m"] = std::to_string(m);
  kv["corrector.directions"] = join(directions, [](const std::string &s) { return s; });
  kv["monte_carlo.seeds"] = join(seed_list(), [](std::uint64_t s) { return std::to_string(s); });
  kv["homogenize.eps"] = join(inv_eps, [](int k) { return "1/" + std::to_string(k); });
  kv["homogenize.source"] = to_string(source);
  kv["homogenize.homog_n"] = std::to_string(homog_n);
  kv["homogenize.effective"] = effective_json;
  kv["verify.induction_instances"] = std::to_string(induction_instances);
  std::string out;
  for (const auto &[k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string &data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ExperimentConfig parse_config(const std::string &text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return apply(parse_json(text));
  return apply(parse_ini(text));
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mhom
