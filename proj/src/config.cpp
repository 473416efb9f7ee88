#include "thinstrip/config.hpp"

#include "thinstrip/error.hpp"
#include "thinstrip/schrodinger1d.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thinstrip {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::Config, key + " = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) bad_value(key, raw, "not a finite number");
  return v;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_value(key, raw, "not an integer");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < 0) bad_value(key, raw, "must be >= 0");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, raw, "not a boolean");
}

// Defaults of every section except [profile], whose keys depend on the kind.
const Config::Sections& defaults() {
  static const Config::Sections d = {
      {"grids",
       {{"nx", "0"},
        {"nx_min", "400"},
        {"nx_coef", "40"},
        {"nt", "12"},
        {"t_order", "3"},
        {"x_order", "2"},
        {"n_limit", "8000"},
        {"n_reduced", "32000"},
        {"L", "0"}}},
      {"sweep",
       {{"eps", "0.2, 0.1, 0.05, 0.025"},
        {"jmax", "3"},
        {"bc", "D, DN"},
        {"threads", "0"},
        {"tol_1d", "1e-10"},
        {"tol_2d", "1e-10"},
        {"dense_oracle", "false"}}},
      {"unbounded", {{"a", "1"}, {"R", "0"}, {"outer_coarsening", "4"}}},
      {"output", {{"path", ""}, {"format", "csv"}, {"record_timing", "false"}}},
  };
  return d;
}

struct KindKeys {
  std::vector<std::string> required;
  std::map<std::string, std::string> optional; // key -> default ("" = derived)
};

const std::map<std::string, KindKeys>& profile_kinds() {
  static const std::map<std::string, KindKeys> k = {
      {"polynomial", {{"M", "c_plus", "m", "a"}, {{"c_minus", ""}, {"b", ""}}}},
      {"lorentzian", {{"M", "M_tail", "beta", "m"}, {{"R", ""}}}},
      {"flat", {{"M", "a"}, {{"b", ""}}}},
      {"sampled", {{"x", "h", "m", "c_plus"}, {{"c_minus", ""}}}},
  };
  return k;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int to_order(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < 1 || v > 1000) bad_value(key, raw, "must be a positive integer");
  return static_cast<int>(v);
}

} // namespace

std::string bc_label(BoundaryKind bc) { return bc == BoundaryKind::Dirichlet ? "D" : "DN"; }

BoundaryKind parse_bc_label(const std::string& label) {
  const std::string s = trim(label);
  if (s == "D") return BoundaryKind::Dirichlet;
  if (s == "DN") return BoundaryKind::Neumann;
  fail(ErrorKind::Config, "unknown boundary condition '" + label + "' (expected D or DN)");
}

std::size_t GridPolicy::nx_for(const Profile& p, double eps) const {
  if (nx != 0) return nx;
  const double rule = std::ceil(nx_coef / std::pow(eps, alpha(p)));
  std::size_t n = std::max(nx_min, static_cast<std::size_t>(rule));
  return n + (n % 2);
}

double GridPolicy::limit_window(const Profile& p) const { return L > 0.0 ? L : default_limit_window(p); }

Config Config::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, "malformed config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Sections given;
  for (const auto& [section, body] : tree) {
    if (body.empty()) fail(ErrorKind::Config, "key '" + section + "' outside of any section");
    for (const auto& [key, value] : body) given[section][key] = trim(value.data());
  }
  return from_sections(std::move(given));
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    fail(ErrorKind::Config, "override key must look like section.key, got '" + dotted_key + "'");
  Sections given = given_;
  given[dotted_key.substr(0, dot)][dotted_key.substr(dot + 1)] = trim(value);
  *this = from_sections(std::move(given));
}

Config Config::from_sections(Sections given) {
  Config c;
  c.given_ = given;

  // Unknown sections and keys are errors, so that typos never silently fall
  // back to defaults.
  for (const auto& [section, keys] : given) {
    if (section == "profile") continue;
    const auto it = defaults().find(section);
    if (it == defaults().end()) fail(ErrorKind::Config, "unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!it->second.contains(key)) fail(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]");
  }

  Sections eff = defaults();
  for (const auto& [section, keys] : given)
    for (const auto& [key, value] : keys) eff[section][key] = value;

  auto get = [&](const std::string& section, const std::string& key) -> const std::string& {
    return eff.at(section).at(key);
  };
  auto name = [](const std::string& section, const std::string& key) { return section + "." + key; };

  // [grids]
  GridPolicy& g = c.grids_;
  g.nx = to_count(name("grids", "nx"), get("grids", "nx"));
  g.nx_min = to_count(name("grids", "nx_min"), get("grids", "nx_min"));
  g.nx_coef = to_double(name("grids", "nx_coef"), get("grids", "nx_coef"));
  g.nt = to_count(name("grids", "nt"), get("grids", "nt"));
  g.t_order = to_order(name("grids", "t_order"), get("grids", "t_order"));
  g.x_order = to_order(name("grids", "x_order"), get("grids", "x_order"));
  g.n_limit = to_count(name("grids", "n_limit"), get("grids", "n_limit"));
  g.n_reduced = to_count(name("grids", "n_reduced"), get("grids", "n_reduced"));
  g.L = to_double(name("grids", "L"), get("grids", "L"));
  if (g.nx != 0 && g.nx < 8) bad_value("grids.nx", get("grids", "nx"), "must be 0 (rule) or >= 8");
  if (g.nx_min < 8) bad_value("grids.nx_min", get("grids", "nx_min"), "must be >= 8");
  if (!(g.nx_coef > 0.0)) bad_value("grids.nx_coef", get("grids", "nx_coef"), "must be > 0");
  if (g.nt < 4) bad_value("grids.nt", get("grids", "nt"), "must be >= 4");
  if (g.t_order > 4) bad_value("grids.t_order", get("grids", "t_order"), "must be in 1..4");
  if (g.x_order > 4) bad_value("grids.x_order", get("grids", "x_order"), "must be in 1..4");
  if (g.n_limit < 16) bad_value("grids.n_limit", get("grids", "n_limit"), "must be >= 16");
  if (g.n_reduced < 16) bad_value("grids.n_reduced", get("grids", "n_reduced"), "must be >= 16");
  if (g.L < 0.0) bad_value("grids.L", get("grids", "L"), "must be >= 0");

  // [sweep]
  SweepSettings& s = c.sweep_;
  for (const auto& item : split_list(get("sweep", "eps"))) {
    const double e = to_double("sweep.eps", item);
    if (!(e > 0.0)) bad_value("sweep.eps", get("sweep", "eps"), "values must be > 0");
    if (!s.eps.empty() && !(e < s.eps.back()))
      bad_value("sweep.eps", get("sweep", "eps"), "values must be strictly decreasing");
    s.eps.push_back(e);
  }
  if (s.eps.empty()) bad_value("sweep.eps", get("sweep", "eps"), "empty eps list");
  s.jmax = to_count("sweep.jmax", get("sweep", "jmax"));
  if (s.jmax < 1) bad_value("sweep.jmax", get("sweep", "jmax"), "must be >= 1");
  for (const auto& item : split_list(get("sweep", "bc"))) {
    const BoundaryKind bc = parse_bc_label(item);
    if (std::find(s.bcs.begin(), s.bcs.end(), bc) != s.bcs.end())
      bad_value("sweep.bc", get("sweep", "bc"), "duplicate entry");
    s.bcs.push_back(bc);
  }
  if (s.bcs.empty()) bad_value("sweep.bc", get("sweep", "bc"), "empty boundary condition list");
  s.threads = to_count("sweep.threads", get("sweep", "threads"));
  s.tol_1d = to_double("sweep.tol_1d", get("sweep", "tol_1d"));
  s.tol_2d = to_double("sweep.tol_2d", get("sweep", "tol_2d"));
  if (!(s.tol_1d > 0.0) || !(s.tol_2d > 0.0)) fail(ErrorKind::Config, "solver tolerances must be > 0");
  s.dense_oracle = to_bool("sweep.dense_oracle", get("sweep", "dense_oracle"));

  // [unbounded]
  UnboundedSettings& u = c.unbounded_;
  u.a = to_double("unbounded.a", get("unbounded", "a"));
  u.R = to_double("unbounded.R", get("unbounded", "R"));
  u.outer_coarsening = to_count("unbounded.outer_coarsening", get("unbounded", "outer_coarsening"));
  if (!(u.a > 0.0)) bad_value("unbounded.a", get("unbounded", "a"), "must be > 0");
  if (u.R != 0.0 && !(u.R > u.a)) bad_value("unbounded.R", get("unbounded", "R"), "must be 0 (heuristic) or > a");
  if (u.outer_coarsening < 1) bad_value("unbounded.outer_coarsening", get("unbounded", "outer_coarsening"), "must be >= 1");

  // [output]
  OutputSettings& o = c.output_;
  o.path = get("output", "path");
  o.format = get("output", "format");
  if (o.format != "csv" && o.format != "json") bad_value("output.format", o.format, "expected csv or json");
  o.record_timing = to_bool("output.record_timing", get("output", "record_timing"));

  // [profile]
  const auto pit = given.find("profile");
  if (pit == given.end()) fail(ErrorKind::Config, "missing [profile] section");
  auto& prof = eff["profile"];
  if (!prof.contains("kind")) fail(ErrorKind::Config, "missing profile.kind");
  const std::string kind = prof.at("kind");
  const auto kit = profile_kinds().find(kind);
  if (kit == profile_kinds().end())
    bad_value("profile.kind", kind, "expected polynomial, lorentzian, sampled or flat");
  const KindKeys& kk = kit->second;
  for (const auto& [key, value] : prof) {
    if (key == "kind") continue;
    const bool known = std::find(kk.required.begin(), kk.required.end(), key) != kk.required.end() ||
                       kk.optional.contains(key);
    if (!known) fail(ErrorKind::Config, "key '" + key + "' does not apply to profile kind " + kind);
  }
  for (const auto& key : kk.required)
    if (!prof.contains(key)) fail(ErrorKind::Config, "missing profile." + key + " for kind " + kind);
  auto num = [&](const std::string& key) { return to_double("profile." + key, prof.at(key)); };
  auto order = [&]() {
    const long long m = to_integer("profile.m", prof.at("m"));
    if (m < 1 || m > 64) bad_value("profile.m", prof.at("m"), "must be an integer in 1..64");
    return static_cast<int>(m);
  };

  try {
    if (kind == "polynomial") {
      if (!prof.contains("c_minus")) prof["c_minus"] = prof.at("c_plus");
      if (!prof.contains("b")) prof["b"] = prof.at("a");
      c.profile_ = Profile::polynomial(num("M"), num("c_plus"), num("c_minus"), order(), num("a"), num("b"));
    } else if (kind == "lorentzian") {
      if (!prof.contains("R")) {
        const double M = num("M"), Mt = num("M_tail");
        prof["R"] = format_double(u.R > 0.0 ? u.R : u.a + 4.0 * M / (M - Mt));
      }
      c.profile_ = Profile::lorentzian(num("M"), num("M_tail"), num("beta"), order(), num("R"));
    } else if (kind == "sampled") {
      if (!prof.contains("c_minus")) prof["c_minus"] = prof.at("c_plus");
      auto samples = [&](const std::string& key) {
        std::vector<double> v;
        for (const auto& item : split_list(prof.at(key))) v.push_back(to_double("profile." + key, item));
        return v;
      };
      c.profile_ = Profile::sampled(samples("x"), samples("h"), order(), num("c_plus"), num("c_minus"));
    } else {
      if (!prof.contains("b")) prof["b"] = prof.at("a");
      c.profile_ = Profile::flat(num("M"), num("a"), num("b"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, std::string("invalid profile: ") + e.what());
  }

  c.effective_ = std::move(eff);
  return c;
}

std::string Config::to_ini() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : effective_) {
    if (!first) os << '\n';
    first = false;
    os << '[' << section << "]\n";
    for (const auto& [key, value] : keys) os << key << " = " << value << '\n';
  }
  return os.str();
}

} // namespace thinstrip
