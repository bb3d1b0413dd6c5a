#include "zamr/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <set>
#include <fstream>
#include <sstream>

#include "zamr/errors.hpp"

namespace zamr {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  }
  if (text.find_first_not_of(" \t", used) != std::string::npos) {
    throw ConfigError("'" + key + "': trailing characters in '" + text + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("'" + key + "': expected an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<double> to_vector(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    if (tok.back() == ',') tok.pop_back();
    if (!tok.empty()) out.push_back(to_double(key, tok));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    used_.insert(section + "." + key);
    return *v;
  }

  template <class T, class Conv>
  void read(const std::string& section, const std::string& key, T& out, Conv conv) const {
    if (auto v = get(section, key)) out = conv(section + "." + key, *v);
  }

  void check_unused() const {
    for (const auto& [section, sec] : tree_) {
      if (sec.empty() && !sec.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
      if (section == "case") continue;
      for (const auto& [key, value] : sec) {
        if (!used_.contains(section + "." + key)) throw ConfigError("unknown key '" + section + "." + key + "'");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  mutable std::set<std::string> used_;
};

template <std::size_t N>
std::array<double, N> fixed(const std::string& key, const std::vector<double>& v, std::size_t need) {
  if (v.size() != need) throw ConfigError("'" + key + "': expected " + std::to_string(need) + " values");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < need; ++i) out[i] = v[i];
  return out;
}

std::string join(const auto& values, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << values[i];
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  domain.validate();
  if (min_level < 0) throw ConfigError("min_level must be >= 0");
  if (min_level > max_level) throw ConfigError("min_level must not exceed max_level");
  if (max_level > lattice()) throw ConfigError("max_level must not exceed lattice_level");
  if (lattice() > max_supported_level(domain.dim)) throw ConfigError("lattice_level exceeds the key width");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and >= 0");
  if (adapt_every < 1) throw ConfigError("adapt_every must be >= 1");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (ranks < 1) throw ConfigError("ranks must be >= 1");
  if (output.every < 0) throw ConfigError("output.every must be >= 0");
  criterion.validate();
  scheme.validate();
  fluids.validate();
  if (scheme.gravity != 0.0 && domain.periodic[1]) throw ConfigError("gravity requires walls along y");
}

double RunConfig::param(const std::string& key, double fallback) const {
  const auto it = case_params.find(key);
  return it == case_params.end() ? fallback : to_double("case." + key, it->second);
}

std::vector<double> RunConfig::param_vector(const std::string& key, std::vector<double> fallback) const {
  const auto it = case_params.find(key);
  return it == case_params.end() ? fallback : to_vector("case." + key, it->second);
}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  const Reader r(tree);
  RunConfig cfg;

  if (auto sec = tree.get_child_optional("case")) {
    for (const auto& [key, value] : *sec) {
      if (key == "name") {
        cfg.case_name = value.data();
      } else {
        cfg.case_params[key] = value.data();
      }
    }
  }

  r.read("domain", "dim", cfg.domain.dim, to_int);
  if (cfg.domain.dim != 2 && cfg.domain.dim != 3) throw ConfigError("domain.dim must be 2 or 3");
  const auto d = static_cast<std::size_t>(cfg.domain.dim);
  if (auto v = r.get("domain", "trees")) {
    const auto t = fixed<3>("domain.trees", to_vector("domain.trees", *v), d);
    for (std::size_t i = 0; i < d; ++i) {
      if (t[i] != static_cast<int>(t[i])) throw ConfigError("domain.trees must be integers");
      cfg.domain.tree_dims[i] = static_cast<int>(t[i]);
    }
  }
  if (auto v = r.get("domain", "periodic")) {
    const auto p = fixed<3>("domain.periodic", to_vector("domain.periodic", *v), d);
    for (std::size_t i = 0; i < d; ++i) cfg.domain.periodic[i] = p[i] != 0.0;
  }
  r.read("domain", "tree_extent", cfg.domain.tree_extent, to_double);

  r.read("mesh", "lattice_level", cfg.lattice_level, to_int);
  r.read("mesh", "min_level", cfg.min_level, to_int);
  r.read("mesh", "max_level", cfg.max_level, to_int);

  r.read("adapt", "enabled", cfg.adapt, to_bool);
  if (auto v = r.get("adapt", "criterion")) cfg.criterion.kind = parse_criterion_kind(*v);
  r.read("adapt", "xi", cfg.criterion.xi, to_double);
  if (auto v = r.get("adapt", "weights")) cfg.criterion.weights = fixed<3>("adapt.weights", to_vector("adapt.weights", *v), 3);
  r.read("adapt", "every", cfg.adapt_every, to_int);

  r.read("scheme", "order", cfg.scheme.order, to_int);
  if (auto v = r.get("scheme", "splitting")) {
    if (*v == "lie") {
      cfg.scheme.splitting = Splitting::Lie;
    } else if (*v == "strang") {
      cfg.scheme.splitting = Splitting::Strang;
    } else {
      throw ConfigError("scheme.splitting must be 'lie' or 'strang'");
    }
  }
  r.read("scheme", "cfl", cfg.scheme.cfl, to_double);
  r.read("scheme", "theta", cfg.fluids.theta, to_double);
  r.read("scheme", "gravity", cfg.scheme.gravity, to_double);

  for (int k = 0; k < 2; ++k) {
    const std::string sec = k == 0 ? "fluid1" : "fluid2";
    auto& fl = k == 0 ? cfg.fluids.fluid1 : cfg.fluids.fluid2;
    r.read(sec, "p0", fl.p0, to_double);
    r.read(sec, "rho0", fl.rho0, to_double);
    r.read(sec, "c", fl.c, to_double);
  }

  r.read("time", "t_end", cfg.t_end, to_double);
  if (auto v = r.get("time", "max_steps")) cfg.max_steps = to_int("time.max_steps", *v);
  r.read("parallel", "ranks", cfg.ranks, to_int);

  if (auto v = r.get("output", "dir")) cfg.output.dir = *v;
  r.read("output", "every", cfg.output.every, to_int);
  r.read("output", "vtk", cfg.output.vtk, to_bool);
  auto from = r.get("output", "cut_from");
  auto to = r.get("output", "cut_to");
  if (from.has_value() != to.has_value()) throw ConfigError("output.cut_from and output.cut_to go together");
  if (from) {
    cfg.output.cut = CutLine{fixed<3>("output.cut_from", to_vector("output.cut_from", *from), d),
                             fixed<3>("output.cut_to", to_vector("output.cut_to", *to), d)};
  }

  r.check_unused();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  const auto d = static_cast<std::size_t>(cfg.domain.dim);
  os.precision(17);
  os << "[case]\nname = " << cfg.case_name << "\n";
  for (const auto& [k, v] : cfg.case_params) os << k << " = " << v << "\n";
  os << "\n[domain]\ndim = " << cfg.domain.dim << "\ntrees = " << join(cfg.domain.tree_dims, d)
     << "\nperiodic = " << join(std::array<int, 3>{cfg.domain.periodic[0], cfg.domain.periodic[1], cfg.domain.periodic[2]}, d)
     << "\ntree_extent = " << cfg.domain.tree_extent << "\n";
  os << "\n[mesh]\nlattice_level = " << cfg.lattice() << "\nmin_level = " << cfg.min_level
     << "\nmax_level = " << cfg.max_level << "\n";
  os << "\n[adapt]\nenabled = " << (cfg.adapt ? "true" : "false") << "\ncriterion = " << criterion_name(cfg.criterion.kind)
     << "\nxi = " << cfg.criterion.xi << "\nweights = " << join(cfg.criterion.weights, 3) << "\nevery = " << cfg.adapt_every
     << "\n";
  os << "\n[scheme]\norder = " << cfg.scheme.order
     << "\nsplitting = " << (cfg.scheme.splitting == Splitting::Lie ? "lie" : "strang") << "\ncfl = " << cfg.scheme.cfl
     << "\ntheta = " << cfg.fluids.theta << "\ngravity = " << cfg.scheme.gravity << "\n";
  for (int k = 0; k < 2; ++k) {
    const auto& fl = k == 0 ? cfg.fluids.fluid1 : cfg.fluids.fluid2;
    os << "\n[fluid" << k + 1 << "]\np0 = " << fl.p0 << "\nrho0 = " << fl.rho0 << "\nc = " << fl.c << "\n";
  }
  os << "\n[time]\nt_end = " << cfg.t_end << "\nmax_steps = " << cfg.max_steps << "\n";
  os << "\n[parallel]\nranks = " << cfg.ranks << "\n";
  os << "\n[output]\ndir = " << cfg.output.dir.string() << "\nevery = " << cfg.output.every
     << "\nvtk = " << (cfg.output.vtk ? "true" : "false") << "\n";
  if (cfg.output.cut) {
    os << "cut_from = " << join(cfg.output.cut->from, d) << "\ncut_to = " << join(cfg.output.cut->to, d) << "\n";
  }
}

}  // namespace zamr
