#include "fdrsel/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fdrsel/error.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(d))
    throw InvalidParameter(key + ": '" + v + "' is not a number");
  return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw InvalidParameter(key + ": '" + v + "' is not a nonnegative integer");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw InvalidParameter(key + ": '" + v + "' is out of range");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParameter(key + ": '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& render) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += render(values[i]);
  }
  return out;
}

}  // namespace

std::vector<Scenario> GridConfig::scenarios() const {
  std::vector<Scenario> out;
  for (std::size_t p1 : p1_values)
    for (double rho : rho_values)
      for (const SignalRange& range : signal_ranges) {
        Scenario s;
        s.n = n;
        s.p = p;
        s.p1 = p1;
        s.rho = rho;
        s.signal_range = range;
        s.noise_sd = noise_sd;
        s.q = q;
        s.random_signs = random_signs;
        s.placement = placement;
        s.seed = derive_seed(seed, {out.size()});
        out.push_back(s);
      }
  return out;
}

void GridConfig::validate(bool full_scale) const {
  if (n < 8) throw InvalidParameter("n: must be at least 8, got " + std::to_string(n));
  if (p < 3) throw InvalidParameter("p: must be at least 3, got " + std::to_string(p));
  if (!full_scale && (n > kDeskMaxN || p > kDeskMaxP))
    throw InvalidParameter("n, p: above desk scale (n <= " + std::to_string(kDeskMaxN) +
                           ", p <= " + std::to_string(kDeskMaxP) + "); pass --full-scale to run it");
  if (p1_values.empty()) throw InvalidParameter("p1: list is empty");
  for (std::size_t p1 : p1_values)
    if (p1 > p) throw InvalidParameter("p1: " + std::to_string(p1) + " exceeds p = " + std::to_string(p));
  if (rho_values.empty()) throw InvalidParameter("rho: list is empty");
  for (double r : rho_values)
    if (!(r >= 0.0 && r < 1.0)) throw InvalidParameter("rho: " + fmt(r) + " outside legal range [0, 1)");
  if (signal_ranges.empty()) throw InvalidParameter("signal_ranges: list is empty");
  for (const auto& r : signal_ranges)
    if (!(r.lo >= 0.0 && r.lo < r.hi))
      throw InvalidParameter("signal_ranges: " + fmt(r.lo) + ":" + fmt(r.hi) +
                             " violates 0 <= r1 < r2");
  if (replications < 1) throw InvalidParameter("replications: must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q: " + fmt(q) + " outside legal range (0, 1)");
  if (methods.empty()) throw InvalidParameter("methods: list is empty");
  if (!(noise_sd >= 0.0)) throw InvalidParameter("noise_sd: must be nonnegative");
  const auto& s = settings;
  if (s.k < 1) throw InvalidParameter("k: must be at least 1");
  if (s.k_prime < 1) throw InvalidParameter("k_prime: must be at least 1");
  if (s.subsample_size == 1) throw InvalidParameter("subsample_size: must be 0 (means n) or >= 2");
  if (!s.bootstrap && s.subsample_size > n)
    throw InvalidParameter("subsample_size: exceeds n without replacement");
  if (s.estimator.folds < 2) throw InvalidParameter("folds: must be at least 2");
  if (s.estimator.grid_size < 1) throw InvalidParameter("grid_size: must be at least 1");
  if (s.ss_subsamples < 2) throw InvalidParameter("ss_subsamples: must be at least 2");
  if (!(s.ss_threshold > 0.5 && s.ss_threshold <= 1.0))
    throw InvalidParameter("ss_threshold: " + fmt(s.ss_threshold) + " outside legal range (0.5, 1]");
  if (s.ss_grid_size < 1) throw InvalidParameter("ss_grid_size: must be at least 1");
  if (!(s.ss_grid_ratio > 0.0 && s.ss_grid_ratio <= 1.0))
    throw InvalidParameter("ss_grid_ratio: outside legal range (0, 1]");
  s.tau.validate();
  if (std::find(methods.begin(), methods.end(), Method::Bh) != methods.end() && n <= p + 1)
    throw InvalidParameter("methods: bh needs OLS p-values, which require n > p + 1");
  if (s.estimator.kind == EstimatorKind::Ols && (n + 1) / 2 <= p + 1)
    throw InvalidParameter("estimator: ols needs each half to have more than p rows");
}

GridConfig parse_config_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidParameter("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw InvalidParameter("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) throw InvalidParameter(key + ": given more than once");
  }

  static const std::set<std::string> known = {
      "n",         "p",           "seed",         "p1",         "rho",          "signal_ranges",
      "replications", "q",        "methods",      "k",          "k_prime",      "subsample_size",
      "bootstrap", "tau",         "estimator",    "folds",      "grid_size",    "ss_subsamples",
      "ss_threshold", "ss_grid_size", "ss_grid_ratio", "noise_sd", "random_signs", "support",
      "out"};
  for (const auto& [key, _] : kv)
    if (!known.count(key)) throw InvalidParameter("unknown config key '" + key + "'");
  for (const char* required : {"n", "p", "seed"})
    if (!kv.count(required)) throw InvalidParameter(std::string(required) + ": required key missing");

  GridConfig c;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  c.n = to_uint("n", *get("n"));
  c.p = to_uint("p", *get("p"));
  c.seed = to_uint("seed", *get("seed"));
  if (auto v = get("p1")) {
    c.p1_values.clear();
    for (const auto& item : split_list(*v)) c.p1_values.push_back(to_uint("p1", item));
  }
  if (auto v = get("rho")) {
    c.rho_values.clear();
    for (const auto& item : split_list(*v)) c.rho_values.push_back(to_double("rho", item));
  }
  if (auto v = get("signal_ranges")) {
    c.signal_ranges.clear();
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw InvalidParameter("signal_ranges: '" + item + "' is not of the form lo:hi");
      c.signal_ranges.push_back({to_double("signal_ranges", trim(item.substr(0, colon))),
                                 to_double("signal_ranges", trim(item.substr(colon + 1)))});
    }
  }
  if (auto v = get("replications")) c.replications = to_uint("replications", *v);
  if (auto v = get("q")) c.q = to_double("q", *v);
  if (auto v = get("methods")) {
    c.methods.clear();
    for (const auto& item : split_list(*v)) {
      try {
        const Method m = parse_method(item);
        if (std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end())
          throw InvalidParameter("'" + item + "' listed twice");
        c.methods.push_back(m);
      } catch (const InvalidParameter& e) {
        throw InvalidParameter(std::string("methods: ") + e.what());
      }
    }
  }
  auto& s = c.settings;
  if (auto v = get("k")) s.k = to_uint("k", *v);
  if (auto v = get("k_prime")) s.k_prime = to_uint("k_prime", *v);
  if (auto v = get("subsample_size")) s.subsample_size = to_uint("subsample_size", *v);
  if (auto v = get("bootstrap")) s.bootstrap = to_bool("bootstrap", *v);
  if (auto v = get("tau")) {
    try {
      s.tau = parse_tau_rule(*v);
    } catch (const InvalidParameter& e) {
      throw InvalidParameter(std::string("tau: ") + e.what());
    }
  }
  if (auto v = get("estimator")) {
    const auto folds = s.estimator.folds;
    const auto grid = s.estimator.grid_size;
    try {
      s.estimator = parse_estimator(*v);
    } catch (const InvalidParameter& e) {
      throw InvalidParameter(std::string("estimator: ") + e.what());
    }
    s.estimator.folds = folds;
    s.estimator.grid_size = grid;
  }
  if (auto v = get("folds")) s.estimator.folds = to_uint("folds", *v);
  if (auto v = get("grid_size")) s.estimator.grid_size = to_uint("grid_size", *v);
  if (auto v = get("ss_subsamples")) s.ss_subsamples = to_uint("ss_subsamples", *v);
  if (auto v = get("ss_threshold")) s.ss_threshold = to_double("ss_threshold", *v);
  if (auto v = get("ss_grid_size")) s.ss_grid_size = to_uint("ss_grid_size", *v);
  if (auto v = get("ss_grid_ratio")) s.ss_grid_ratio = to_double("ss_grid_ratio", *v);
  if (auto v = get("noise_sd")) c.noise_sd = to_double("noise_sd", *v);
  if (auto v = get("random_signs")) c.random_signs = to_bool("random_signs", *v);
  if (auto v = get("support")) {
    if (*v == "random")
      c.placement = SupportPlacement::Random;
    else if (*v == "contiguous")
      c.placement = SupportPlacement::Contiguous;
    else
      throw InvalidParameter("support: '" + *v + "' (expected random or contiguous)");
  }
  if (auto v = get("out")) c.out_dir = *v;
  return c;
}

GridConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string render_config(const GridConfig& c) {
  std::ostringstream o;
  const auto& s = c.settings;
  o << "n = " << c.n << "\n"
    << "p = " << c.p << "\n"
    << "seed = " << c.seed << "\n"
    << "p1 = " << join(c.p1_values, [](std::size_t v) { return std::to_string(v); }) << "\n"
    << "rho = " << join(c.rho_values, [](double v) { return fmt(v); }) << "\n"
    << "signal_ranges = "
    << join(c.signal_ranges, [](const SignalRange& r) { return fmt(r.lo) + ":" + fmt(r.hi); }) << "\n"
    << "replications = " << c.replications << "\n"
    << "q = " << fmt(c.q) << "\n"
    << "methods = " << join(c.methods, [](Method m) { return std::string(to_string(m)); }) << "\n"
    << "k = " << s.k << "\n"
    << "k_prime = " << s.k_prime << "\n"
    << "subsample_size = " << s.subsample_size << "\n"
    << "bootstrap = " << (s.bootstrap ? "true" : "false") << "\n"
    << "tau = " << to_string(s.tau) << "\n"
    << "estimator = " << to_string(s.estimator) << "\n"
    << "folds = " << s.estimator.folds << "\n"
    << "grid_size = " << s.estimator.grid_size << "\n"
    << "ss_subsamples = " << s.ss_subsamples << "\n"
    << "ss_threshold = " << fmt(s.ss_threshold) << "\n"
    << "ss_grid_size = " << s.ss_grid_size << "\n"
    << "ss_grid_ratio = " << fmt(s.ss_grid_ratio) << "\n"
    << "noise_sd = " << fmt(c.noise_sd) << "\n"
    << "random_signs = " << (c.random_signs ? "true" : "false") << "\n"
    << "support = " << (c.placement == SupportPlacement::Random ? "random" : "contiguous") << "\n";
  if (!c.out_dir.empty()) o << "out = " << c.out_dir << "\n";
  return o.str();
}

}  // namespace fdrsel
