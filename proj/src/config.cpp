#include "config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "errors.hpp"

namespace illumina {

namespace {

class TableReader {
public:
  TableReader(const toml::table* t, std::string name) : t_(t), name_(std::move(name)) {}

  void real(const char* key, double& out) {
    if (const toml::node* n = take(key)) {
      auto v = n->value<double>();
      if (!n->is_number() || !v) fail(key, "expected a number");
      out = *v;
      if (!std::isfinite(out)) fail(key, "must be finite");
    }
  }

  void integer(const char* key, std::int64_t& out) {
    if (const toml::node* n = take(key)) {
      if (!n->is_integer()) fail(key, "expected an integer");
      out = n->as_integer()->get();
    }
  }

  void integer(const char* key, int& out) {
    std::int64_t v = out;
    integer(key, v);
    if (v < INT32_MIN || v > INT32_MAX) fail(key, "out of range");
    out = static_cast<int>(v);
  }

  void seed(const char* key, std::uint64_t& out) {
    std::int64_t v = static_cast<std::int64_t>(out);
    const bool present = t_ && t_->contains(key);
    integer(key, v);
    if (present && v < 0) fail(key, "seed must be nonnegative");
    out = static_cast<std::uint64_t>(v);
  }

  void string(const char* key, std::string& out) {
    if (const toml::node* n = take(key)) {
      if (!n->is_string()) fail(key, "expected a string");
      out = n->as_string()->get();
    }
  }

  void real_list(const char* key, std::vector<double>& out) {
    if (const toml::node* n = take(key)) {
      const toml::array* a = n->as_array();
      if (!a) fail(key, "expected an array");
      out.clear();
      for (const toml::node& e : *a) {
        auto v = e.value<double>();
        if (!e.is_number() || !v || !std::isfinite(*v)) fail(key, "expected an array of numbers");
        out.push_back(*v);
      }
    }
  }

  void int_list(const char* key, std::vector<int>& out) {
    if (const toml::node* n = take(key)) {
      const toml::array* a = n->as_array();
      if (!a) fail(key, "expected an array");
      out.clear();
      for (const toml::node& e : *a) {
        if (!e.is_integer()) fail(key, "expected an array of integers");
        const std::int64_t v = e.as_integer()->get();
        if (v < INT32_MIN || v > INT32_MAX) fail(key, "out of range");
        out.push_back(static_cast<int>(v));
      }
    }
  }

  void string_list(const char* key, std::vector<std::string>& out) {
    if (const toml::node* n = take(key)) {
      const toml::array* a = n->as_array();
      if (!a) fail(key, "expected an array");
      out.clear();
      for (const toml::node& e : *a) {
        if (!e.is_string()) fail(key, "expected an array of strings");
        out.push_back(e.as_string()->get());
      }
    }
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_)
      if (!seen_.count(std::string(k.str()))) fail(std::string(k.str()).c_str(), "unknown key");
  }

  [[noreturn]] void fail(const char* key, const std::string& why) const {
    throw ConfigError(name_ + "." + key + ": " + why);
  }

private:
  const toml::node* take(const char* key) {
    seen_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }

  const toml::table* t_;
  std::string name_;
  std::set<std::string> seen_;
};

template <class T>
void require_grid(const std::vector<T>& g, const std::string& what) {
  if (g.empty()) throw ConfigError(what + ": grid must not be empty");
  for (std::size_t k = 1; k < g.size(); ++k)
    if (!(g[k - 1] < g[k])) throw ConfigError(what + ": grid must be strictly ascending");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void nonneg_grid(const std::vector<double>& g, const std::string& what) {
  require_grid(g, what);
  require(g.front() >= 0.0, what + ": values must be >= 0");
}

void positive_ints(const std::vector<int>& g, const std::string& what) {
  require_grid(g, what);
  require(g.front() >= 1, what + ": values must be >= 1");
}

const toml::table* sub(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(std::string(name) + ": expected a table");
  return n->as_table();
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    if constexpr (std::is_same_v<T, double>) s += fmt(v[k]);
    else if constexpr (std::is_same_v<T, std::string>) s += v[k];
    else s += std::to_string(v[k]);
  }
  return s + "]";
}

} // namespace

ExperimentConfig parse_config(const std::string& toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML syntax error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }

  static const std::set<std::string> tables{"truncation", "optimizer", "cache", "fig2", "fig3", "fig4",
                                            "fig5",       "fig6",      "bounds", "mc",  "qfi",  "snr"};
  for (const auto& [k, v] : root)
    if (!tables.count(std::string(k.str()))) throw ConfigError(std::string(k.str()) + ": unknown table");

  ExperimentConfig c;
  {
    TableReader r(sub(root, "truncation"), "truncation");
    std::int64_t max_dim = static_cast<std::int64_t>(c.truncation.max_dim);
    r.real("tail_tol", c.truncation.tail_tol);
    r.integer("max_dim", max_dim);
    r.finish();
    require(c.truncation.tail_tol > 0.0 && c.truncation.tail_tol < 1.0, "truncation.tail_tol: must lie in (0, 1)");
    require(max_dim >= 2, "truncation.max_dim: must be at least 2");
    c.truncation.max_dim = static_cast<std::size_t>(max_dim);
  }
  {
    TableReader r(sub(root, "optimizer"), "optimizer");
    r.seed("seed", c.optimizer.seed);
    r.integer("starts", c.optimizer.starts);
    r.integer("max_iter", c.optimizer.max_iter);
    r.finish();
    require(c.optimizer.starts >= 1, "optimizer.starts: must be at least 1");
    require(c.optimizer.max_iter >= 1, "optimizer.max_iter: must be at least 1");
  }
  {
    TableReader r(sub(root, "cache"), "cache");
    r.string("dir", c.cache.dir);
    r.finish();
  }
  {
    TableReader r(sub(root, "fig2"), "fig2");
    r.real_list("n_th", c.fig2.n_th);
    r.finish();
    nonneg_grid(c.fig2.n_th, "fig2.n_th");
  }
  {
    TableReader r(sub(root, "fig3"), "fig3");
    r.real_list("n_th", c.fig3.n_th);
    r.integer("n_total", c.fig3.n_total);
    r.finish();
    nonneg_grid(c.fig3.n_th, "fig3.n_th");
    require(c.fig3.n_total >= 1, "fig3.n_total: must be at least 1");
  }
  {
    TableReader r(sub(root, "fig4"), "fig4");
    r.int_list("n_total", c.fig4.n_total);
    r.real_list("n_th", c.fig4.n_th);
    r.finish();
    positive_ints(c.fig4.n_total, "fig4.n_total");
    nonneg_grid(c.fig4.n_th, "fig4.n_th");
  }
  {
    TableReader r(sub(root, "fig5"), "fig5");
    r.int_list("n_total", c.fig5.n_total);
    r.real_list("n_th", c.fig5.n_th);
    r.finish();
    positive_ints(c.fig5.n_total, "fig5.n_total");
    nonneg_grid(c.fig5.n_th, "fig5.n_th");
  }
  {
    TableReader r(sub(root, "fig6"), "fig6");
    r.real_list("n_th", c.fig6.n_th);
    r.real("eta", c.fig6.eta);
    r.integer("n_total", c.fig6.n_total);
    r.finish();
    nonneg_grid(c.fig6.n_th, "fig6.n_th");
    require(c.fig6.eta > 0.0 && c.fig6.eta < 1.0, "fig6.eta: must lie in (0, 1)");
    require(c.fig6.n_total >= 1, "fig6.n_total: must be at least 1");
  }
  {
    TableReader r(sub(root, "bounds"), "bounds");
    r.real_list("n_th", c.bounds.n_th);
    r.int_list("m", c.bounds.m);
    r.real("eta", c.bounds.eta);
    r.integer("n_total", c.bounds.n_total);
    r.string_list("states", c.bounds.states);
    r.finish();
    nonneg_grid(c.bounds.n_th, "bounds.n_th");
    positive_ints(c.bounds.m, "bounds.m");
    require(c.bounds.eta > 0.0 && c.bounds.eta < 1.0, "bounds.eta: must lie in (0, 1)");
    require(c.bounds.n_total >= 1, "bounds.n_total: must be at least 1");
    require(!c.bounds.states.empty(), "bounds.states: must not be empty");
    for (const auto& s : c.bounds.states)
      require(s == "npe" || s == "coherent" || s == "tmsv", "bounds.states: unknown state '" + s + "'");
  }
  {
    TableReader r(sub(root, "mc"), "mc");
    r.int_list("m", c.mc.m);
    r.integer("trials", c.mc.trials);
    r.seed("seed", c.mc.seed);
    r.real("snr", c.mc.snr);
    r.real("n_th", c.mc.n_th);
    r.integer("n_total", c.mc.n_total);
    r.finish();
    positive_ints(c.mc.m, "mc.m");
    require(c.mc.trials >= 1, "mc.trials: must be at least 1");
    require(c.mc.snr > 0.0, "mc.snr: must be positive");
    require(c.mc.n_th >= 0.0, "mc.n_th: must be >= 0");
    require(c.mc.n_total >= 1, "mc.n_total: must be at least 1");
  }
  {
    TableReader r(sub(root, "qfi"), "qfi");
    r.string("probe", c.qfi.probe);
    r.integer("n_total", c.qfi.n_total);
    r.real_list("coeffs", c.qfi.coeffs);
    r.real("n_signal", c.qfi.n_signal);
    r.real("n_th", c.qfi.n_th);
    r.string("method", c.qfi.method);
    r.finish();
    require(c.qfi.probe == "npe" || c.qfi.probe == "coherent" || c.qfi.probe == "tmsv",
            "qfi.probe: expected npe, coherent or tmsv");
    require(c.qfi.method == "fast" || c.qfi.method == "generic", "qfi.method: expected fast or generic");
    require(c.qfi.n_total >= 1, "qfi.n_total: must be at least 1");
    require(c.qfi.coeffs.empty() || c.qfi.coeffs.size() == static_cast<std::size_t>(c.qfi.n_total) + 1,
            "qfi.coeffs: expected n_total + 1 entries");
    require(c.qfi.n_signal >= 0.0, "qfi.n_signal: must be >= 0");
    require(c.qfi.n_th >= 0.0, "qfi.n_th: must be >= 0");
  }
  {
    TableReader r(sub(root, "snr"), "snr");
    r.string("probe", c.snr.probe);
    r.integer("n_total", c.snr.n_total);
    r.real_list("coeffs", c.snr.coeffs);
    r.real("n_signal", c.snr.n_signal);
    r.real("theta", c.snr.theta);
    r.real("eta", c.snr.eta);
    r.real("n_th", c.snr.n_th);
    r.finish();
    require(c.snr.probe == "npe" || c.snr.probe == "coherent", "snr.probe: expected npe or coherent");
    require(c.snr.n_total >= 1, "snr.n_total: must be at least 1");
    require(c.snr.coeffs.empty() || c.snr.coeffs.size() == static_cast<std::size_t>(c.snr.n_total) + 1,
            "snr.coeffs: expected n_total + 1 entries");
    require(c.snr.n_signal >= 0.0 && c.snr.n_signal <= c.snr.n_total, "snr.n_signal: must lie in [0, n_total]");
    require(c.snr.eta > 0.0 && c.snr.eta < 1.0, "snr.eta: must lie in (0, 1)");
    require(c.snr.n_th >= 0.0, "snr.n_th: must be >= 0");
  }
  return c;
}

std::string canonical_config(const ExperimentConfig& c, const std::string& cmd) {
  std::string s = "truncation.tail_tol=" + fmt(c.truncation.tail_tol) +
                  ";truncation.max_dim=" + std::to_string(c.truncation.max_dim) + ";";
  const std::string opt = "optimizer.seed=" + std::to_string(c.optimizer.seed) +
                          ";optimizer.starts=" + std::to_string(c.optimizer.starts) +
                          ";optimizer.max_iter=" + std::to_string(c.optimizer.max_iter) + ";";
  if (cmd == "fig2") {
    s += opt + "fig2.n_th=" + fmt_list(c.fig2.n_th) + ";";
  } else if (cmd == "fig3") {
    s += opt + "fig3.n_th=" + fmt_list(c.fig3.n_th) + ";fig3.n_total=" + std::to_string(c.fig3.n_total) + ";";
  } else if (cmd == "fig4") {
    s += opt + "fig4.n_total=" + fmt_list(c.fig4.n_total) + ";fig4.n_th=" + fmt_list(c.fig4.n_th) + ";";
  } else if (cmd == "fig5") {
    s += opt + "fig5.n_total=" + fmt_list(c.fig5.n_total) + ";fig5.n_th=" + fmt_list(c.fig5.n_th) + ";";
  } else if (cmd == "fig6") {
    s += opt + "fig6.n_th=" + fmt_list(c.fig6.n_th) + ";fig6.eta=" + fmt(c.fig6.eta) +
         ";fig6.n_total=" + std::to_string(c.fig6.n_total) + ";";
  } else if (cmd == "bounds") {
    s += opt + "bounds.n_th=" + fmt_list(c.bounds.n_th) + ";bounds.m=" + fmt_list(c.bounds.m) +
         ";bounds.eta=" + fmt(c.bounds.eta) + ";bounds.n_total=" + std::to_string(c.bounds.n_total) +
         ";bounds.states=" + fmt_list(c.bounds.states) + ";";
  } else if (cmd == "mc") {
    s += "mc.m=" + fmt_list(c.mc.m) + ";mc.trials=" + std::to_string(c.mc.trials) +
         ";mc.seed=" + std::to_string(c.mc.seed) + ";mc.snr=" + fmt(c.mc.snr) + ";mc.n_th=" + fmt(c.mc.n_th) +
         ";mc.n_total=" + std::to_string(c.mc.n_total) + ";";
  } else if (cmd == "qfi") {
    s += opt + "qfi.probe=" + c.qfi.probe + ";qfi.n_total=" + std::to_string(c.qfi.n_total) +
         ";qfi.coeffs=" + fmt_list(c.qfi.coeffs) + ";qfi.n_signal=" + fmt(c.qfi.n_signal) +
         ";qfi.n_th=" + fmt(c.qfi.n_th) + ";qfi.method=" + c.qfi.method + ";";
  } else if (cmd == "snr") {
    s += opt + "snr.probe=" + c.snr.probe + ";snr.n_total=" + std::to_string(c.snr.n_total) +
         ";snr.coeffs=" + fmt_list(c.snr.coeffs) + ";snr.n_signal=" + fmt(c.snr.n_signal) +
         ";snr.theta=" + fmt(c.snr.theta) + ";snr.eta=" + fmt(c.snr.eta) + ";snr.n_th=" + fmt(c.snr.n_th) + ";";
  } else {
    throw ConfigError("unknown subcommand '" + cmd + "'");
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace illumina
