#include "rieszocp/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rieszocp {

namespace {

using nlohmann::json;

// Checked accessors that report the JSON path of every failure.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  Node at(const std::string& key) const { return {j_.at(key), path_ + "." + key}; }
  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }
  std::size_t size() const { return j_.size(); }

  void expect_object(std::set<std::string> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.count(key)) throw ConfigError(path_ + "." + key, "unknown key");
    }
  }
  void expect_array() const {
    if (!j_.is_array()) fail("expected an array");
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  // An integer or a list of integers.
  std::vector<int> integer_list() const {
    if (j_.is_number_integer()) return {integer()};
    expect_array();
    std::vector<int> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).integer());
    return out;
  }
  Interval interval() const {
    expect_array();
    if (size() != 2) fail("expected [lo, hi]");
    const Interval iv{at(0).number(), at(1).number()};
    if (!(iv.lo <= iv.hi)) fail("interval must satisfy lo <= hi");
    return iv;
  }
  Complex complex() const {
    if (j_.is_number()) return {number(), 0.0};
    expect_array();
    if (size() != 2) fail("expected a real number or [re, im]");
    return {at(0).number(), at(1).number()};
  }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

 private:
  const json& j_;
  std::string path_;
};

double positive(const Node& n, const std::string& symbol) {
  const double v = n.number();
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << symbol << " must be positive, got " << v;
    n.fail(os.str());
  }
  return v;
}

int positive_int(const Node& n) {
  const int v = n.integer();
  if (v < 1) n.fail("must be at least 1");
  return v;
}

// [{"coef": c, "t": k, "u": [e_1..e_m]}, ...] on the (t, u) layout.
Polynomial parse_polynomial(const Node& n, int m) {
  n.expect_array();
  const VarLayout L = ControlSet::layout(m);
  std::vector<std::pair<MultiIndex, double>> terms;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node term = n.at(i);
    term.expect_object({"coef", "t", "u"});
    MultiIndex alpha(L.size());
    if (term.has("t")) {
      const int k = term.at("t").integer();
      if (k < 0) term.at("t").fail("exponent must be nonnegative");
      alpha = alpha.with(0, k);
    }
    if (term.has("u")) {
      const Node u = term.at("u");
      u.expect_array();
      if (static_cast<int>(u.size()) != m) u.fail("expected one exponent per control (" + std::to_string(m) + ")");
      for (int j = 0; j < m; ++j) {
        const int e = u.at(j).integer();
        if (e < 0) u.at(j).fail("exponent must be nonnegative");
        alpha = alpha.with(L.control(j), e);
      }
    }
    if (!term.has("coef")) term.fail("missing coef");
    terms.emplace_back(alpha, term.at("coef").number());
  }
  return Polynomial(L, std::move(terms));
}

std::vector<std::optional<Interval>> parse_interval_overrides(const Node& n) {
  n.expect_array();
  std::vector<std::optional<Interval>> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n.raw().at(i).is_null()) {
      out.emplace_back();
    } else {
      out.emplace_back(n.at(i).interval());
    }
  }
  return out;
}

void parse_model(const Node& n, RunConfig& c) {
  n.expect_object({"kind", "epsilon", "x0", "wave_gram_size", "name", "modes"});
  const std::string kind = n.has("kind") ? n.at("kind").string() : "heat";
  if (kind == "heat") {
    c.model = ModelKind::Heat;
  } else if (kind == "wave") {
    c.model = ModelKind::Wave;
  } else if (kind == "custom") {
    c.model = ModelKind::Custom;
  } else {
    n.at("kind").fail("expected heat, wave or custom");
  }
  if (c.model != ModelKind::Custom) {
    if (n.has("epsilon")) c.epsilon = positive(n.at("epsilon"), "ε (epsilon)");
    if (n.has("x0")) {
      c.x0 = n.at("x0").number();
      if (c.x0 < 0.0 || c.x0 > 1.0) n.at("x0").fail("x₀ must lie in [0, 1]");
    }
    if (n.has("modes")) n.at("modes").fail("only custom models take a mode table");
  }
  if (n.has("wave_gram_size")) c.wave_gram_size = positive_int(n.at("wave_gram_size"));
  if (n.has("name")) c.custom_name = n.at("name").string();
  if (c.model == ModelKind::Custom) {
    if (!n.has("modes")) n.fail("custom models need a modes table");
    const Node modes = n.at("modes");
    modes.expect_array();
    if (modes.size() == 0) modes.fail("at least one mode is required");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const Node md = modes.at(i);
      md.expect_object({"eigenvalue", "input", "initial"});
      for (const char* key : {"eigenvalue", "input", "initial"}) {
        if (!md.has(key)) md.fail(std::string("missing ") + key);
      }
      CustomMode mode;
      mode.eigenvalue = md.at("eigenvalue").complex();
      const Node in = md.at("input");
      in.expect_array();
      for (std::size_t j = 0; j < in.size(); ++j) mode.input.push_back(in.at(j).complex());
      mode.initial = md.at("initial").complex();
      if (!c.custom_modes.empty() && mode.input.size() != c.custom_modes.front().input.size()) {
        in.fail("every mode needs the same number of inputs");
      }
      c.custom_modes.push_back(std::move(mode));
    }
  }
}

}  // namespace

SpectralModel RunConfig::spectral_model() const {
  switch (model) {
    case ModelKind::Heat:
      return heat_model(epsilon, x0);
    case ModelKind::Wave:
      return wave_model(epsilon, x0, wave_gram_size);
    case ModelKind::Custom:
      return custom_model(custom_name, custom_modes);
  }
  throw std::logic_error("unknown model kind");
}

ControlSet RunConfig::control_set() const {
  if (extra_constraints.empty()) return ControlSet::box(control_box);
  std::vector<Polynomial> cons = ControlSet::box(control_box).constraints();
  cons.insert(cons.end(), extra_constraints.begin(), extra_constraints.end());
  return ControlSet(controls(), std::move(cons), control_box);
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "$");
  root.expect_object({"model", "N_modes", "horizon", "cost", "control_set", "bounds", "relaxation", "solver",
                      "simulation", "outputs"});
  RunConfig c;
  if (!root.has("model")) root.fail("missing model");
  parse_model(root.at("model"), c);
  const int model_controls = c.model == ModelKind::Custom ? static_cast<int>(c.custom_modes.front().input.size()) : 1;

  if (!root.has("N_modes")) root.fail("missing N_modes");
  c.n_modes = root.at("N_modes").integer_list();
  for (std::size_t i = 0; i < c.n_modes.size(); ++i) {
    if (c.n_modes[i] < 1) root.at("N_modes").fail("mode counts must be at least 1");
    if (c.model == ModelKind::Custom && c.n_modes[i] > static_cast<int>(c.custom_modes.size())) {
      root.at("N_modes").fail("exceeds the number of tabulated modes");
    }
  }

  if (!root.has("horizon")) root.fail("missing horizon");
  {
    const Node h = root.at("horizon");
    h.expect_object({"kind", "T"});
    const std::string kind = h.has("kind") ? h.at("kind").string() : "fixed";
    if (!h.has("T")) h.fail("missing T");
    const double T = positive(h.at("T"), "T");
    if (kind == "fixed") {
      c.horizon = Horizon::fixed(T);
    } else if (kind == "free") {
      c.horizon = Horizon::free(T);
    } else {
      h.at("kind").fail("expected fixed or free");
    }
  }

  {
    c.control_box.assign(model_controls, Interval{-1.0, 1.0});
    if (root.has("control_set")) {
      const Node cs = root.at("control_set");
      cs.expect_object({"box", "constraints"});
      if (cs.has("box")) {
        const Node box = cs.at("box");
        box.expect_array();
        if (static_cast<int>(box.size()) != model_controls) {
          box.fail("expected one interval per control (" + std::to_string(model_controls) + ")");
        }
        for (int i = 0; i < model_controls; ++i) {
          c.control_box[i] = box.at(i).interval();
          if (!(c.control_box[i].lo < c.control_box[i].hi)) box.at(i).fail("control interval must be nonempty");
        }
      }
      if (cs.has("constraints")) {
        const Node cons = cs.at("constraints");
        cons.expect_array();
        for (std::size_t i = 0; i < cons.size(); ++i) {
          Polynomial w = parse_polynomial(cons.at(i), model_controls);
          for (const auto& [alpha, coef] : w.terms()) {
            if (alpha[0] != 0) cons.at(i).fail("control constraints may not depend on t");
          }
          c.extra_constraints.push_back(std::move(w));
        }
      }
    }
  }

  if (!root.has("cost")) root.fail("missing cost");
  c.cost = parse_polynomial(root.at("cost"), model_controls);

  if (root.has("bounds")) {
    const Node b = root.at("bounds");
    b.expect_object({"state_scale", "terminal_slack", "state", "terminal"});
    if (b.has("state_scale")) c.bounds.state_scale = positive(b.at("state_scale"), "state_scale");
    if (b.has("terminal_slack")) {
      c.bounds.terminal_slack = b.at("terminal_slack").number();
      if (c.bounds.terminal_slack < 0.0) b.at("terminal_slack").fail("must be nonnegative");
    }
    if (b.has("state")) c.bounds.state_overrides = parse_interval_overrides(b.at("state"));
    if (b.has("terminal")) c.bounds.terminal_overrides = parse_interval_overrides(b.at("terminal"));
  }

  if (!root.has("relaxation")) root.fail("missing relaxation");
  {
    const Node r = root.at("relaxation");
    r.expect_object({"r", "test_degree", "time_window"});
    if (!r.has("r")) r.fail("missing r");
    c.orders = r.at("r").integer_list();
    for (int order : c.orders) {
      if (order < 1) r.at("r").fail("relaxation orders must be at least 1");
    }
    if (r.has("test_degree")) {
      const std::string td = r.at("test_degree").string();
      if (td == "2r") {
        c.test_degree = TestDegree::TwoR;
      } else if (td == "r") {
        c.test_degree = TestDegree::R;
      } else {
        r.at("test_degree").fail("expected \"r\" or \"2r\"");
      }
    }
    if (r.has("time_window")) {
      const Node tw = r.at("time_window");
      if (tw.raw().is_string()) {
        const std::string s = tw.string();
        if (s == "auto") {
          c.time_window = {TimeWindow::Kind::Auto, 0.0};
        } else if (s == "horizon") {
          c.time_window = {TimeWindow::Kind::Horizon, 0.0};
        } else {
          tw.fail("expected \"auto\", \"horizon\" or a positive number");
        }
      } else {
        c.time_window = {TimeWindow::Kind::Fixed, positive(tw, "time_window")};
      }
    }
  }

  if (root.has("solver")) {
    const Node s = root.at("solver");
    s.expect_object({"tol_gap", "tol_feas", "max_iter", "time_limit_s", "extended_precision", "parallelism"});
    if (s.has("tol_gap")) c.solver.tol_gap = positive(s.at("tol_gap"), "tol_gap");
    if (s.has("tol_feas")) c.solver.tol_feas = positive(s.at("tol_feas"), "tol_feas");
    if (s.has("max_iter")) c.solver.max_iter = positive_int(s.at("max_iter"));
    if (s.has("time_limit_s")) c.solver.time_limit_s = positive(s.at("time_limit_s"), "time_limit_s");
    if (s.has("extended_precision")) c.solver.extended_precision = s.at("extended_precision").boolean();
    if (s.has("parallelism")) c.parallelism = positive_int(s.at("parallelism"));
  }

  if (root.has("simulation")) {
    const Node s = root.at("simulation");
    s.expect_object({"heat_nx", "heat_nt", "heat_boundary", "wave_nx", "wave_cfl", "modal_dt"});
    if (s.has("heat_nx")) c.heat.nx = positive_int(s.at("heat_nx"));
    if (s.has("heat_nt")) c.heat.nt = positive_int(s.at("heat_nt"));
    if (c.heat.nx < 3) s.at("heat_nx").fail("needs at least 3 nodes");
    if (s.has("heat_boundary")) {
      const std::string bc = s.at("heat_boundary").string();
      if (bc == "neumann") {
        c.heat.boundary = HeatBoundary::Neumann;
      } else if (bc == "dirichlet") {
        c.heat.boundary = HeatBoundary::Dirichlet;
      } else {
        s.at("heat_boundary").fail("expected neumann or dirichlet");
      }
    }
    if (s.has("wave_nx")) c.wave.nx = positive_int(s.at("wave_nx"));
    if (c.wave.nx < 3) s.at("wave_nx").fail("needs at least 3 nodes");
    if (s.has("wave_cfl")) {
      c.wave.cfl = positive(s.at("wave_cfl"), "wave_cfl");
      if (c.wave.cfl > 0.9) s.at("wave_cfl").fail("CFL number must not exceed 0.9");
    }
    if (s.has("modal_dt")) c.modal_dt = positive(s.at("modal_dt"), "modal_dt");
  }

  if (root.has("outputs")) {
    const Node o = root.at("outputs");
    o.expect_object({"directory", "sdpa", "fields"});
    if (o.has("directory")) c.output_directory = o.at("directory").string();
    if (o.has("sdpa")) c.write_sdpa = o.at("sdpa").boolean();
    if (o.has("fields")) c.write_fields = o.at("fields").boolean();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot read configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rieszocp
