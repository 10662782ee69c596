// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace cochlea::cli
{

namespace
{

using nlohmann::json;

std::string format_number(double x)
{
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Reads keys from one JSON object, tracking which were consumed so that
/// leftovers can be rejected.
class Block
{
public:
  Block(const json &j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object())
      throw ConfigError(path_, "must be a JSON object");
  }

  bool has(const std::string &key) const { return j_.contains(key); }

  const json &raw(const std::string &key)
  {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string &key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Number in [lo, hi]; `open_lo` makes the lower bound exclusive.
  double number(const std::string &key, double fallback, double lo, double hi, bool open_lo,
                bool required = false)
  {
    if (!has(key))
    {
      if (required)
        throw ConfigError(field(key), "is required");
      return fallback;
    }
    const json &v = raw(key);
    if (!v.is_number())
      throw ConfigError(field(key), "must be a number");
    const double x = v.get<double>();
    check_number(field(key), x, lo, hi, open_lo);
    return x;
  }

  int integer(const std::string &key, int fallback, int lo, int hi, bool required = false)
  {
    if (!has(key))
    {
      if (required)
        throw ConfigError(field(key), "is required");
      return fallback;
    }
    const json &v = raw(key);
    if (!v.is_number_integer())
      throw ConfigError(field(key), "must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      throw ConfigError(field(key), "must be in [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "] (got " + std::to_string(x) + ")");
    return static_cast<int>(x);
  }

  bool boolean(const std::string &key, bool fallback)
  {
    if (!has(key))
      return fallback;
    const json &v = raw(key);
    if (!v.is_boolean())
      throw ConfigError(field(key), "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string &key, const std::string &fallback,
                     const std::set<std::string> &allowed, bool required = false)
  {
    if (!has(key))
    {
      if (required)
        throw ConfigError(field(key), "is required");
      return fallback;
    }
    const json &v = raw(key);
    if (!v.is_string())
      throw ConfigError(field(key), "must be a string");
    const auto s = v.get<std::string>();
    if (!allowed.count(s))
    {
      std::string list;
      for (const auto &a : allowed)
        list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(field(key), "must be one of {" + list + "} (got \"" + s + "\")");
    }
    return s;
  }

  Block child(const std::string &key, bool required)
  {
    if (!has(key))
    {
      if (required)
        throw ConfigError(field(key), "block is required");
      static const json empty = json::object();
      return Block(empty, field(key));
    }
    return Block(raw(key), field(key));
  }

  /// Rejects keys that were never read.
  void finish() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(field(it.key()), "unknown key");
  }

  static void check_number(const std::string &name, double x, double lo, double hi, bool open_lo)
  {
    if (!std::isfinite(x))
      throw ConfigError(name, "must be finite");
    if (open_lo && lo == 0.0 && x <= 0.0)
      throw ConfigError(name, "must be positive (got " + format_number(x) + ")");
    if ((open_lo ? x <= lo : x < lo) || x > hi)
      throw ConfigError(name, std::string("must be in ") + (open_lo ? "(" : "[") +
                                format_number(lo) + ", " + format_number(hi) + "] (got " +
                                format_number(x) + ")");
  }

private:
  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_grid(Block &parent, const std::string &key, GridConfig &grid, int n)
{
  Block b = parent.child(key, true);
  grid.from = b.number("from", 0.0, 0.0, 1e6, true, true);
  grid.to = b.number("to", 0.0, 0.0, 1e6, true, true);
  grid.points = b.integer("points", 0, 2, 1000000, true);
  grid.relative_to_mode = b.integer("relative_to_mode", 0, 0, n);
  grid.reference = b.string("reference", "real", {"real", "modulus"});
  b.finish();
  if (!(grid.to > grid.from))
    throw ConfigError(b.field("to"), "must exceed " + b.field("from"));
}

}  // namespace

const char *to_string(ExperimentType type)
{
  switch (type)
  {
  case ExperimentType::resonances:
    return "resonances";
  case ExperimentType::sweep:
    return "sweep";
  case ExperimentType::phase:
    return "phase";
  case ExperimentType::twotone:
    return "twotone";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string &text)
{
  json root;
  try
  {
    root = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    // Translate the byte offset into a line and column.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i)
    {
      if (text[i] == '\n')
      {
        ++line;
        column = 1;
      }
      else
        ++column;
    }
    throw ConfigParseError("config parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + e.what(),
                           line, column);
  }

  ExperimentConfig c;
  Block top(root, "");

  {
    Block g = top.child("geometry", true);
    c.geometry.n = g.integer("n", c.geometry.n, 1, 12);
    c.geometry.first_radius = g.number("first_radius", c.geometry.first_radius, 0.0, 1e3, true);
    c.geometry.s = g.number("s", c.geometry.s, 0.0, 10.0, true);
    c.geometry.gap_ratio = g.number("gap_ratio", c.geometry.gap_ratio, 0.0, 100.0, true);
    c.geometry.source_x = g.number("source_x", c.geometry.source_x, -1e6, 0.0, false);
    if (c.geometry.source_x >= 0.0)
      throw ConfigError(g.field("source_x"), "must be negative");
    g.finish();
  }
  {
    Block m = top.child("material", true);
    c.material.v = m.number("v", c.material.v, 0.0, 1e6, true);
    c.material.v_b = m.number("v_b", c.material.v_b, 0.0, 1e6, true);
    c.material.delta = m.number("delta", c.material.delta, 0.0, 1.0, true);
    if (c.material.delta >= 1.0)
      throw ConfigError(m.field("delta"), "must be below 1 (high-contrast regime)");
    c.material.beta = m.number("beta", c.material.beta, -1e15, 1e15, false);
    if (m.has("tau"))
    {
      const double tau = m.number("tau", 0.0, 0.0, 1e12, true);
      const double expected = c.material.v_b / c.material.v;
      if (std::abs(tau - expected) > 1e-12 * expected)
        throw ConfigError(m.field("tau"), "inconsistent with v_b / v = " +
                                            format_number(expected));
    }
    m.finish();
  }
  {
    Block n = top.child("numerics", false);
    auto &d = c.numerics;
    d.M = n.integer("M", d.M, 1, 30);
    d.tolerance = n.number("tolerance", d.tolerance, 1e-15, 1e-4, false);
    d.resonance_tolerance = n.number("resonance_tolerance", d.resonance_tolerance, 1e-14, 1e-4,
                                     false);
    d.refinement_tolerance = n.number("refinement_tolerance", d.refinement_tolerance, 1e-10, 0.1,
                                      false);
    d.check_refinement = n.boolean("check_refinement", d.check_refinement);
    d.scan_points = n.integer("scan_points", d.scan_points, 16, 20000);
    d.q_inflation = n.number("q_inflation", d.q_inflation, 0.05, 10.0, false);
    d.radial = n.integer("radial", d.radial, 4, 512);
    d.angular = n.integer("angular", d.angular, 8, 1024);
    d.circle_points = n.integer("circle_points", d.circle_points, 16, 4096);
    d.panel_length = n.number("panel_length", d.panel_length, 0.0, 100.0, true);
    d.panel_order = n.integer("panel_order", d.panel_order, 2, 64);
    d.max_newton_iterations = n.integer("max_newton_iterations", d.max_newton_iterations, 1, 1000);
    d.chain_length = n.integer("chain_length", d.chain_length, 1, 1000000);
    n.finish();
  }
  {
    Block e = top.child("experiment", true);
    const auto type =
      e.string("type", "", {"resonances", "sweep", "phase", "twotone"}, /*required=*/true);
    const int n = c.geometry.n;
    if (type == "resonances")
      c.type = ExperimentType::resonances;
    else if (type == "sweep")
    {
      c.type = ExperimentType::sweep;
      read_grid(e, "grid", c.grid, n);
      if (!e.has("F"))
        throw ConfigError(e.field("F"), "is required");
      const auto &F = e.raw("F");
      if (!F.is_array() || F.empty() || F.size() > 64)
        throw ConfigError(e.field("F"), "must be a non-empty array of at most 64 amplitudes");
      for (const auto &f : F)
      {
        if (!f.is_number())
          throw ConfigError(e.field("F"), "entries must be numbers");
        Block::check_number(e.field("F"), f.get<double>(), 0.0, 1e12, true);
        c.F.push_back(f.get<double>());
      }
    }
    else if (type == "phase")
    {
      c.type = ExperimentType::phase;
      read_grid(e, "grid", c.grid, n);
      c.F = {e.number("F", 1e-6, 0.0, 1e12, true)};
      if (e.has("points"))
      {
        const auto &P = e.raw("points");
        if (!P.is_array() || P.empty())
          throw ConfigError(e.field("points"), "must be a non-empty array of [x, y] pairs");
        for (const auto &p : P)
        {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(e.field("points"), "entries must be [x, y] number pairs");
          Block::check_number(e.field("points"), p[0].get<double>(), -1e6, 1e6, false);
          Block::check_number(e.field("points"), p[1].get<double>(), -1e6, 1e6, false);
          c.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
      }
    }
    else
    {
      c.type = ExperimentType::twotone;
      read_grid(e, "grid", c.grid, n);
      if (!e.has("omega1"))
        throw ConfigError(e.field("omega1"), "is required");
      const auto &w = e.raw("omega1");
      if (w.is_number())
      {
        c.omega1.value = w.get<double>();
        Block::check_number(e.field("omega1"), c.omega1.value, 0.0, 1e6, true);
      }
      else
      {
        Block b(w, e.field("omega1"));
        c.omega1.value = b.number("value", 1.0, 0.0, 1e6, true);
        c.omega1.relative_to_mode = b.integer("relative_to_mode", 0, 0, n);
        c.omega1.reference = b.string("reference", "real", {"real", "modulus"});
        b.finish();
      }
      c.F1 = e.number("F1", c.F1, 0.0, 1e12, false);
      c.F2 = e.number("F2", c.F2, 0.0, 1e12, false);
      c.mode = e.integer("mode", std::min(c.mode, n), 1, n);
      c.collision_floor = e.number("collision_floor", c.collision_floor, 1e-12, 0.5, false);
    }
    e.finish();
  }
  top.finish();

  // Cross-field checks that need the built geometry.
  try
  {
    (void)c.array();
  }
  catch (const InvalidInput &err)
  {
    throw ConfigError("geometry", std::string("is invalid: ") + err.what());
  }
  return c;
}

geometry::ResonatorArray ExperimentConfig::array() const
{
  return geometry::build_graded_array(geometry.n, geometry.first_radius, geometry.s,
                                      geometry.gap_ratio, geometry.source_x);
}

bie::WaveParams ExperimentConfig::params() const
{
  return bie::WaveParams::make(material.v, material.v_b, material.delta);
}

spectral::SearchOptions ExperimentConfig::search(unsigned threads) const
{
  spectral::SearchOptions s;
  s.grid_points = numerics.scan_points;
  s.tolerance = numerics.resonance_tolerance;
  s.refinement_tolerance = numerics.refinement_tolerance;
  s.check_refinement = numerics.check_refinement;
  s.threads = threads;
  return s;
}

modal::QuadratureSpec ExperimentConfig::quadrature(const geometry::ResonatorArray &a) const
{
  auto q = modal::QuadratureSpec::for_array(a, numerics.q_inflation);
  q.radial = numerics.radial;
  q.angular = numerics.angular;
  q.circle_points = numerics.circle_points;
  q.panel_length = numerics.panel_length;
  q.panel_order = numerics.panel_order;
  return q;
}

nlohmann::json to_json(const ExperimentConfig &c)
{
  json j;
  j["geometry"] = {{"n", c.geometry.n},
                   {"first_radius", c.geometry.first_radius},
                   {"s", c.geometry.s},
                   {"gap_ratio", c.geometry.gap_ratio},
                   {"source_x", c.geometry.source_x}};
  j["material"] = {{"v", c.material.v},
                   {"v_b", c.material.v_b},
                   {"tau", c.material.v_b / c.material.v},
                   {"delta", c.material.delta},
                   {"beta", c.material.beta}};
  const auto &n = c.numerics;
  j["numerics"] = {{"M", n.M},
                   {"tolerance", n.tolerance},
                   {"resonance_tolerance", n.resonance_tolerance},
                   {"refinement_tolerance", n.refinement_tolerance},
                   {"check_refinement", n.check_refinement},
                   {"scan_points", n.scan_points},
                   {"q_inflation", n.q_inflation},
                   {"radial", n.radial},
                   {"angular", n.angular},
                   {"circle_points", n.circle_points},
                   {"panel_length", n.panel_length},
                   {"panel_order", n.panel_order},
                   {"max_newton_iterations", n.max_newton_iterations},
                   {"chain_length", n.chain_length}};
  json e;
  e["type"] = to_string(c.type);
  const auto grid = [](const GridConfig &g) {
    return json{{"from", g.from},
                {"to", g.to},
                {"points", g.points},
                {"relative_to_mode", g.relative_to_mode},
                {"reference", g.reference}};
  };
  switch (c.type)
  {
  case ExperimentType::resonances:
    break;
  case ExperimentType::sweep:
    e["grid"] = grid(c.grid);
    e["F"] = c.F;
    break;
  case ExperimentType::phase:
  {
    e["grid"] = grid(c.grid);
    e["F"] = c.F.front();
    json pts = json::array();
    for (const auto &p : c.points)
      pts.push_back({p.x(), p.y()});
    e["points"] = pts;
    break;
  }
  case ExperimentType::twotone:
    e["grid"] = grid(c.grid);
    e["omega1"] = {{"value", c.omega1.value},
                   {"relative_to_mode", c.omega1.relative_to_mode},
                   {"reference", c.omega1.reference}};
    e["F1"] = c.F1;
    e["F2"] = c.F2;
    e["mode"] = c.mode;
    e["collision_floor"] = c.collision_floor;
    break;
  }
  j["experiment"] = e;
  return j;
}

}  // namespace cochlea::cli
