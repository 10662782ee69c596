// SPDX-License-Identifier: Apache-2.0
#include "experiment.hpp"

#include "cochlea/analysis.hpp"
#include "cochlea/hopf.hpp"
#include "cochlea/parallel.hpp"
#include "cochlea/spectral.hpp"
#include "cochlea/version.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace cochlea::cli
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects CSV text and writes it with LF endings in one go.
class CsvWriter
{
public:
  explicit CsvWriter(const std::vector<std::string> &header) { row(header); }

  void row(const std::vector<std::string> &cells)
  {
    for (std::size_t i = 0; i < cells.size(); ++i)
      text_ += (i ? "," : "") + cells[i];
    text_ += '\n';
  }

  const std::string &text() const { return text_; }

  /// Writes the file and returns its SHA-256.
  std::string save(const fs::path &path) const
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + path.string());
    out << text_;
    if (!out)
      throw std::runtime_error("write failed for " + path.string());
    return modal::sha256_hex(text_);
  }

private:
  std::string text_;
};

/// Flags become a single CSV cell: no separators or line breaks.
std::string clean_flag(std::string s)
{
  for (auto &c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"')
      c = ';';
  return s;
}

std::string fmt(double x) { return format_double(x); }

double reference_frequency(const modal::ModalSystem &system, int mode, const std::string &ref)
{
  if (mode == 0)
    return 1.0;
  const auto m = static_cast<std::size_t>(mode);
  return ref == "modulus" ? analysis::resonance_modulus(system, m)
                          : analysis::resonance_real(system, m);
}

std::vector<double> resolve_grid(const modal::ModalSystem &system, const GridConfig &g)
{
  const double scale = reference_frequency(system, g.relative_to_mode, g.reference);
  return analysis::linear_grid(g.from * scale, g.to * scale, static_cast<std::size_t>(g.points));
}

analysis::SweepOptions sweep_options(const ExperimentConfig &config, unsigned threads)
{
  analysis::SweepOptions o;
  o.threads = threads;
  o.chain_length = static_cast<std::size_t>(config.numerics.chain_length);
  o.newton.tolerance = config.numerics.tolerance;
  o.newton.max_iterations = config.numerics.max_newton_iterations;
  return o;
}

void write_manifest(const fs::path &path, const json &manifest)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace

std::string format_double(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string modal_cache_key(const ExperimentConfig &config)
{
  const auto full = to_json(config);
  json key;
  key["format"] = 1;
  key["version"] = cochlea::version;
  key["geometry"] = full["geometry"];
  key["material"] = {{"v", config.material.v},
                     {"v_b", config.material.v_b},
                     {"delta", config.material.delta}};
  json numerics = full["numerics"];
  for (const char *k : {"tolerance", "max_newton_iterations", "chain_length"})
    numerics.erase(k);
  key["numerics"] = numerics;
  return modal::sha256_hex(key.dump());
}

modal::ModalSystem load_or_build_system(const ExperimentConfig &config, const RunOptions &options,
                                        bool *cache_hit)
{
  if (cache_hit)
    *cache_hit = false;
  const fs::path dir = options.cache_dir.empty() ? options.out_dir / "cache" : options.cache_dir;
  const fs::path file = dir / ("modal-" + modal_cache_key(config) + ".json");
  if (options.use_cache && fs::exists(file))
  {
    std::ifstream in(file, std::ios::binary);
    const json j = json::parse(in);
    if (cache_hit)
      *cache_hit = true;
    return modal::from_json(j, options.threads);
  }

  const auto array = config.array();
  const auto params = config.params();
  const auto resonances =
    spectral::find_resonances(array, params, config.numerics.M, config.search(options.threads));
  auto modes = spectral::extract_eigenmodes(array, params, resonances);
  auto system = modal::build_modal_system(array, params, std::move(modes),
                                          config.quadrature(array), options.threads);
  if (options.use_cache)
  {
    fs::create_directories(dir);
    const fs::path tmp = file.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << modal::to_json(system).dump();
    }
    fs::rename(tmp, file);
  }
  return system;
}

int run_experiment(const ExperimentConfig &config, const RunOptions &options, std::ostream &log)
{
  const auto t_start = Clock::now();
  json manifest;
  manifest["version"] = cochlea::version;
  manifest["command"] = to_string(options.command);
  manifest["config"] = to_json(config);
  manifest["threads"] = resolve_threads(options.threads);
  manifest["cache_enabled"] = options.use_cache;
  json wall;
  json stats;
  json files;
  std::size_t flagged = 0;

  try
  {
    if (options.command != ExperimentType::resonances && options.command != config.type)
      throw InvalidInput(std::string("subcommand '") + to_string(options.command) +
                         "' does not match the configured experiment '" + to_string(config.type) +
                         "'");
    fs::create_directories(options.out_dir);
    manifest["modal_cache_key"] = modal_cache_key(config);

    // Resonances (and, for every other experiment, the full modal system).
    auto t0 = Clock::now();
    std::vector<spectral::Resonance> resonances;
    std::optional<modal::ModalSystem> system;
    bool hit = false;
    if (options.command == ExperimentType::resonances)
    {
      const fs::path dir = options.cache_dir.empty() ? options.out_dir / "cache" : options.cache_dir;
      if (options.use_cache &&
          fs::exists(dir / ("modal-" + modal_cache_key(config) + ".json")))
        system = load_or_build_system(config, options, &hit);
      else
        resonances = spectral::find_resonances(config.array(), config.params(), config.numerics.M,
                                               config.search(options.threads));
    }
    else
      system = load_or_build_system(config, options, &hit);
    if (system)
      for (const auto &m : system->modes)
        resonances.push_back(m.resonance);
    manifest["cache_hit"] = hit;
    wall["modal_system_s"] = seconds_since(t0);

    CsvWriter res({"n", "re_omega", "im_omega", "residual"});
    double max_drift = 0.0;
    for (std::size_t n = 0; n < resonances.size(); ++n)
    {
      res.row({std::to_string(n + 1), fmt(resonances[n].omega.real()),
               fmt(resonances[n].omega.imag()), fmt(resonances[n].residual)});
      max_drift = std::max(max_drift, resonances[n].refinement_drift);
    }
    files["resonances.csv"] = res.save(options.out_dir / "resonances.csv");
    stats["resonance_count"] = resonances.size();
    stats["max_refinement_drift"] = max_drift;
    log << "resonances: " << resonances.size() << " found\n";

    t0 = Clock::now();
    long long newton_iterations = 0;
    switch (options.command)
    {
    case ExperimentType::resonances:
      break;
    case ExperimentType::sweep:
    {
      const auto grid = resolve_grid(*system, config.grid);
      CsvWriter csv({"Omega", "F", "mode", "abs_X_over_F", "re_X", "im_X", "residual", "flag"});
      for (double F : config.F)
      {
        const auto sweep = analysis::pure_tone_sweep(*system, grid, F, config.material.beta,
                                                     sweep_options(config, options.threads));
        flagged += sweep.flagged_count();
        for (const auto &p : sweep.points)
        {
          if (p.solution)
            newton_iterations += p.solution->newton_iters;
          for (std::size_t m = 0; m < system->size(); ++m)
          {
            if (p.solution)
            {
              const complex X = p.solution->X[static_cast<Eigen::Index>(m)];
              csv.row({fmt(p.Omega), fmt(F), std::to_string(m + 1), fmt(std::abs(X) / F),
                       fmt(X.real()), fmt(X.imag()), fmt(p.solution->residual_norm),
                       clean_flag(p.flag)});
            }
            else
              csv.row({fmt(p.Omega), fmt(F), std::to_string(m + 1), "nan", "nan", "nan", "nan",
                       clean_flag(p.flag)});
          }
        }
      }
      files["sweep.csv"] = csv.save(options.out_dir / "sweep.csv");
      break;
    }
    case ExperimentType::phase:
    {
      const auto grid = resolve_grid(*system, config.grid);
      const auto points =
        config.points.empty() ? analysis::default_observation_points(system->array) : config.points;
      analysis::PhaseOptions po;
      po.sweep = sweep_options(config, options.threads);
      const auto response = analysis::phase_response(*system, grid, config.F.front(),
                                                     config.material.beta, points, po);
      flagged += response.sweep.flagged_count();
      for (const auto &p : response.sweep.points)
        if (p.solution)
          newton_iterations += p.solution->newton_iters;
      CsvWriter csv({"Omega", "point", "x1", "x2", "R", "phi", "phase_delay_cycles",
                     "group_delay_cycles", "flag"});
      std::size_t unwrap_flags = 0;
      for (std::size_t c = 0; c < response.curves.size(); ++c)
      {
        const auto &curve = response.curves[c];
        std::size_t next = 0;
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
          std::string flag;
          if (next < curve.flagged.size() && curve.flagged[next] == k)
          {
            flag = response.sweep.points[k].solution ? "unwrap_refine_grid"
                                                     : clean_flag(response.sweep.points[k].flag);
            ++next;
            ++unwrap_flags;
          }
          csv.row({fmt(grid[k]), std::to_string(c + 1), fmt(curve.x.x()), fmt(curve.x.y()),
                   fmt(curve.R[k]), fmt(curve.phi[k]), fmt(curve.phase_delay_cycles[k]),
                   fmt(curve.group_delay_cycles[k]), flag});
        }
      }
      flagged += unwrap_flags;
      manifest["sign_flags"] = {
        {"phase_sign_flipped", response.sign_flipped},
        {"raw_low_frequency_phase_delay_cycles", response.raw_low_frequency_delay}};
      files["phase.csv"] = csv.save(options.out_dir / "phase.csv");
      break;
    }
    case ExperimentType::twotone:
    {
      const double Omega1 = config.omega1.value * reference_frequency(
                                                    *system, config.omega1.relative_to_mode,
                                                    config.omega1.reference);
      const auto full = resolve_grid(*system, config.grid);
      std::vector<double> grid;
      for (double w : full)
        if (std::abs(w - Omega1) >= config.collision_floor * Omega1)
          grid.push_back(w);
      stats["collision_points_removed"] = full.size() - grid.size();
      analysis::TwoToneSweepOptions to;
      to.sweep = sweep_options(config, options.threads);
      to.solver.newton = to.sweep.newton;
      to.solver.min_separation =
        0.5 * config.collision_floor * Omega1 / std::max(Omega1, grid.empty() ? Omega1 : grid.back());
      const auto sweep =
        analysis::two_tone_sweep(*system, Omega1, grid, config.F1, config.F2, config.material.beta,
                                 static_cast<std::size_t>(config.mode - 1), to);
      flagged += sweep.flagged_count();
      CsvWriter csv({"Omega2", "abs_X10", "abs_X01", "abs_X21", "abs_X12", "abs_X01_passive"});
      json point_flags = json::array();
      for (const auto &p : sweep.points)
      {
        if (p.solution)
        {
          newton_iterations += p.solution->newton_iters;
          csv.row({fmt(p.Omega2), fmt(std::abs(p.X10)), fmt(std::abs(p.X01)),
                   fmt(std::abs(p.X21)), fmt(std::abs(p.X12)), fmt(std::abs(p.X01_passive))});
        }
        else
        {
          csv.row({fmt(p.Omega2), "nan", "nan", "nan", "nan", fmt(std::abs(p.X01_passive))});
          point_flags.push_back({{"Omega2", p.Omega2}, {"flag", p.flag}});
        }
      }
      manifest["omega1"] = Omega1;
      manifest["point_flags"] = point_flags;
      files["twotone.csv"] = csv.save(options.out_dir / "twotone.csv");
      break;
    }
    }
    wall["experiment_s"] = seconds_since(t0);
    stats["newton_iterations"] = newton_iterations;
    stats["flagged_points"] = flagged;
  }
  catch (const std::exception &e)
  {
    log << "error: " << e.what() << '\n';
    manifest["error"] = e.what();
    wall["total_s"] = seconds_since(t_start);
    manifest["wall_time"] = wall;
    manifest["solver"] = stats;
    manifest["files_sha256"] = files;
    manifest["exit_code"] = static_cast<int>(exit_fatal);
    try
    {
      fs::create_directories(options.out_dir);
      write_manifest(options.out_dir / "run.json", manifest);
    }
    catch (...)
    {
    }
    return exit_fatal;
  }

  const int code = flagged > 0 ? exit_flagged : exit_success;
  wall["total_s"] = seconds_since(t_start);
  manifest["wall_time"] = wall;
  manifest["solver"] = stats;
  manifest["files_sha256"] = files;
  manifest["exit_code"] = code;
  try
  {
    write_manifest(options.out_dir / "run.json", manifest);
  }
  catch (const std::exception &e)
  {
    log << "error: " << e.what() << '\n';
    return exit_fatal;
  }
  if (flagged > 0)
    log << "completed with " << flagged << " flagged point(s)\n";
  return code;
}

int run_oracle(const OracleRequest &request, const std::filesystem::path &out_dir,
               std::ostream &log)
{
  const auto t0 = Clock::now();
  json manifest;
  manifest["version"] = cochlea::version;
  manifest["command"] = "oracle";
  manifest["request"] = {{"mu", request.mu},
                         {"omega0", request.omega0},
                         {"Omega", request.Omega},
                         {"F", request.F}};
  try
  {
    if (request.F.empty())
      throw InvalidInput("oracle: at least one forcing amplitude is required");
    fs::create_directories(out_dir);
    CsvWriter csv({"mu", "omega0", "Omega", "F", "steady_amplitude", "horizon", "drift"});
    for (double F : request.F)
    {
      const auto r = hopf::single_hopf_steady_state(request.mu, request.omega0, request.Omega, F);
      csv.row({fmt(r.mu), fmt(r.omega0), fmt(r.Omega), fmt(r.F), fmt(r.steady_amplitude),
               fmt(r.horizon), fmt(r.drift)});
    }
    manifest["files_sha256"] = {{"oracle.csv", csv.save(out_dir / "oracle.csv")}};
    manifest["wall_time"] = {{"total_s", seconds_since(t0)}};
    manifest["exit_code"] = static_cast<int>(exit_success);
    write_manifest(out_dir / "run.json", manifest);
  }
  catch (const std::exception &e)
  {
    log << "error: " << e.what() << '\n';
    return exit_fatal;
  }
  return exit_success;
}

}  // namespace cochlea::cli
