// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/boundary_integral.hpp"
#include "cochlea/geometry.hpp"
#include "cochlea/modal.hpp"
#include "cochlea/spectral.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace cochlea::cli
{

/// Malformed JSON; carries the 1-based line and column of the failure.
class ConfigParseError : public std::runtime_error
{
public:
  ConfigParseError(const std::string &what, std::size_t line, std::size_t column)
    : std::runtime_error(what), line_(line), column_(column)
  {
  }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed JSON that violates the schema or a bound; names the field.
class ConfigError : public std::runtime_error
{
public:
  /// what() reads "<path>: <leaf> <message>", e.g.
  /// "material.delta: delta must be positive (got 0)".
  ConfigError(const std::string &field, const std::string &message)
    : std::runtime_error(field + ": " + field.substr(field.rfind('.') + 1) + " " + message),
      field_(field)
  {
  }
  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

struct GeometryConfig
{
  int n = 6;
  double first_radius = 1.0;
  double s = 1.05;
  double gap_ratio = 0.5;
  double source_x = -5.0;
};

struct MaterialConfig
{
  double v = 1.0;
  double v_b = 1.0;
  double delta = 1e-3;
  double beta = 1.0;
};

struct NumericsConfig
{
  int M = 5;
  /// Newton certificate tolerance (relative to 1 + |F|).
  double tolerance = 1e-10;
  double resonance_tolerance = 1e-8;
  double refinement_tolerance = 1e-4;
  bool check_refinement = true;
  int scan_points = 240;
  double q_inflation = 0.5;
  int radial = 24;
  int angular = 48;
  int circle_points = 128;
  double panel_length = 1.0;
  int panel_order = 16;
  int max_newton_iterations = 60;
  int chain_length = 16;
};

/// Frequency grid; values are multiplied by Re w_m (reference "real") or
/// |w_m| (reference "modulus") when relative_to_mode = m > 0.
struct GridConfig
{
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  int relative_to_mode = 0;
  std::string reference = "real";
};

/// A single frequency, absolute or as a multiple of a resonance.
struct FrequencyConfig
{
  double value = 1.0;
  int relative_to_mode = 0;
  std::string reference = "real";
};

enum class ExperimentType
{
  resonances,
  sweep,
  phase,
  twotone
};

struct ExperimentConfig
{
  GeometryConfig geometry;
  MaterialConfig material;
  NumericsConfig numerics;

  ExperimentType type = ExperimentType::resonances;
  GridConfig grid;
  /// sweep: forcing amplitudes; phase: single entry.
  std::vector<double> F;
  /// phase: observation points (empty = resonator centres).
  std::vector<Vec2> points;
  /// twotone
  FrequencyConfig omega1;
  double F1 = 1e-5;
  double F2 = 1e-5;
  int mode = 4;
  double collision_floor = 1e-3;

  geometry::ResonatorArray array() const;
  bie::WaveParams params() const;
  spectral::SearchOptions search(unsigned threads) const;
  modal::QuadratureSpec quadrature(const geometry::ResonatorArray &array) const;
};

const char *to_string(ExperimentType type);

/// Strict parse: unknown keys are rejected, omitted numerics take defaults,
/// every number is bounds-checked. Throws ConfigParseError or ConfigError.
ExperimentConfig parse_config(const std::string &text);

/// Normalised echo of a configuration with all defaults filled in.
nlohmann::json to_json(const ExperimentConfig &config);

}  // namespace cochlea::cli
