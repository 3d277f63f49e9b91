#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace combent {

/// Thrown when a config document is malformed or violates a type invariant.
/// The message names the offending field.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a numeric routine cannot deliver its contract
/// (non-convergent fixed point, singular scattering matrix, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Unit declared by the config document. Internally everything is stored as
/// angular frequency; "hz" documents are multiplied by 2*pi at ingestion.
enum class FrequencyUnit { Dimensionless, Hertz };

struct MechanicalParams {
  double omega_m = 0.0;  // mechanical angular frequency, > 0
  double gamma_m = 0.0;  // mechanical angular decay rate, > 0
  double n_th = 0.0;     // thermal phonon occupancy, >= 0

  double quality_factor() const { return omega_m / gamma_m; }
};

/// Coherent drive of one cavity mode; used to derive the linearized coupling
/// and effective detuning from a physical operating point.
struct DriveParams {
  double power_w = 0.0;      // input power, W
  double wavelength_m = 0.0; // carrier wavelength, m
  double g_om = 0.0;         // zero-point optomechanical coupling, angular
};

struct ModeParams {
  double delta = 0.0;    // effective detuning (bare detuning when drive is set)
  double kappa_e = 0.0;  // external coupling rate, >= 0
  double kappa_i = 0.0;  // intrinsic loss rate, >= 0
  double g = 0.0;        // linearized coupling G_j, real (derived when drive is set)
  double n_o = 0.0;      // optical thermal occupancy of this mode's baths, >= 0
  std::optional<DriveParams> drive;

  double kappa() const { return kappa_e + kappa_i; }
  double eta() const { return kappa_e / kappa(); }
};

struct SystemConfig {
  FrequencyUnit unit = FrequencyUnit::Dimensionless;
  double theta = 0.0;  // quadrature angle, radians, shared by all modes
  MechanicalParams mech;
  std::vector<ModeParams> modes;

  int mode_count() const { return static_cast<int>(modes.size()); }
  bool has_drives() const;
  /// True when every mode matches mode 0 in (delta, kappa_e, kappa_i, g, n_o)
  /// to relative 1e-12; the simplified route additionally requires delta = 0.
  bool identical_modes() const;
};

bool operator==(const DriveParams& a, const DriveParams& b);
bool operator==(const MechanicalParams& a, const MechanicalParams& b);
bool operator==(const ModeParams& a, const ModeParams& b);
bool operator==(const SystemConfig& a, const SystemConfig& b);

/// Parses and validates a JSON config document. Unknown keys are rejected.
SystemConfig parse_config(const std::string& text);

/// Canonical JSON form in the config's declared unit; parse round-trips it.
std::string serialize_config(const SystemConfig& cfg);

/// Re-checks every type invariant; throws ValidationError naming the field.
void validate(const SystemConfig& cfg);

/// FNV-1a over the canonical serialization; stable across runs.
std::uint64_t config_hash(const SystemConfig& cfg);

double effective_kappa(const ModeParams& mode);

}  // namespace combent
