#include "core/model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "core/constants.hpp"
#include "json.hpp"

namespace combent {

using nlohmann::json;

bool SystemConfig::has_drives() const {
  for (const auto& m : modes)
    if (m.drive) return true;
  return false;
}

bool SystemConfig::identical_modes() const {
  if (modes.empty()) return false;
  const ModeParams& ref = modes.front();
  auto close = [](double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) <= 1e-12 * scale;
  };
  for (const auto& m : modes) {
    if (!close(m.delta, ref.delta) || !close(m.kappa_e, ref.kappa_e) ||
        !close(m.kappa_i, ref.kappa_i) || !close(m.g, ref.g) || !close(m.n_o, ref.n_o))
      return false;
  }
  return true;
}

bool operator==(const DriveParams& a, const DriveParams& b) {
  return a.power_w == b.power_w && a.wavelength_m == b.wavelength_m && a.g_om == b.g_om;
}

bool operator==(const MechanicalParams& a, const MechanicalParams& b) {
  return a.omega_m == b.omega_m && a.gamma_m == b.gamma_m && a.n_th == b.n_th;
}

bool operator==(const ModeParams& a, const ModeParams& b) {
  if (a.drive.has_value() != b.drive.has_value()) return false;
  if (a.drive && !(*a.drive == *b.drive)) return false;
  // g is derived when a drive is present, ignore it there
  const bool g_equal = a.drive ? true : a.g == b.g;
  return a.delta == b.delta && a.kappa_e == b.kappa_e && a.kappa_i == b.kappa_i &&
         a.n_o == b.n_o && g_equal;
}

bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return a.unit == b.unit && a.theta == b.theta && a.mech == b.mech && a.modes == b.modes;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ValidationError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ValidationError(where + "." + key + ": expected a number");
  return v.get<double>();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown_keys(doc, {"unit", "theta", "mechanical", "modes", "optical_n_o"}, "config");

  SystemConfig cfg;
  const std::string unit = doc.value("unit", std::string("dimensionless"));
  if (unit == "dimensionless")
    cfg.unit = FrequencyUnit::Dimensionless;
  else if (unit == "hz")
    cfg.unit = FrequencyUnit::Hertz;
  else
    throw ValidationError("config.unit: must be 'dimensionless' or 'hz' (got '" + unit + "')");
  const double rate_scale = cfg.unit == FrequencyUnit::Hertz ? kTwoPi : 1.0;

  require(doc.contains("theta"), "config.theta: missing");
  cfg.theta = get_number(doc, "theta", "config");

  require(doc.contains("mechanical"), "config.mechanical: missing");
  const json& mech = doc.at("mechanical");
  reject_unknown_keys(mech, {"omega_m", "q_m", "gamma_m", "n_th"}, "config.mechanical");
  cfg.mech.omega_m = rate_scale * get_number(mech, "omega_m", "config.mechanical");
  const bool has_q = mech.contains("q_m"), has_g = mech.contains("gamma_m");
  require(has_q != has_g, "config.mechanical: exactly one of q_m or gamma_m required");
  if (has_q) {
    const double q = get_number(mech, "q_m", "config.mechanical");
    require(q > 0.0, "config.mechanical.q_m: must be > 0");
    cfg.mech.gamma_m = cfg.mech.omega_m / q;
  } else {
    cfg.mech.gamma_m = rate_scale * get_number(mech, "gamma_m", "config.mechanical");
  }
  cfg.mech.n_th = get_number(mech, "n_th", "config.mechanical");

  const double default_n_o =
      doc.contains("optical_n_o") ? get_number(doc, "optical_n_o", "config") : 0.0;

  require(doc.contains("modes") && doc.at("modes").is_array() && !doc.at("modes").empty(),
          "config.modes: non-empty array required");
  int idx = 0;
  for (const json& jm : doc.at("modes")) {
    const std::string where = "config.modes[" + std::to_string(idx++) + "]";
    if (!jm.is_object()) throw ValidationError(where + ": expected an object");
    reject_unknown_keys(jm, {"delta", "kappa_e", "kappa_i", "g", "n_o", "drive"}, where);
    ModeParams m;
    m.delta = rate_scale * get_number(jm, "delta", where);
    m.kappa_e = rate_scale * get_number(jm, "kappa_e", where);
    m.kappa_i = jm.contains("kappa_i") ? rate_scale * get_number(jm, "kappa_i", where) : 0.0;
    m.n_o = jm.contains("n_o") ? get_number(jm, "n_o", where) : default_n_o;
    const bool has_gc = jm.contains("g"), has_drive = jm.contains("drive");
    require(has_gc != has_drive, where + ": exactly one of g or drive required");
    if (has_gc) {
      m.g = rate_scale * get_number(jm, "g", where);
    } else {
      const json& jd = jm.at("drive");
      reject_unknown_keys(jd, {"power_w", "wavelength_m", "g_om"}, where + ".drive");
      require(cfg.unit == FrequencyUnit::Hertz,
              where + ".drive: physical drive parameters require unit 'hz'");
      DriveParams d;
      d.power_w = get_number(jd, "power_w", where + ".drive");
      d.wavelength_m = get_number(jd, "wavelength_m", where + ".drive");
      d.g_om = rate_scale * get_number(jd, "g_om", where + ".drive");
      m.drive = d;
    }
    cfg.modes.push_back(m);
  }

  validate(cfg);
  return cfg;
}

void validate(const SystemConfig& cfg) {
  require(!cfg.modes.empty(), "config.modes: at least one mode required");
  require(std::isfinite(cfg.theta), "config.theta: must be finite");
  require(cfg.mech.omega_m > 0.0, "config.mechanical.omega_m: must be > 0");
  require(cfg.mech.gamma_m > 0.0, "config.mechanical.gamma_m: must be > 0");
  require(cfg.mech.n_th >= 0.0, "config.mechanical.n_th: must be >= 0");
  int idx = 0;
  for (const auto& m : cfg.modes) {
    const std::string where = "config.modes[" + std::to_string(idx++) + "]";
    require(std::isfinite(m.delta), where + ".delta: must be finite");
    require(m.kappa_e >= 0.0, where + ".kappa_e: must be >= 0");
    require(m.kappa_i >= 0.0, where + ".kappa_i: must be >= 0");
    require(m.kappa() > 0.0, where + ": kappa_e + kappa_i must be > 0");
    require(std::isfinite(m.g), where + ".g: must be finite");
    require(m.n_o >= 0.0, where + ".n_o: must be >= 0");
    if (m.drive) {
      require(m.drive->power_w >= 0.0, where + ".drive.power_w: must be >= 0");
      require(m.drive->wavelength_m > 0.0, where + ".drive.wavelength_m: must be > 0");
    }
  }
}

std::string serialize_config(const SystemConfig& cfg) {
  const double invscale = cfg.unit == FrequencyUnit::Hertz ? 1.0 / kTwoPi : 1.0;
  json doc;
  doc["unit"] = cfg.unit == FrequencyUnit::Hertz ? "hz" : "dimensionless";
  doc["theta"] = cfg.theta;
  doc["mechanical"] = {{"omega_m", cfg.mech.omega_m * invscale},
                       {"gamma_m", cfg.mech.gamma_m * invscale},
                       {"n_th", cfg.mech.n_th}};
  json modes = json::array();
  for (const auto& m : cfg.modes) {
    json jm = {{"delta", m.delta * invscale},
               {"kappa_e", m.kappa_e * invscale},
               {"kappa_i", m.kappa_i * invscale},
               {"n_o", m.n_o}};
    if (m.drive) {
      jm["drive"] = {{"power_w", m.drive->power_w},
                     {"wavelength_m", m.drive->wavelength_m},
                     {"g_om", m.drive->g_om * invscale}};
    } else {
      jm["g"] = m.g * invscale;
    }
    modes.push_back(jm);
  }
  doc["modes"] = modes;
  return doc.dump(2);
}

std::uint64_t config_hash(const SystemConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double effective_kappa(const ModeParams& mode) { return mode.kappa_e + mode.kappa_i; }

}  // namespace combent
