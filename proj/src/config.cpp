#include "visclim/config.hpp"

#include "visclim/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace visclim {

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Real> parse_list(const std::string& v, const std::string& where) {
  std::vector<Real> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(where + ": malformed number '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError(where + ": empty list");
  return out;
}

Real parse_real(const std::string& v, const std::string& where) {
  try {
    size_t used = 0;
    const Real out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError(where + ": malformed number '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& where) {
  const Real r = parse_real(v, where);
  const int i = static_cast<int>(r);
  if (r != i) throw ParseError(where + ": expected an integer, got '" + v + "'");
  return i;
}

void require(bool ok, const std::string& where, const std::string& msg) {
  if (!ok) throw ParseError(where + ": " + msg);
}

const std::vector<std::string> kScenarioParamKeys = {
    "u0_kind",  "u0_center", "u0_halfwidth", "u0_height", "u0_width",   "u0_left",
    "u0_right", "u0_jump",   "u0_value",     "source_rate", "ramp_lo",  "ramp_hi",
    "flux_ratio"};

int datum_kind_from_name(const std::string& v, const std::string& where) {
  if (v == "box") return 0;
  if (v == "riemann") return 1;
  if (v == "bump") return 2;
  if (v == "constant") return 3;
  if (v == "zero") return 4;
  throw ParseError(where + ": unknown datum profile '" + v +
                   "' (box|riemann|bump|constant|zero)");
}

const char* datum_kind_name(int k) {
  switch (k) {
    case 0: return "box";
    case 1: return "riemann";
    case 2: return "bump";
    case 3: return "constant";
    default: return "zero";
  }
}

}  // namespace

std::vector<Real> RunConfig::output_times() const {
  std::vector<Real> times;
  for (int i = 1; i <= snapshots; ++i) times.push_back(horizon * i / snapshots);
  times.back() = horizon;
  return times;
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  auto list = [](const std::vector<Real>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt17(v[i]);
    return s;
  };
  os << "[scenario]\n";
  os << "name = " << scenario << "\n";
  for (const auto& [k, v] : scenario_params) {
    if (k == "u0_kind")
      os << "u0 = " << datum_kind_name(static_cast<int>(v)) << "\n";
    else
      os << k << " = " << fmt17(v) << "\n";
  }
  if (!table_csv.empty()) os << "table_csv = " << table_csv << "\n";
  os << "[grid]\n";
  os << "dimension = " << grid.dimension << "\n";
  os << "half_width = " << fmt17(grid.half_width) << "\n";
  os << "cells = " << grid.cells_per_axis << "\n";
  os << "boundary = " << (grid.boundary == Boundary::outflow ? "outflow" : "periodic") << "\n";
  os << "[time]\n";
  os << "horizon = " << fmt17(horizon) << "\n";
  os << "snapshots = " << snapshots << "\n";
  os << "cfl = " << fmt17(cfl) << "\n";
  os << "[viscosity]\n";
  os << "eps = " << fmt17(eps) << "\n";
  os << "mu = "
     << (mu_mode == MuMode::auto_rule ? std::string("auto")
                                      : mu_mode == MuMode::none ? std::string("none")
                                                                : fmt17(mu_value))
     << "\n";
  os << "[mollification]\n";
  os << "mu_ladder = " << list(mu_ladder) << "\n";
  os << "[sweep]\n";
  os << "eps_ladder = " << list(eps_ladder) << "\n";
  os << "window_lo = " << fmt17(window_lo) << "\n";
  os << "window_hi = " << fmt17(window_hi) << "\n";
  os << "p_list = " << list(p_list) << "\n";
  os << "refine = " << refine << "\n";
  os << "[entropy]\n";
  os << "k_list = " << list(k_list) << "\n";
  os << "delta = " << fmt17(delta) << "\n";
  os << "c_tol = " << fmt17(c_tol) << "\n";
  os << "[slack]\n";
  os << "c_s = " << fmt17(c_s) << "\n";
  os << "l1_slack_rate = " << fmt17(l1_slack_rate) << "\n";
  os << "grad_growth = " << fmt17(grad_growth) << "\n";
  os << "[output]\n";
  os << "dir = " << out_dir << "\n";
  return os.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(serialize()); }

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;

  while (std::getline(is, line)) {
    ++lineno;
    std::ostringstream wh;
    wh << origin << ":" << lineno;
    const std::string where = wh.str();

    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      require(line.back() == ']', where, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known = {"scenario", "grid",    "time",
                                                     "viscosity", "mollification", "sweep",
                                                     "entropy",  "slack",   "output"};
      require(std::find(known.begin(), known.end(), section) != known.end(), where,
              "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    require(eq != std::string::npos, where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty() && !value.empty(), where, "empty key or value");
    require(!section.empty(), where, "key '" + key + "' appears before any section");

    if (section == "scenario") {
      if (key == "name") {
        require(std::find(kBuiltinScenarios.begin(), kBuiltinScenarios.end(), value) !=
                    kBuiltinScenarios.end(),
                where, "unknown scenario '" + value + "'");
        cfg.scenario = value;
      } else if (key == "u0") {
        cfg.scenario_params["u0_kind"] = datum_kind_from_name(value, where);
      } else if (key == "table_csv") {
        cfg.table_csv = value;
      } else if (std::find(kScenarioParamKeys.begin(), kScenarioParamKeys.end(), key) !=
                 kScenarioParamKeys.end()) {
        cfg.scenario_params[key] = parse_real(value, where);
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [scenario]");
      }
    } else if (section == "grid") {
      if (key == "dimension") {
        cfg.grid.dimension = parse_int(value, where);
        require(cfg.grid.dimension == 1 || cfg.grid.dimension == 2, where,
                "dimension must be 1 or 2");
      } else if (key == "half_width") {
        cfg.grid.half_width = parse_real(value, where);
        require(cfg.grid.half_width > 0, where, "half_width must be positive");
      } else if (key == "cells") {
        cfg.grid.cells_per_axis = parse_int(value, where);
        require(cfg.grid.cells_per_axis >= 8, where,
                "cells = " + value + " below the minimum (min 8)");
      } else if (key == "boundary") {
        if (value == "outflow")
          cfg.grid.boundary = Boundary::outflow;
        else if (value == "periodic")
          cfg.grid.boundary = Boundary::periodic;
        else
          throw ParseError(where + ": boundary must be outflow or periodic");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [grid]");
      }
    } else if (section == "time") {
      if (key == "horizon") {
        cfg.horizon = parse_real(value, where);
        require(cfg.horizon > 0, where, "horizon must be positive");
      } else if (key == "snapshots") {
        cfg.snapshots = parse_int(value, where);
        require(cfg.snapshots >= 1 && cfg.snapshots <= 100000, where,
                "snapshots outside [1, 100000]");
      } else if (key == "cfl") {
        cfg.cfl = parse_real(value, where);
        require(cfg.cfl > 0 && cfg.cfl <= 1.0, where, "cfl outside (0, 1]");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [time]");
      }
    } else if (section == "viscosity") {
      if (key == "eps") {
        cfg.eps = parse_real(value, where);
        require(cfg.eps >= 0, where, "eps must be nonnegative");
      } else if (key == "mu") {
        if (value == "auto") {
          cfg.mu_mode = RunConfig::MuMode::auto_rule;
        } else if (value == "none") {
          cfg.mu_mode = RunConfig::MuMode::none;
        } else {
          cfg.mu_mode = RunConfig::MuMode::fixed;
          cfg.mu_value = parse_real(value, where);
          require(cfg.mu_value > 0 && cfg.mu_value <= 0.25, where, "mu outside (0, 0.25]");
        }
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [viscosity]");
      }
    } else if (section == "mollification") {
      if (key == "mu_ladder") {
        cfg.mu_ladder = parse_list(value, where);
        require(is_strictly_decreasing(cfg.mu_ladder), where,
                "mu_ladder must be strictly decreasing");
        for (Real m : cfg.mu_ladder)
          require(m > 0 && m <= 0.25, where, "mu_ladder entries must lie in (0, 0.25]");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [mollification]");
      }
    } else if (section == "sweep") {
      if (key == "eps_ladder") {
        cfg.eps_ladder = parse_list(value, where);
        require(is_strictly_decreasing(cfg.eps_ladder), where,
                "eps_ladder must be strictly decreasing");
        for (Real e : cfg.eps_ladder) require(e > 0, where, "eps_ladder entries must be positive");
      } else if (key == "window_lo") {
        cfg.window_lo = parse_real(value, where);
      } else if (key == "window_hi") {
        cfg.window_hi = parse_real(value, where);
      } else if (key == "p_list") {
        cfg.p_list = parse_list(value, where);
        for (Real p : cfg.p_list) require(p >= 1.0, where, "p_list entries must be >= 1");
      } else if (key == "refine") {
        cfg.refine = parse_int(value, where);
        require(cfg.refine >= 2 && cfg.refine <= 16, where, "refine outside [2, 16]");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [sweep]");
      }
    } else if (section == "entropy") {
      if (key == "k_list") {
        cfg.k_list = parse_list(value, where);
        for (Real k : cfg.k_list) require(k >= 0 && k <= 1, where, "k values must lie in [0,1]");
      } else if (key == "delta") {
        cfg.delta = parse_real(value, where);
        require(cfg.delta > 0 && cfg.delta <= 0.1, where, "delta outside (0, 0.1]");
      } else if (key == "c_tol") {
        cfg.c_tol = parse_real(value, where);
        require(cfg.c_tol > 0, where, "c_tol must be positive");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [entropy]");
      }
    } else if (section == "slack") {
      if (key == "c_s") {
        cfg.c_s = parse_real(value, where);
        require(cfg.c_s >= 0, where, "c_s must be nonnegative");
      } else if (key == "l1_slack_rate") {
        cfg.l1_slack_rate = parse_real(value, where);
        require(cfg.l1_slack_rate >= 0, where, "l1_slack_rate must be nonnegative");
      } else if (key == "grad_growth") {
        cfg.grad_growth = parse_real(value, where);
        require(cfg.grad_growth >= 1.0, where, "grad_growth must be >= 1");
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [slack]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        cfg.out_dir = value;
      } else {
        throw ParseError(where + ": unknown key '" + key + "' in section [output]");
      }
    }
  }

  require(cfg.window_lo < cfg.window_hi, origin, "sweep window must satisfy lo < hi");
  require(cfg.window_lo >= -cfg.grid.half_width && cfg.window_hi <= cfg.grid.half_width, origin,
          "sweep window must sit inside the domain");
  return cfg;
}

}  // namespace visclim
