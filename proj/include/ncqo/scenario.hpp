#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncqo/coefficients.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/errors.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

enum class framework { standard, magnetic, generalized_i, generalized_ii };

inline std::string framework_name(framework fw) {
  switch (fw) {
    case framework::standard: return "standard";
    case framework::magnetic: return "magnetic";
    case framework::generalized_i: return "generalized-I";
    case framework::generalized_ii: return "generalized-II";
  }
  throw error("framework_name: corrupt tag");
}

inline framework framework_from_name(const std::string& name) {
  if (name == "standard") return framework::standard;
  if (name == "magnetic") return framework::magnetic;
  if (name == "generalized-I") return framework::generalized_i;
  if (name == "generalized-II") return framework::generalized_ii;
  throw parse_error("framework.type: unknown framework '" + name + "'");
}

// Constants of the named model systems, in natural units. Optional members
// stay unset unless the system actually uses them.
struct scenario_constants {
  double mass = 1.0;
  double charge = 1.0;
  double omega0 = 1.0;
  double field0 = 0.0;
  double gamma = 1.0;
  double chi = 1.0;
  double sigma = 1.0;
  double delta = 1.0;
  double mu = 1.0;
  std::optional<double> pole_shift;  // C of the exponential cross coefficient
  double d_coeff = 0.0;              // delta of the rational cross coefficient
  double theta0 = 0.0;
  double capital_omega0 = 0.0;
  double drive = 1.0;  // cycle frequency f of the periodic systems
};

// A fully specified model system: which coefficient map applies, the
// constants, the parameter functions it consumes, and the quantum numbers
// (n, m) of the state under study.
struct scenario {
  framework fw = framework::standard;
  scenario_constants k;
  time_expr damping = time_expr::constant(1.0);  // f(t)
  time_expr omega = time_expr::constant(1.0);
  time_expr field = time_expr::constant(0.0);  // B(t)
  time_expr theta = time_expr::constant(0.0);
  time_expr capital_omega = time_expr::constant(0.0);
  time_expr p_weight = time_expr::constant(1.0);
  time_expr q_weight = time_expr::constant(1.0);
  time_expr r_weight = time_expr::constant(0.0);
  int n = 0;
  int m = 0;
  // Declared auxiliary-equation solution family, if the scenario names one.
  // The rational family reads its exponent from family_k.
  std::optional<ep_family> family;
  int family_k = 1;
};

// Routes the scenario through its framework's coefficient map. The
// modified-shift framework samples theta*Omega up to sample_t_max.
inline hamiltonian_coefficients build_coefficients(const scenario& sc,
                                                   double sample_t_max = 10.0) {
  switch (sc.fw) {
    case framework::standard:
      return coeffs_standard(sc.damping, sc.omega, sc.theta, sc.capital_omega,
                             sc.k.mass);
    case framework::magnetic:
      return coeffs_magnetic(sc.damping, sc.omega, sc.field, sc.theta,
                             sc.capital_omega, sc.k.mass, sc.k.charge);
    case framework::generalized_i:
      return coeffs_generalized_I(sc.p_weight, sc.q_weight, sc.r_weight,
                                  sc.theta, sc.capital_omega);
    case framework::generalized_ii:
      return coeffs_generalized_II(sc.p_weight, sc.q_weight, sc.theta,
                                   sc.capital_omega, sample_t_max);
  }
  throw error("build_coefficients: corrupt framework tag");
}

struct time_interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Maximal subintervals of [0, t_max] on which every radicand appearing in
// theta, Omega and the assembled c stays non-negative. Detected on a dense
// grid with the crossing times refined by bisection to 1e-9; a scenario
// without radicands is physical everywhere.
inline std::vector<time_interval> physical_window(const scenario& sc,
                                                  double t_max) {
  if (!(t_max > 0.0)) throw error("physical_window: t_max must be positive");
  std::vector<time_expr> radicands;
  const auto collect = [&](const time_expr& e) {
    e.visit_radicands(
        [&](const time_expr& r) { radicands.push_back(r); });
  };
  collect(sc.theta);
  collect(sc.capital_omega);
  collect(build_coefficients(sc, t_max).c);
  if (radicands.empty()) return {{0.0, t_max}};

  const auto feasible = [&](double t) {
    for (const time_expr& r : radicands) {
      try {
        if (r(t) < 0.0) return false;
      } catch (const domain_error&) {
        return false;
      }
    }
    return true;
  };
  // Bisects between a feasible and an infeasible time; returns the
  // feasible side of the boundary.
  const auto refine = [&](double in, double out) {
    while (std::abs(out - in) > 1e-9) {
      const double mid = 0.5 * (in + out);
      (feasible(mid) ? in : out) = mid;
    }
    return in;
  };

  constexpr int cells = 2048;
  std::vector<time_interval> windows;
  bool inside = feasible(0.0);
  double open = 0.0;
  double prev_t = 0.0;
  for (int i = 1; i <= cells; ++i) {
    const double t = t_max * i / cells;
    const bool ok = feasible(t);
    if (inside && !ok) {
      windows.push_back({open, refine(prev_t, t)});
      inside = false;
    } else if (!inside && ok) {
      open = refine(t, prev_t);
      inside = true;
    }
    prev_t = t;
  }
  if (inside) windows.push_back({open, t_max});
  return windows;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_number(const std::string& where, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw parse_error(where + ": '" + text + "' is not a number");
}

inline int parse_count(const std::string& where, const std::string& text) {
  const double v = parse_number(where, text);
  if (v < 0.0 || v != std::floor(v))
    throw parse_error(where + ": must be a non-negative integer");
  return static_cast<int>(v);
}

// One function entry: an optional numeric amplitude, then a primitive.
//   [amp *] constant(c) | exponential(alpha) | power(gamma, chi, p)
//         | sine(f) | cosine(f)
inline time_expr parse_function(const std::string& where,
                                const std::string& text) {
  std::string body = trim(text);
  double amp = 1.0;
  if (const auto star = body.find('*'); star != std::string::npos) {
    amp = parse_number(where, body.substr(0, star));
    body = trim(body.substr(star + 1));
  }
  const auto open = body.find('(');
  if (open == std::string::npos || body.back() != ')')
    throw parse_error(where + ": expected primitive(args), got '" + text + "'");
  const std::string name = trim(body.substr(0, open));
  std::vector<double> args;
  std::stringstream inner(body.substr(open + 1, body.size() - open - 2));
  for (std::string piece; std::getline(inner, piece, ',');)
    args.push_back(parse_number(where, piece));

  const auto arity = [&](std::size_t want) {
    if (args.size() != want)
      throw parse_error(where + ": " + name + " expects " +
                        std::to_string(want) + " parameter(s), got " +
                        std::to_string(args.size()));
  };
  time_expr e = time_expr::constant(0.0);
  if (name == "constant") {
    arity(1);
    e = time_expr::constant(args[0]);
  } else if (name == "exponential") {
    arity(1);
    e = time_expr::exponential(args[0]);
  } else if (name == "power") {
    arity(3);
    e = time_expr::linear_power(args[0], args[1], args[2]);
  } else if (name == "sine") {
    arity(1);
    e = time_expr::sine(args[0]);
  } else if (name == "cosine") {
    arity(1);
    e = time_expr::cosine(args[0]);
  } else {
    throw parse_error(where + ": unknown primitive '" + name + "'");
  }
  return amp == 1.0 ? e : amp * e;
}

}  // namespace detail

// Reads the sectioned key = value scenario format:
//   [framework] type;  [constants] named reals;  [functions] primitives;
//   [ermakov] family, k;  [quantum] n, m.
// Unknown sections, unknown keys and malformed values all raise parse_error
// naming the offending key.
inline scenario parse_scenario(std::istream& in) {
  scenario sc;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw parse_error("line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "framework" && section != "constants" &&
          section != "functions" && section != "ermakov" &&
          section != "quantum")
        throw parse_error("unknown section '[" + section + "]'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parse_error("line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string where = section + "." + key;

    if (section == "framework") {
      if (key != "type")
        throw parse_error(where + ": the framework section only takes 'type'");
      sc.fw = framework_from_name(value);
    } else if (section == "constants") {
      if (key == "M") sc.k.mass = detail::parse_number(where, value);
      else if (key == "q") sc.k.charge = detail::parse_number(where, value);
      else if (key == "omega0") sc.k.omega0 = detail::parse_number(where, value);
      else if (key == "B0") sc.k.field0 = detail::parse_number(where, value);
      else if (key == "Gamma") sc.k.gamma = detail::parse_number(where, value);
      else if (key == "chi") sc.k.chi = detail::parse_number(where, value);
      else if (key == "sigma") sc.k.sigma = detail::parse_number(where, value);
      else if (key == "Delta") sc.k.delta = detail::parse_number(where, value);
      else if (key == "mu") sc.k.mu = detail::parse_number(where, value);
      else if (key == "C") sc.k.pole_shift = detail::parse_number(where, value);
      else if (key == "delta") sc.k.d_coeff = detail::parse_number(where, value);
      else if (key == "theta0") sc.k.theta0 = detail::parse_number(where, value);
      else if (key == "Omega0")
        sc.k.capital_omega0 = detail::parse_number(where, value);
      else if (key == "f") sc.k.drive = detail::parse_number(where, value);
      else
        throw parse_error(where + ": not a recognized constant");
    } else if (section == "functions") {
      const time_expr e = detail::parse_function(where, value);
      if (key == "f") sc.damping = e;
      else if (key == "omega") sc.omega = e;
      else if (key == "B") sc.field = e;
      else if (key == "theta") sc.theta = e;
      else if (key == "Omega") sc.capital_omega = e;
      else if (key == "P") sc.p_weight = e;
      else if (key == "Q") sc.q_weight = e;
      else if (key == "R") sc.r_weight = e;
      else
        throw parse_error(where + ": not a recognized function slot");
    } else if (section == "ermakov") {
      if (key == "family") {
        if (value == "exponential") sc.family = ep_family::exponential;
        else if (value == "rational") sc.family = ep_family::rational;
        else if (value == "elementary") sc.family = ep_family::elementary;
        else
          throw parse_error(where + ": expected exponential, rational or "
                            "elementary, got '" + value + "'");
      } else if (key == "k") {
        const double v = detail::parse_number(where, value);
        if (v != std::floor(v))
          throw parse_error(where + ": must be an integer");
        sc.family_k = static_cast<int>(v);
      } else {
        throw parse_error(where + ": the ermakov section takes family and k");
      }
    } else if (section == "quantum") {
      if (key == "n") sc.n = detail::parse_count(where, value);
      else if (key == "m") sc.m = detail::parse_count(where, value);
      else
        throw parse_error(where + ": the quantum section takes n and m");
    } else {
      throw parse_error("line " + std::to_string(line_no) +
                        ": key before any section header");
    }
  }
  return sc;
}

inline scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace ncqo
