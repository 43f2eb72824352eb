// Command-line driver: every subcommand writes its data files into --out
// and prints a JSON summary that embeds the configuration it ran with.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "thinfilm/identities.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/m1exact.hpp"
#include "thinfilm/orbits.hpp"
#include "thinfilm/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thinfilm;

namespace {

struct Config {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  double reg_eps = kDefaultRegEps;
  std::string out = ".";
  std::string format = "csv";
  std::string config_file;

  int lambda = 1;
  std::size_t pieces = kDefaultPieces;
  double m = 1.0;
  double n = 0.0;
  double m_lo = 1.0;
  double m_hi = 2.2;
  double tol_m = 1e-3;
  double n_lo = 1.0;
  double n_hi = 1.9;
  double s_max = 400.0;
  double f_max = 1.0;
  double fp_tol = 1e-9;
};

json config_json(const Config& c, const std::string& command) {
  return {{"command", command}, {"abs_tol", c.abs_tol}, {"rel_tol", c.rel_tol},
          {"reg_eps", c.reg_eps}, {"out", c.out},       {"format", c.format},
          {"lambda", c.lambda},   {"pieces", c.pieces}, {"m", c.m},
          {"n", c.n},             {"m_lo", c.m_lo},     {"m_hi", c.m_hi},
          {"tol_m", c.tol_m},     {"n_lo", c.n_lo},     {"n_hi", c.n_hi},
          {"s_max", c.s_max},     {"f_max", c.f_max},   {"fp_tol", c.fp_tol}};
}

OrbitOptions orbit_options(const Config& c) {
  OrbitOptions o;
  o.tol = {c.abs_tol, c.rel_tol};
  return o;
}

std::string path_in(const Config& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

void emit(const Config& c, const std::string& name, const json& j) {
  io::write_atomically(path_in(c, name), j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

int cmd_m1(const Config& c) {
  const Lambda lambda = lambda_from_int(c.lambda);
  const MatchingRatios r = find_matching_ratios();
  const double G = lambda == Lambda::plus ? r.G1 : r.G2;
  const PiecewiseProfile prof = build_profile(G, lambda, c.pieces);
  const OscillatorySeed seed = oscillatory_seed(prof);
  json j = {{"config", config_json(c, "m1")},
            {"G1", r.G1},
            {"G2", r.G2},
            {"G", G},
            {"y0", prof.y0},
            {"lambda", c.lambda},
            {"pieces", prof.pieces.size()},
            {"period", seed.period},
            {"amplitude", seed.amplitude},
            {"max_junction_jump", prof.max_junction_jump()},
            {"profile_header", io::profile_header(prof)}};
  if (c.format == "json") {
    json pieces = json::array();
    for (const ProfilePiece& pc : prof.pieces) {
      std::vector<double> co(pc.poly.coeffs().begin(), pc.poly.coeffs().end());
      pieces.push_back({{"y_left", pc.left}, {"y_right", pc.right}, {"coeffs", co}});
    }
    io::write_atomically(path_in(c, "m1_profile.json"),
                         json{{"header", io::profile_header(prof)}, {"pieces", pieces}}.dump(2));
  } else {
    io::write_atomically(path_in(c, "m1_profile.csv"),
                         render([&](std::ostream& os) { io::write_profile_csv(os, prof); }));
  }
  emit(c, "m1_summary.json", j);
  return 0;
}

OrbitResult compute_orbit(const Config& c, const PowerParams& p) {
  const OrbitOptions o = orbit_options(c);
  if (p.lambda == Lambda::plus) return detect_relaxation(p, c.s_max, 1e-5, c.reg_eps, o);
  return seed_orbit(p.m, p.n, p.lambda, c.reg_eps, o);
}

int cmd_orbit(const Config& c, bool with_identities) {
  const PowerParams p = derive(c.m, c.n, lambda_from_int(c.lambda));
  const OrbitResult orb = compute_orbit(c, p);
  const System5 sys = make_system(p, c.reg_eps);
  json j = {{"config", config_json(c, with_identities ? "identities" : "orbit")},
            {"params", io::params_json(p)},
            {"orbit", io::orbit_json(orb)}};
  if (with_identities) {
    const IdentityResiduals ir = identity_residuals(orb, p, c.reg_eps, orbit_options(c));
    j["identities"] = {{"r1", ir.r1}, {"r2", ir.r2}, {"terms1", ir.terms1}, {"terms2", ir.terms2}};
  } else {
    const Trajectory<5> tr = orbit_trajectory(sys, orb, orbit_options(c));
    io::write_atomically(path_in(c, "orbit_trajectory.csv"),
                         render([&](std::ostream& os) { io::write_trajectory_csv(os, tr); }));
  }
  emit(c, with_identities ? "identities.json" : "orbit.json", j);
  return 0;
}

int cmd_bifurcate(const Config& c) {
  const Lambda lambda = lambda_from_int(c.lambda);
  const BifurcationResult r = locate_bifurcation(c.n, lambda, c.m_lo, c.m_hi, c.tol_m, c.reg_eps,
                                                 orbit_options(c));
  io::write_atomically(path_in(c, "bifurcate_sweep.csv"), render([&](std::ostream& os) {
                         io::write_sweep_csv(os, r.sweep, c.n, lambda);
                       }));
  json j = {{"config", config_json(c, "bifurcate")}, {"result", io::bifurcation_json(r)}};
  if (c.n == 0.0)
    j["linear_law_at_n1"] = linear_law(r.m_h, 1.0);
  emit(c, "bifurcate.json", j);
  return 0;
}

int cmd_tfe4(const Config& c) {
  const BifurcationResult r = tfe4_bifurcation(c.n_lo, c.n_hi, c.tol_m, c.reg_eps, orbit_options(c));
  io::write_atomically(path_in(c, "tfe4_sweep.csv"), render([&](std::ostream& os) {
                         io::write_sweep_csv(os, r.sweep, 0.0, Lambda::plus, true);
                       }));
  json j = {{"config", config_json(c, "tfe4")},
            {"n_plus", n_plus()},
            {"n_h", r.m_h},
            {"bracket", {r.m_lo, r.m_hi}},
            {"period_at_bracket", r.period_at_bracket},
            {"diagnostics", r.diagnostics}};
  emit(c, "tfe4.json", j);
  return 0;
}

int cmd_intervals(const Config& c) {
  const NonexistenceReports ne = nonexistence_intervals();
  json j = {{"config", config_json(c, "intervals")},
            {"nonexistence_minus", io::interval_json(ne.minus)},
            {"nonexistence_plus", io::interval_json(ne.plus)},
            {"hyperbolicity", io::interval_json(hyperbolicity_interval())}};
  emit(c, "intervals.json", j);
  return 0;
}

int cmd_params(const Config& c) {
  const PowerParams p = derive(c.m, c.n, lambda_from_int(c.lambda));
  const RegularityClass rc = classify_regularity(c.m, c.n);
  json j = {{"config", config_json(c, "params")},
            {"alpha", p.alpha},
            {"mu", p.mu},
            {"beta", p.beta},
            {"gamma", p.gamma_scale},
            {"cp_class", to_string(rc.cp_class)},
            {"fbp_gamma", rc.fbp_gamma},
            {"fbp_valid", rc.fbp_valid}};
  try {
    j["phi0"] = phi0(p);
  } catch (const NoPositiveSolution&) {
    j["phi0"] = nullptr;
  }
  emit(c, "params.json", j);
  return 0;
}

int cmd_positive(const Config& c) {
  const PowerParams p = derive(c.m, c.n, Lambda::minus);
  const InverseProfile inv = fixed_point_positive(p, c.f_max, c.fp_tol);
  const double amp = phi0(p);
  double err = 0.0;
  for (std::size_t i = 0; i < inv.f.size(); ++i) {
    const double exact = std::pow(inv.f[i] / amp, 1.0 / p.mu);
    err = std::max(err, std::abs(inv.y[i] / exact - 1.0));
  }
  io::write_atomically(path_in(c, "positive.csv"), render([&](std::ostream& os) {
                         os << "f,y,y_exact\n";
                         for (std::size_t i = 0; i < inv.f.size(); ++i)
                           os << io::num(inv.f[i]) << ',' << io::num(inv.y[i]) << ','
                              << io::num(std::pow(inv.f[i] / amp, 1.0 / p.mu)) << '\n';
                       }));
  json j = {{"config", config_json(c, "positive")},
            {"phi0", amp},
            {"iterations", inv.iterations},
            {"last_update", inv.last_update},
            {"sup_relative_error", err}};
  emit(c, "positive.json", j);
  return 0;
}

template <class T>
void from_file(const json& file, const char* key, CLI::Option* opt, T& target) {
  if (opt->count() == 0 && file.contains(key)) target = file.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillatory interface profiles, periodic orbits and bifurcation exponents"};
  app.require_subcommand(1);
  Config c;
  auto* o_abs = app.add_option("--abs-tol", c.abs_tol, "absolute integration tolerance");
  auto* o_rel = app.add_option("--rel-tol", c.rel_tol, "relative integration tolerance");
  auto* o_eps = app.add_option("--reg-eps", c.reg_eps, "regularization of |phi|^(alpha-1) phi");
  auto* o_out = app.add_option("--out", c.out, "output directory");
  auto* o_fmt = app.add_option("--format", c.format, "csv or json")
                    ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", c.config_file, "JSON file with defaults for every flag")
      ->check(CLI::ExistingFile);

  auto lambda_opt = [&](CLI::App* sub) {
    sub->add_option("--lambda", c.lambda, "+1 or -1")->check(CLI::IsMember({1, -1}));
  };

  auto* m1 = app.add_subcommand("m1", "exact piecewise polynomial profile at m = 1");
  lambda_opt(m1);
  m1->add_option("--pieces", c.pieces, "number of humps")->check(CLI::PositiveNumber);

  auto mn = [&](CLI::App* sub) {
    sub->add_option("--m", c.m, "exponent m");
    sub->add_option("--n", c.n, "exponent n");
  };
  auto* orbit = app.add_subcommand("orbit", "periodic oscillatory component at (m, n, lambda)");
  mn(orbit);
  lambda_opt(orbit);
  orbit->add_option("--s-max", c.s_max, "relaxation horizon");
  auto* ident = app.add_subcommand("identities", "integral identities on the orbit");
  mn(ident);
  lambda_opt(ident);

  auto* bif = app.add_subcommand("bifurcate", "heteroclinic bifurcation exponent m_h(n)");
  bif->add_option("--n", c.n, "exponent n");
  lambda_opt(bif);
  bif->add_option("--m-lo", c.m_lo, "lower bracket end (orbit must exist)");
  bif->add_option("--m-hi", c.m_hi, "upper bracket end");
  bif->add_option("--tol-m", c.tol_m, "bisection tolerance");

  auto* tfe = app.add_subcommand("tfe4", "heteroclinic value n_h of the third-order analogue");
  tfe->add_option("--n-lo", c.n_lo, "lower bracket end");
  tfe->add_option("--n-hi", c.n_hi, "upper bracket end");
  tfe->add_option("--tol", c.tol_m, "bisection tolerance");

  auto* iv = app.add_subcommand("intervals", "coefficient-sign intervals in mu");
  auto* par = app.add_subcommand("params", "derived exponents and regularity");
  mn(par);
  lambda_opt(par);
  auto* pos = app.add_subcommand("positive", "fixed-point positive solution vs closed form");
  mn(pos);
  pos->add_option("--f-max", c.f_max, "upper end of the f grid");

  CLI11_PARSE(app, argc, argv);

  auto given = [&](const std::string& flag) {
    for (CLI::App* sub : app.get_subcommands())
      if (sub->get_option_no_throw(flag) && sub->get_option(flag)->count() > 0) return true;
    auto* o = app.get_option_no_throw(flag);
    return o && o->count() > 0;
  };

  try {
    if (!c.config_file.empty()) {
      std::ifstream f(c.config_file);
      const json file = json::parse(f);
      from_file(file, "abs_tol", o_abs, c.abs_tol);
      from_file(file, "rel_tol", o_rel, c.rel_tol);
      from_file(file, "reg_eps", o_eps, c.reg_eps);
      from_file(file, "out", o_out, c.out);
      from_file(file, "format", o_fmt, c.format);
      auto sub_key = [&](const char* key, const std::string& flag, auto& target) {
        if (!given(flag) && file.contains(key))
          target = file.at(key).get<std::decay_t<decltype(target)>>();
      };
      sub_key("lambda", "--lambda", c.lambda);
      sub_key("pieces", "--pieces", c.pieces);
      sub_key("m", "--m", c.m);
      sub_key("n", "--n", c.n);
      sub_key("m_lo", "--m-lo", c.m_lo);
      sub_key("m_hi", "--m-hi", c.m_hi);
      if (!given("--tol-m") && !given("--tol") && file.contains("tol_m"))
        c.tol_m = file.at("tol_m").get<double>();
      sub_key("n_lo", "--n-lo", c.n_lo);
      sub_key("n_hi", "--n-hi", c.n_hi);
      sub_key("s_max", "--s-max", c.s_max);
      sub_key("f_max", "--f-max", c.f_max);
    }
    if (!(c.abs_tol > 0.0) || !(c.rel_tol > 0.0))
      throw std::invalid_argument("tolerances must be positive");
    fs::create_directories(c.out);

    if (*m1) return cmd_m1(c);
    if (*orbit) return cmd_orbit(c, false);
    if (*ident) return cmd_orbit(c, true);
    if (*bif) return cmd_bifurcate(c);
    if (*tfe) return cmd_tfe4(c);
    if (*iv) return cmd_intervals(c);
    if (*par) return cmd_params(c);
    if (*pos) return cmd_positive(c);
  } catch (const MatchingFailure& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const RootCountMismatch& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const NoSettling& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 3;
  } catch (const NewtonDiverged& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 3;
  } catch (const BracketInvalid& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 4;
  } catch (const OutOfRange& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
