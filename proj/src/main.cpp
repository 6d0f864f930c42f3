#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tgc/dsl.hpp"
#include "tgc/gauduchon.hpp"
#include "tgc/models.hpp"
#include "tgc/report.hpp"

namespace {

using tgc::cx;
using json = nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Accepts "1.5", "2i", "1+0.5i", "-3e-2-4i" (also 'j' for the unit).
cx parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw tgc::ConfigError("empty coordinate");
  auto to_double = [&](const std::string& text) {
    if (text == "+" || text.empty()) return 1.0;
    if (text == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw tgc::ConfigError("bad coordinate '" + raw + "'");
    }
    if (used != text.size())
      throw tgc::ConfigError("bad coordinate '" + raw + "'");
    return v;
  };
  bool imag_tail = (s.back() == 'i' || s.back() == 'j');
  std::string body = imag_tail ? s.substr(0, s.size() - 1) : s;
  // Split at the last +/- that is not a leading sign or exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (imag_tail && split != std::string::npos)
    return {to_double(body.substr(0, split)), to_double(body.substr(split))};
  if (imag_tail) return {0.0, to_double(body)};
  if (split != std::string::npos)
    throw tgc::ConfigError("bad coordinate '" + raw + "' (missing i?)");
  return {to_double(body), 0.0};
}

std::vector<cx> parse_point(const std::string& text) {
  std::vector<cx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw tgc::ConfigError("empty --point");
  return out;
}

struct ModelOpts {
  std::string model = "hopf";
  std::string metric_file;
  int n = 2;
  double lambda = 0.0;
  int degree = 2;
  double amplitude = 0.3;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd, bool allow_file) {
    cmd->add_option("--model", model,
                    "flat | fubini_study | hopf | hopf_lambda | iwasawa | "
                    "random_poly");
    if (allow_file)
      cmd->add_option("--metric-file", metric_file,
                      "metric definition file (overrides --model)");
    cmd->add_option("--n", n, "complex dimension");
    cmd->add_option("--lambda", lambda, "hopf_lambda family parameter");
    cmd->add_option("--degree", degree, "random_poly polynomial degree");
    cmd->add_option("--amplitude", amplitude, "random_poly amplitude");
    cmd->add_option("--model-seed", seed, "random_poly coefficient seed");
  }

  tgc::ModelSpec spec() const {
    tgc::ModelSpec s;
    try {
      s.name = tgc::model_from_string(model);
    } catch (const tgc::Error& e) {
      throw tgc::ConfigError(e.what());
    }
    s.n = n;
    s.lambda = lambda;
    s.degree = degree;
    s.amplitude = amplitude;
    s.seed = seed;
    return s;
  }

  tgc::MetricField field() const {
    if (!metric_file.empty()) {
      std::ifstream f(metric_file);
      if (!f) throw tgc::ConfigError("cannot read '" + metric_file + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      return tgc::expression_field(tgc::parse_metric(buf.str()), nullptr,
                                   metric_file);
    }
    try {
      return tgc::builtin(spec());
    } catch (const tgc::InvalidParameter& e) {
      throw tgc::ConfigError(e.what());
    }
  }
};

json mat_json(const tgc::Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

void print_matrix(std::ostream& out, const std::string& label,
                  const tgc::Mat& m) {
  out << label << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%12.6g%+12.6gi  ", m(i, j).real(),
                    m(i, j).imag());
      out << buf;
    }
    out << "\n";
  }
}

int cmd_curvature(const ModelOpts& mopts, const std::string& point_text,
                  double t, int order, const std::string& format,
                  const std::string& output) {
  tgc::MetricField field = mopts.field();
  tgc::ChartPoint p{parse_point(point_text)};
  if (p.n() != field.n)
    throw tgc::ConfigError("--point has " + std::to_string(p.n()) +
                           " coordinates, the metric has n = " +
                           std::to_string(field.n));
  if (order < 2 || order > 3)
    throw tgc::ConfigError("--order must be 2 or 3");
  if (field.in_domain && !field.in_domain(p))
    throw tgc::ConfigError("point is outside the metric's chart domain");

  tgc::CurvaturePackage pkg = tgc::chern_package(field, p);
  tgc::GauduchonCurvature direct = tgc::curvature_direct(t, pkg);
  tgc::GauduchonCurvature closed = tgc::curvature_closed_form(t, pkg);
  double route_residual =
      std::max(tgc::max_abs_diff(direct.R11, closed.R11),
               tgc::max_abs_diff(direct.R20, closed.R20));
  tgc::ScalarPair scal = tgc::gauduchon_scalars(t, pkg);
  tgc::MetricJet jet = tgc::evaluate_jet(field, p, order);

  if (format == "json") {
    json j;
    j["schema_version"] = tgc::kSchemaVersion;
    j["model"] = field.name;
    json coords = json::array();
    for (const cx& z : p.z) coords.push_back({z.real(), z.imag()});
    j["point"] = coords;
    j["t"] = t;
    j["jet_order"] = order;
    j["jet_conjugation_residual"] = jet.conjugation_residual();
    j["g"] = mat_json(pkg.jet.g);
    j["route_residual"] = route_residual;
    j["R11_max"] = closed.R11.max_abs();
    j["R20_max"] = closed.R20.max_abs();
    j["ricci1"] = mat_json(closed.ricci1);
    j["ricci2"] = mat_json(closed.ricci2);
    j["ricci3"] = mat_json(closed.ricci3);
    j["ricci4"] = mat_json(closed.ricci4);
    j["scal"] = scal.scal;
    j["scal_tilde"] = scal.scal_tilde;
    j["torsion_norm2"] = pkg.normT2;
    j["tau_norm2"] = pkg.normTau2;
    tgc::emit(j.dump(2) + "\n", output);
  } else if (format == "text") {
    std::ostringstream out;
    out << field.name << " at (";
    for (int i = 0; i < p.n(); ++i)
      out << (i ? ", " : "") << fmt(p.z[i].real()) << "+" << fmt(p.z[i].imag())
          << "i";
    out << "), t = " << fmt(t) << "\n\n";
    print_matrix(out, "g", pkg.jet.g);
    out << "\n";
    print_matrix(out, "ricci1", closed.ricci1);
    print_matrix(out, "ricci2", closed.ricci2);
    print_matrix(out, "ricci3", closed.ricci3);
    print_matrix(out, "ricci4", closed.ricci4);
    out << "\nscal        = " << fmt(scal.scal)
        << "\nscal_tilde  = " << fmt(scal.scal_tilde)
        << "\n|T|^2       = " << fmt(pkg.normT2)
        << "\n|tau|^2     = " << fmt(pkg.normTau2)
        << "\nmax |R11|   = " << fmt(closed.R11.max_abs())
        << "\nmax |R20|   = " << fmt(closed.R20.max_abs())
        << "\nroute residual (direct vs closed form) = "
        << fmt(route_residual) << "\n";
    tgc::emit(out.str(), output);
  } else {
    throw tgc::ConfigError("curvature --format must be json or text");
  }
  return 0;
}

int cmd_sweep(const ModelOpts& mopts, const std::string& quantity,
              const std::string& range, int points, std::uint64_t seed,
              const std::string& format, const std::string& output) {
  double a = 0.0, b = 0.0, step = 0.0;
  tgc::parse_t_range(range, a, b, step);
  if (!mopts.metric_file.empty())
    throw tgc::ConfigError("sweep works on built-in models only");
  tgc::SweepTable table;
  try {
    table = tgc::sweep(mopts.spec(), quantity, a, b, step, points, seed);
  } catch (const tgc::InvalidParameter& e) {
    throw tgc::ConfigError(e.what());
  }
  if (format == "json")
    tgc::emit(tgc::sweep_json(table), output);
  else if (format == "csv")
    tgc::emit(tgc::sweep_csv(table), output);
  else if (format == "text")
    tgc::emit(tgc::sweep_text(table), output);
  else
    throw tgc::ConfigError("sweep --format must be json, csv, or text");
  return 0;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed,
               double tol, bool stable, double perturb, long mc_samples,
               const std::string& format, const std::string& output) {
  tgc::VerifyConfig cfg;
  if (!suites.empty()) cfg.suites = suites;
  cfg.seed = seed;
  cfg.tolerance_override = tol;
  cfg.stable_output = stable;
  cfg.formula_perturbation = perturb;
  cfg.mc_samples = mc_samples;
  tgc::VerificationReport report = tgc::run_verification_suite(cfg);
  if (format == "json")
    tgc::emit(tgc::report_json(report), output);
  else if (format == "text")
    tgc::emit(tgc::report_text(report), output);
  else
    throw tgc::ConfigError("verify --format must be json or text");
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Curvature engine for the one-parameter family of Hermitian "
      "connections interpolating Lichnerowicz (t = 0) and Chern (t = 1)"};
  app.require_subcommand(1);

  // curvature
  auto* ccmd = app.add_subcommand(
      "curvature", "curvature dashboard of one metric at one point");
  ModelOpts copts;
  copts.attach(ccmd, true);
  std::string point_text;
  double ct = 1.0;
  int order = 2;
  std::string cformat = "text", coutput;
  ccmd->add_option("--point", point_text, "z1,...,zn (e.g. 1+0.5i,0.3)")
      ->required();
  ccmd->add_option("--t", ct, "connection parameter");
  ccmd->add_option("--order", order, "jet order to evaluate (2 or 3)");
  ccmd->add_option("--format", cformat, "json | text");
  ccmd->add_option("--output", coutput, "output file (default stdout)");

  // sweep
  auto* scmd = app.add_subcommand(
      "sweep", "tabulate a scalar quantity over a t grid");
  ModelOpts sopts;
  sopts.attach(scmd, false);
  std::string quantity, range;
  int spoints = 3;
  std::uint64_t ssweep_seed = 1;
  std::string sformat = "csv", soutput;
  scmd->add_option("--quantity", quantity,
                   "ric1_norm | scal | scal_tilde | hsc_min | hsc_max | "
                   "torsion_norm")
      ->required();
  scmd->add_option("--t-range", range, "a:b:step")->required();
  scmd->add_option("--points", spoints, "number of sample points");
  scmd->add_option("--seed", ssweep_seed, "point sampling seed");
  scmd->add_option("--format", sformat, "json | csv | text");
  scmd->add_option("--output", soutput, "output file (default stdout)");

  // verify
  auto* vcmd = app.add_subcommand(
      "verify", "run the identity verification suites");
  std::vector<std::string> suites;
  std::uint64_t vseed = 1;
  double vtol = 0.0;
  bool stable = false;
  double perturb = 0.0;
  long mc_samples = 100000;
  std::string vformat = "text", voutput;
  vcmd->add_option("--suite", suites,
                   "suite name or 'all' (repeatable); see README for names");
  vcmd->add_option("--seed", vseed, "verification seed");
  vcmd->add_option("--tol", vtol, "override every check tolerance");
  vcmd->add_flag("--stable-output", stable,
                 "omit timing so reruns are byte-identical");
  vcmd->add_option("--perturb", perturb,
                   "negative control: corrupt the closed-form route");
  vcmd->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
  vcmd->add_option("--format", vformat, "json | text");
  vcmd->add_option("--output", voutput, "output file (default stdout)");

  // lambda-star
  auto* lcmd = app.add_subcommand(
      "lambda-star",
      "critical Hopf family parameter with vanishing first Ricci form");
  double lt = 0.0;
  int ln = 2;
  lcmd->add_option("--t", lt, "connection parameter")->required();
  lcmd->add_option("--n", ln, "complex dimension")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ccmd->parsed())
      return cmd_curvature(copts, point_text, ct, order, cformat, coutput);
    if (scmd->parsed())
      return cmd_sweep(sopts, quantity, range, spoints, ssweep_seed, sformat,
                       soutput);
    if (vcmd->parsed())
      return cmd_verify(suites, vseed, vtol, stable, perturb, mc_samples,
                        vformat, voutput);
    if (lcmd->parsed()) {
      double lam = tgc::hopf_ricci_flat_lambda(lt, ln);
      std::cout << fmt(lam) << "\n";
      return 0;
    }
  } catch (const tgc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tgc::SyntaxError& e) {
    std::cerr << "metric file error: " << e.what() << "\n";
    return 2;
  } catch (const tgc::OutOfRange& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return 2;
  } catch (const tgc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
