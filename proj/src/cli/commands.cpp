#include <CLI11.hpp>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>

#include "epkit/cli.hpp"
#include "epkit/epfinder.hpp"
#include "epkit/errors.hpp"
#include "epkit/metric.hpp"
#include "epkit/models.hpp"
#include "epkit/sturmian.hpp"

namespace epkit::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_number(const std::string& s, const std::string& what) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw UsageError(what + ": '" + s + "' is not a finite number");
  return v;
}

std::pair<double, double> parse_range(const std::string& s) {
  // The separator is the first ':' after the leading character, so a
  // negative lower bound is fine.
  const auto colon = s.find(':', 1);
  if (colon == std::string::npos) throw UsageError("--range: expected a:b, got '" + s + "'");
  const double a = parse_number(s.substr(0, colon), "--range");
  const double b = parse_number(s.substr(colon + 1), "--range");
  if (!(a < b)) throw UsageError("--range: lower bound must be below upper bound");
  return {a, b};
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    out.push_back(parse_number(s.substr(start, end - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

std::string range_text(std::pair<double, double> r) { return format_number(r.first) + ":" + format_number(r.second); }

json complex_json(cdouble z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// ---- options shared by the model-based commands ----

struct ModelOptions {
  std::string model = "epn";
  int n = 6;
  std::uint64_t seed = 42;
  double y = 0;
  bool y_given = false;
};

void add_model_options(CLI::App* app, ModelOptions& o) {
  app->add_option("--model", o.model, "epn | bc | hermitian-demo")->capture_default_str();
  app->add_option("--n", o.n, "dimension")->capture_default_str();
  app->add_option("--seed", o.seed, "seed of the hermitian-demo pencil")->capture_default_str();
  app->add_option_function<double>(
      "--y", [&o](double v) { o.y = v; o.y_given = true; }, "real shift of the bc coupling, z = y + i sqrt(1 - r^2)");
}

models::ModelSpec make_model(const ModelOptions& o) {
  if (o.n < 2) throw UsageError("--n must be at least 2");
  if (o.y_given && o.model != "bc") throw UsageError("--y applies to --model bc only");
  if (o.model == "epn") return models::Epn{o.n};
  if (o.model == "hermitian-demo") return models::HermitianDemo{o.n, o.seed};
  if (o.model == "bc") return models::BoundaryControlled{o.n, models::ShiftedCircle{o.y, 0}};
  throw UsageError("--model must be one of epn, bc, hermitian-demo");
}

std::string param_name(const ModelOptions& o) { return o.model == "bc" ? "r" : "t"; }

std::map<std::string, std::string> model_flags(const ModelOptions& o) {
  std::map<std::string, std::string> f{{"model", o.model}, {"n", std::to_string(o.n)}};
  if (o.model == "hermitian-demo") f["seed"] = std::to_string(o.seed);
  if (o.model == "bc") f["y"] = format_number(o.y);
  return f;
}

void check_param(const ModelOptions& o, const std::string& given) {
  if (!given.empty() && given != param_name(o))
    throw UsageError("--param " + given + " does not apply to --model " + o.model + " (expected " + param_name(o) +
                     ")");
}

// ---- results: named files or stdout ----

struct Output {
  std::string path;  // empty: stdout
  std::string content;
};

void emit(const std::vector<Output>& outs, std::ostream& out) {
  for (const auto& o : outs) {
    if (o.path.empty())
      out << o.content;
    else
      write_atomic(o.path, o.content);
  }
}

// ---- sweep ----

struct SweepOptions {
  ModelOptions model;
  std::string param;
  std::string range = "0:1";
  int samples = 101;
  std::string format = "csv";
  std::string precision = "double";
  std::string out;
};

std::vector<Output> run_sweep(const SweepOptions& o) {
  const auto model = make_model(o.model);
  check_param(o.model, o.param);
  const auto range = parse_range(o.range);
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
  const Precision tier = precision_from_string(o.precision);
  if (tier == Precision::Exact) throw UsageError("--precision exact is not available for sweeps");

  const auto s = ep::sweep(model, range.first, range.second, o.samples, tier);
  const int n = s.tracks();
  if (o.format == "csv") {
    std::vector<std::string> header{"index", s.param};
    for (int k = 0; k < n; ++k) {
      header.push_back("re_" + std::to_string(k));
      header.push_back("im_" + std::to_string(k));
      header.push_back("real_" + std::to_string(k));
    }
    header.push_back("ambiguous");
    CsvTable t(header);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      std::vector<std::string> row{std::to_string(i), format_number(s.grid[i])};
      for (int k = 0; k < n; ++k) {
        row.push_back(format_number(s.values[i][k].real()));
        row.push_back(format_number(s.values[i][k].imag()));
        row.push_back(s.real[i][k] ? "1" : "0");
      }
      row.push_back(s.ambiguous[i] ? "1" : "0");
      t.row(row);
    }
    return {{o.out, t.str()}};
  }

  Provenance p{"sweep", models::describe(model), model_flags(o.model), o.model.seed, tier};
  p.flags["param"] = s.param;
  p.flags["range"] = range_text(range);
  p.flags["samples"] = std::to_string(o.samples);
  json tracks = json::array();
  for (int k = 0; k < n; ++k) {
    json re = json::array(), im = json::array(), real = json::array();
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      re.push_back(s.values[i][k].real());
      im.push_back(s.values[i][k].imag());
      real.push_back(static_cast<bool>(s.real[i][k]));
    }
    tracks.push_back({{"re", re}, {"im", im}, {"real", real}});
  }
  json ambiguous = json::array();
  for (bool a : s.ambiguous) ambiguous.push_back(a);
  const json doc{{"provenance", provenance_json(p)},
                 {"param", s.param},
                 {"grid", s.grid},
                 {"tracks", tracks},
                 {"ambiguous", ambiguous}};
  return {{o.out, doc.dump(2) + "\n"}};
}

// ---- sturmian ----

struct SturmianOptions {
  int n = 6;
  double y = 0;
  std::string range = "0:5";
  int samples = 2000;
  std::string out = "sturmian.csv";
};

std::string sidecar_path(const std::string& csv) {
  std::filesystem::path p(csv);
  p.replace_extension(".poles.json");
  return p.string();
}

struct SturmianRun {
  std::vector<Output> files;
  std::vector<double> vertical_lines;
};

SturmianRun run_sturmian(const SturmianOptions& o) {
  if (o.n < 2) throw UsageError("--n must be at least 2");
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  if (o.out.empty()) throw UsageError("--out must name a file");
  const auto range = parse_range(o.range);
  const auto s = sturmian::bivariate_secular(o.n, o.y);
  const auto trace = sturmian::branch_trace(s, range.first, range.second, o.samples);

  CsvTable t({"E", "r_plus", "r_minus", "r2", "in_model"});
  for (const auto& p : trace.points)
    t.row({format_number(p.E), format_number(p.r_plus), format_number(p.r_minus), format_number(p.r2),
           p.in_model ? "1" : "0"});

  Provenance prov{"sturmian", "bc(n=" + std::to_string(o.n) + ", z=y+i*sqrt(1-r^2))", {}, 42, Precision::Exact};
  prov.flags = {{"n", std::to_string(o.n)},
                {"y", format_number(o.y)},
                {"range", range_text(range)},
                {"samples", std::to_string(o.samples)}};
  auto points = [](const std::vector<sturmian::BranchPoint>& v) {
    json a = json::array();
    for (const auto& p : v) {
      json j{{"E", p.E}, {"kind", sturmian::to_string(p.kind)}, {"multiplicity", p.multiplicity}};
      if (p.kind == sturmian::BranchPoint::Kind::BranchMerge) j["r2"] = p.r2;
      a.push_back(j);
    }
    return a;
  };
  std::vector<sturmian::BranchPoint> poles;
  for (const auto& p : sturmian::sturmian_poles(s))
    if (p.E >= range.first && p.E <= range.second) poles.push_back(p);
  const json doc{{"provenance", provenance_json(prov)},
                 {"data", std::filesystem::path(o.out).filename().string()},
                 {"poles", points(poles)},
                 {"features", points(sturmian::sturmian_features(s, range.first, range.second))},
                 {"vertical_lines", trace.vertical_lines}};
  return {{{o.out, t.str()}, {sidecar_path(o.out), doc.dump(2) + "\n"}}, trace.vertical_lines};
}

// ---- find-ep ----

struct FindOptions {
  ModelOptions model;
  std::string param;
  std::string range;
  bool scan_y = false;
  std::string out;
};

json point_json(const ep::CriticalPoint& p) {
  json params = json::object();
  for (const auto& [k, v] : p.params) params[k] = v;
  json j{{"params", params},
         {"E", complex_json(p.E)},
         {"kind", ep::to_string(p.kind)},
         {"order", p.order},
         {"algebraic_multiplicity", p.algebraic},
         {"geometric_multiplicity", p.geometric},
         {"residuals",
          {{"discriminant", p.residuals.discriminant},
           {"coalescence_angle", p.residuals.coalescence_angle},
           {"rank_defect", p.residuals.rank_defect},
           {"cluster_radius", p.residuals.cluster_radius},
           {"sigma_ratio", p.residuals.sigma_ratio}}}};
  if (p.level_a >= 0) j["levels"] = {p.level_a, p.level_b};
  return j;
}

std::vector<Output> run_find(const FindOptions& o) {
  const auto model = make_model(o.model);
  if (o.range.empty()) throw UsageError("--range is required");
  const auto range = parse_range(o.range);
  Provenance prov{"find-ep", models::describe(model), model_flags(o.model), o.model.seed, Precision::Extended};
  prov.flags["range"] = range_text(range);

  ep::LocateResult r;
  if (o.scan_y) {
    if (o.model.model != "bc") throw UsageError("--scan-y applies to --model bc only");
    if (o.model.y_given) throw UsageError("--scan-y scans y; do not pass --y");
    if (!o.param.empty() && o.param != "y") throw UsageError("--scan-y scans y; --param must be y or omitted");
    prov.flags.erase("y");
    prov.flags["scan-y"] = "true";
    prov.model = "bc(n=" + std::to_string(o.model.n) + ", z=y+i*sqrt(1-r^2))";
    r = ep::ep_locate_2d_bc(o.model.n, range.first, range.second);
  } else {
    check_param(o.model, o.param);
    prov.flags["param"] = param_name(o.model);
    r = ep::ep_locate_1d(model, range.first, range.second);
  }
  json points = json::array(), unresolved = json::array();
  for (const auto& p : r.points) points.push_back(point_json(p));
  for (const auto& u : r.unresolved)
    unresolved.push_back({{"param", u.param}, {"lo", u.lo}, {"hi", u.hi}, {"reason", u.reason}});
  const json doc{{"provenance", provenance_json(prov)}, {"points", points}, {"unresolved", unresolved}};
  return {{o.out, doc.dump(2) + "\n"}};
}

// ---- metric ----

struct MetricOptions {
  ModelOptions model;
  std::optional<double> t, r;
  std::string kappa;
  std::string out;
};

double metric_param(const MetricOptions& o) {
  const auto& given = o.model.model == "bc" ? o.r : o.t;
  const auto& other = o.model.model == "bc" ? o.t : o.r;
  if (other) throw UsageError(std::string("--") + (o.model.model == "bc" ? "t" : "r") + " does not apply to --model " +
                              o.model.model);
  if (!given) throw UsageError("--" + param_name(o.model) + " is required");
  return *given;
}

std::vector<double> kappa_of(const std::string& s) { return s.empty() ? std::vector<double>{} : parse_list(s, "--kappa"); }

json matrix_json(const DenseMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

std::vector<Output> run_metric(const MetricOptions& o) {
  const auto model = make_model(o.model);
  const double x = metric_param(o);
  const auto kappa = kappa_of(o.kappa);
  Provenance prov{"metric", models::describe(model), model_flags(o.model), o.model.seed, Precision::Extended};
  prov.flags[param_name(o.model)] = format_number(x);
  if (!o.kappa.empty()) prov.flags["kappa"] = join(kappa);
  const auto mo = metric::build_metric(models::dense_at(model, x), kappa);
  const json doc{{"provenance", provenance_json(prov)},
                 {"theta", matrix_json(mo.theta())},
                 {"kappa", mo.kappa()},
                 {"residual", mo.residual()},
                 {"relative_residual", mo.relative_residual()},
                 {"min_eig", mo.min_eig()},
                 {"normalized_min_eig", mo.normalized_min_eig()},
                 {"cond", mo.cond()},
                 {"basis_cond", mo.basis_cond()}};
  return {{o.out, doc.dump(2) + "\n"}};
}

struct MetricSweepOptions {
  ModelOptions model;
  std::string t_grid, r_grid;
  std::string kappa;
  std::string out;
};

std::vector<Output> run_metric_sweep(const MetricSweepOptions& o) {
  const auto model = make_model(o.model);
  const bool bc = o.model.model == "bc";
  const std::string& given = bc ? o.r_grid : o.t_grid;
  if (!(bc ? o.t_grid : o.r_grid).empty())
    throw UsageError(std::string("--") + (bc ? "t" : "r") + "-grid does not apply to --model " + o.model.model);
  if (given.empty()) throw UsageError("--" + param_name(o.model) + "-grid is required");
  const auto grid = parse_list(given, "--" + param_name(o.model) + "-grid");
  const auto pts = metric::metric_conditioning_sweep(model, grid, kappa_of(o.kappa));
  CsvTable t({param_name(o.model), "ok", "min_eig", "cond", "relative_residual", "error"});
  for (const auto& p : pts)
    t.row({format_number(p.param), p.ok ? "1" : "0", p.ok ? format_number(p.min_eig) : "",
           p.ok ? format_number(p.cond) : "", p.ok ? format_number(p.relative_residual) : "", p.error});
  return {{o.out, t.str()}};
}

// ---- figures ----

std::string sweep_script(int k, int tracks, const std::string& param, bool real_only) {
  std::ostringstream s;
  const std::string data = "fig" + std::to_string(k) + ".csv";
  s << "# gnuplot script for " << data << "\n"
    << "set datafile separator ','\n"
    << "set key off\n"
    << "set xlabel '" << param << "'\n"
    << "set ylabel 'Re E'\n";
  if (real_only) {
    s << "# solid: real levels; dots: real parts of complex levels\n"
      << "plot for [k=0:" << tracks - 1 << "] '" << data << "' skip 1 using 2:(column(5+3*k) ? column(3+3*k) : NaN) "
      << "with lines lw 2, \\\n"
      << "     for [k=0:" << tracks - 1 << "] '" << data << "' skip 1 using 2:(column(5+3*k) ? NaN : column(3+3*k)) "
      << "with points pt 7 ps 0.2\n";
  } else {
    s << "plot for [k=0:" << tracks - 1 << "] '" << data << "' skip 1 using 2:(column(3+3*k)) with lines\n";
  }
  return s.str();
}

std::string sturmian_script(int k, const std::vector<double>& vertical) {
  std::ostringstream s;
  const std::string data = "fig" + std::to_string(k) + ".csv";
  s << "# gnuplot script for " << data << "\n"
    << "set datafile separator ','\n"
    << "set key off\n"
    << "set xlabel 'E'\n"
    << "set ylabel 'r'\n"
    << "set yrange [-1.5:1.5]\n"
    << "# model boundary |r| = 1\n"
    << "set arrow from graph 0, first 1 to graph 1, first 1 nohead dt 2\n"
    << "set arrow from graph 0, first -1 to graph 1, first -1 nohead dt 2\n";
  for (double v : vertical)
    s << "set arrow from first " << format_number(v) << ", graph 0 to first " << format_number(v)
      << ", graph 1 nohead lw 2\n";
  s << "plot '" << data << "' skip 1 using 1:2 with points pt 7 ps 0.2, \\\n"
    << "     '' skip 1 using 1:3 with points pt 7 ps 0.2\n";
  return s.str();
}

std::vector<Output> run_figure(int k, const std::string& dir) {
  if (k < 1 || k > 6) throw UsageError("figure number must be 1..6");
  const std::string stem = (std::filesystem::path(dir) / ("fig" + std::to_string(k))).string();
  if (k <= 3) {
    SweepOptions o;
    o.param = "t";
    o.out = stem + ".csv";
    if (k == 1) {
      o.model = {"hermitian-demo", 4, 1};
      o.range = "-1:1";
      o.samples = 2001;
    } else if (k == 2) {
      o.model = {"epn", 8};
      o.range = "-0.5:0.5";
      o.samples = 201;
    } else {
      o.model = {"epn", 6};
      o.range = "-0.3:1";
      o.samples = 261;
    }
    auto files = run_sweep(o);
    files.push_back({stem + ".gp", sweep_script(k, o.model.n, "t", k == 3)});
    return files;
  }
  SturmianOptions o;
  o.out = stem + ".csv";
  o.samples = 2000;
  if (k == 4) {
    o.n = 6;
    o.y = 0;
    o.range = "0:5";
  } else {
    o.n = 5;
    o.y = k == 5 ? -0.5 : -0.8;
    o.range = "-1:5";
  }
  auto run = run_sturmian(o);
  run.files.push_back({stem + ".gp", sturmian_script(k, run.vertical_lines)});
  return run.files;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exceptional-point and quasi-Hermitian metric toolkit"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::vector<Output> outputs;
  std::function<std::vector<Output>()> action;

  SweepOptions sw;
  auto* c_sweep = app.add_subcommand("sweep", "eigenvalue tracks over a parameter range");
  add_model_options(c_sweep, sw.model);
  c_sweep->add_option("--param", sw.param, "t (epn, hermitian-demo) or r (bc)");
  c_sweep->add_option("--range", sw.range, "a:b")->capture_default_str();
  c_sweep->add_option("--samples", sw.samples)->capture_default_str();
  c_sweep->add_option("--format", sw.format, "csv | json")->capture_default_str();
  c_sweep->add_option("--precision", sw.precision, "double | extended")->capture_default_str();
  c_sweep->add_option("--out", sw.out, "output file (default stdout)");
  c_sweep->callback([&] { action = [&] { return run_sweep(sw); }; });

  SturmianOptions st;
  auto* c_st = app.add_subcommand("sturmian", "branch trace r(E) of the bc family plus a pole sidecar");
  c_st->add_option("--n", st.n)->capture_default_str();
  c_st->add_option("--y", st.y)->capture_default_str();
  c_st->add_option("--range", st.range, "E range a:b")->capture_default_str();
  c_st->add_option("--samples", st.samples)->capture_default_str();
  c_st->add_option("--out", st.out, "CSV file; the sidecar goes next to it")->capture_default_str();
  c_st->callback([&] { action = [&] { return run_sturmian(st).files; }; });

  FindOptions fe;
  auto* c_find = app.add_subcommand("find-ep", "locate and classify degeneracies");
  add_model_options(c_find, fe.model);
  c_find->add_option("--param", fe.param);
  c_find->add_option("--range", fe.range, "a:b");
  c_find->add_flag("--scan-y", fe.scan_y, "bc only: scan the coupling shift y");
  c_find->add_option("--out", fe.out, "output file (default stdout)");
  c_find->callback([&] { action = [&] { return run_find(fe); }; });

  MetricOptions me;
  auto* c_metric = app.add_subcommand("metric", "metric operator at one parameter value");
  add_model_options(c_metric, me.model);
  c_metric->add_option_function<double>("--t", [&](double v) { me.t = v; });
  c_metric->add_option_function<double>("--r", [&](double v) { me.r = v; });
  c_metric->add_option("--kappa", me.kappa, "comma-separated positive weights (default all 1)");
  c_metric->add_option("--out", me.out, "output file (default stdout)");
  c_metric->callback([&] { action = [&] { return run_metric(me); }; });

  MetricSweepOptions ms;
  auto* c_ms = app.add_subcommand("metric-sweep", "metric conditioning over a list of parameter values");
  add_model_options(c_ms, ms.model);
  c_ms->add_option("--t-grid", ms.t_grid, "comma-separated t values");
  c_ms->add_option("--r-grid", ms.r_grid, "comma-separated r values");
  c_ms->add_option("--kappa", ms.kappa);
  c_ms->add_option("--out", ms.out, "output file (default stdout)");
  c_ms->callback([&] { action = [&] { return run_metric_sweep(ms); }; });

  int figure = 0;
  std::string out_dir = ".";
  auto* c_fig = app.add_subcommand("figure", "canonical data and a gnuplot script for figure k");
  c_fig->add_option("k", figure, "1..6")->required();
  c_fig->add_option("--out-dir", out_dir)->capture_default_str();
  c_fig->callback([&] { action = [&] { return run_figure(figure, out_dir); }; });

  std::vector<std::string> storage(args);
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    emit(action(), out);
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace epkit::cli
