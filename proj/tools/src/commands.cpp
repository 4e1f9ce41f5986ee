#include "confbound_cli/commands.hpp"

#include "confbound/constants.hpp"
#include "confbound/geometry_suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace confbound::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json header(const std::string& command) {
  return {{"tool", "confbound"}, {"version", kVersion}, {"command", command}, {"generated_at", utc_timestamp()}};
}

std::ofstream open_output(const ExperimentConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + c.out.string() + ": " + ec.message());
  }
  std::ofstream out(c.out / name);
  if (!out) {
    throw ConfigError("cannot write " + (c.out / name).string());
  }
  return out;
}

void write_json(const ExperimentConfig& c, const std::string& name, const json& doc) {
  auto out = open_output(c, name);
  out << doc.dump(2) << '\n';
}

// Comment lines precede the column header; only they may differ between runs.
void csv_preamble(std::ostream& out, const std::string& command, const ExperimentConfig& c) {
  out << "# confbound " << kVersion << ' ' << command << '\n'
      << "# generated_at=" << utc_timestamp() << '\n'
      << "# m=" << c.m << " level=" << c.level << " seed=" << c.seed << '\n';
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') {
      out += "\"\"";
    } else {
      out += ch == '\n' ? ' ' : ch;
    }
  }
  return out + "\"";
}

std::vector<double> to_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::shared_ptr<const Mesh> make_mesh(int m, int level) {
  try {
    return std::make_shared<const Mesh>(build_mesh(m, level));
  } catch (const MeshError& e) {
    throw ConfigError(std::string("mesh: ") + e.what());
  }
}

double slack_for(const ExperimentConfig& c) { return c.slack >= 0.0 ? c.slack : default_slack(c.m); }

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"geom-check", "spectrum", "bound-scan", "com",
                                              "vfield",     "optimize", "report"};
  return names;
}

int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log) {
  static const std::map<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>> table{
      {"geom-check", cmd_geom_check}, {"spectrum", cmd_spectrum}, {"bound-scan", cmd_bound_scan},
      {"com", cmd_com},               {"vfield", cmd_vfield},     {"optimize", cmd_optimize},
      {"report", cmd_report},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    throw ConfigError("unknown subcommand \"" + name + "\"");
  }
  return it->second(config, log);
}

int cmd_geom_check(const ExperimentConfig& c, std::ostream& log) {
  const IdentityResiduals r = geometry_identity_suite(c.m, c.geometry.samples, c.seed, c.geometry.radius);
  const bool pass = r.max() <= c.geometry.tol;
  write_json(c, "geom_check.json",
             {{"header", header("geom-check")},
              {"m", c.m},
              {"samples", r.samples},
              {"seed", c.seed},
              {"radius", c.geometry.radius},
              {"tol", c.geometry.tol},
              {"residuals",
               {{"mobius_inverse", r.mobius_inverse},
                {"unit_norm", r.unit_norm},
                {"conjugation", r.conjugation},
                {"cap_involution", r.cap_involution},
                {"fold_idempotence", r.fold_idempotence},
                {"fold_reflection", r.fold_reflection}}},
              {"max", r.max()},
              {"pass", pass}});
  log << "geom-check m=" << c.m << " samples=" << r.samples << " max residual " << format_number(r.max()) << " "
      << verdict(pass) << '\n';
  return pass ? kExitSuccess : kExitCheckFailure;
}

int cmd_spectrum(const ExperimentConfig& c, std::ostream& log) {
  const auto mesh = make_mesh(c.m, c.level);
  const auto metrics = build_metrics(c, mesh);
  {
    auto off = open_output(c, "mesh.off");
    write_off(off, *mesh);
  }
  auto out = open_output(c, "spectrum.csv");
  csv_preamble(out, "spectrum", c);
  out << "metric,k,lambda,lambda_normalized,volume,residual\n";
  bool ok = true;
  for (const auto& [label, g] : metrics) {
    try {
      const SpectrumResult s = solve_bottom(assemble(g, *mesh), eigen_options(c));
      for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
        out << csv_field(label) << ',' << k << ',' << format_number(s.eigenvalues[k]) << ','
            << format_number(normalized_eigenvalue(s, static_cast<int>(k), c.m)) << ',' << format_number(s.volume)
            << ',' << format_number(s.residuals[k]) << '\n';
      }
      log << "spectrum " << label << ": lambda_1 Vol^{2/m} = " << format_number(normalized_eigenvalue(s, 1, c.m))
          << ", lambda_2 Vol^{2/m} = " << format_number(normalized_eigenvalue(s, 2, c.m)) << '\n';
    } catch (const std::exception& e) {
      ok = false;
      log << "spectrum " << label << ": error: " << e.what() << '\n';
    }
  }
  return ok ? kExitSuccess : kExitCheckFailure;
}

std::vector<std::string> bound_scan_columns(int m) {
  std::vector<std::string> cols{"metric",  "volume",         "lambda1_normalized", "lambda2_normalized",
                                "bound",   "margin",         "whole_sphere",       "zero_converged",
                                "t",       "field_residual"};
  for (int j = 0; j <= m; ++j) {
    cols.push_back("rayleigh_" + std::to_string(j));
  }
  for (const char* name : {"averaging", "holder", "fold", "change_of_variables", "estimate", "bound_link"}) {
    cols.emplace_back(name);
  }
  cols.emplace_back("all_hold");
  cols.emplace_back("error");
  return cols;
}

int cmd_bound_scan(const ExperimentConfig& c, std::ostream& log) {
  const auto mesh = make_mesh(c.m, c.level);
  const auto metrics = build_metrics(c, mesh);
  ChainOptions options;
  options.zero = zero_options(c);
  options.slack = c.slack;
  options.center = center_options(c);

  auto csv = open_output(c, "bound_scan.csv");
  auto jsonl = open_output(c, "chains.jsonl");
  csv_preamble(csv, "bound-scan", c);
  const auto columns = bound_scan_columns(c.m);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    csv << (k ? "," : "") << columns[k];
  }
  csv << '\n';

  int failures = 0;
  for (const auto& [label, g] : metrics) {
    std::vector<std::string> row{csv_field(label)};
    try {
      const auto d = std::make_shared<const Discretization>(discretize(g, mesh));
      const SpectrumResult s = solve_bottom(d->pair, eigen_options(c));
      const ChainReport r = bound_chain(d, s, options);
      for (double v : {r.volume, r.normalized_lambda1, r.normalized_lambda2, r.bound,
                       (r.bound - r.normalized_lambda2) / r.bound}) {
        row.push_back(format_number(v));
      }
      row.push_back(r.whole_sphere ? "1" : "0");
      row.push_back(r.zero_converged ? "1" : "0");
      row.push_back(format_number(r.t));
      row.push_back(format_number(r.field_residual));
      for (const auto& link : r.links) {
        row.push_back(link.holds ? "1" : "0");
      }
      row.push_back(r.all_hold() ? "1" : "0");
      row.emplace_back();
      json doc = to_json(r);
      doc["metric"] = label;
      jsonl << doc.dump() << '\n';
      if (!r.all_hold()) {
        ++failures;
      }
      log << "bound-scan " << label << ": lambda_2 Vol^{2/m} = " << format_number(r.normalized_lambda2) << " / "
          << format_number(r.bound) << ' ' << verdict(r.all_hold()) << '\n';
    } catch (const std::exception& e) {
      ++failures;
      row.resize(1);
      row.resize(columns.size() - 1);
      row.push_back(csv_field(e.what()));
      jsonl << json{{"metric", label}, {"error", e.what()}}.dump() << '\n';
      log << "bound-scan " << label << ": error: " << e.what() << '\n';
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      csv << (k ? "," : "") << row[k];
    }
    csv << '\n';
  }
  log << "bound-scan: " << metrics.size() - static_cast<std::size_t>(failures) << '/' << metrics.size()
      << " metrics passed\n";
  return failures == 0 ? kExitSuccess : kExitCheckFailure;
}

namespace {

std::vector<std::pair<SpherePoint, double>> probe_path(const ExperimentConfig& c) {
  std::vector<std::pair<SpherePoint, double>> path;
  if (!c.center.path.empty()) {
    for (const auto& stop : c.center.path) {
      try {
        path.emplace_back(SpherePoint::normalized(Eigen::Map<const Eigen::VectorXd>(
                              stop.p.data(), static_cast<Eigen::Index>(stop.p.size()))),
                          stop.t);
      } catch (const GeometryError& e) {
        throw ConfigError(std::string("center.path: ") + e.what());
      }
    }
    return path;
  }
  // A generic pole, away from mesh vertices, approaching the whole-sphere limit.
  Eigen::VectorXd v(c.m + 1);
  for (int k = 0; k <= c.m; ++k) {
    v[k] = 1.0 + 0.37 * k;
  }
  const SpherePoint p = SpherePoint::normalized(v);
  for (double t : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.99999, 1.0}) {
    path.emplace_back(p, t);
  }
  return path;
}

json center_report(const std::string& source, const DiscreteMeasure& mu, const ExperimentConfig& c) {
  const CenterOptions options = center_options(c);
  const CenterOfMass whole = center_of_mass(mu, options);
  const auto path = probe_path(c);
  const auto centers = center_continuity_probe(mu, path, options);
  json stops = json::array();
  for (std::size_t k = 0; k < path.size(); ++k) {
    stops.push_back({{"p", to_vector(path[k].first.coords())},
                     {"t", path[k].second},
                     {"center", to_vector(centers[k].coords())},
                     {"distance_to_whole", (centers[k].coords() - whole.c.coords()).norm()}});
  }
  return {{"source", source},
          {"atoms", mu.size()},
          {"total_mass", mu.total_mass()},
          {"center", to_vector(whole.c.coords())},
          {"residual", whole.residual},
          {"iterations", whole.iterations},
          {"path", stops}};
}

}  // namespace

int cmd_com(const ExperimentConfig& c, std::ostream& log) {
  json entries = json::array();
  bool ok = true;
  auto run = [&](const std::string& source, const DiscreteMeasure& mu) {
    try {
      json entry = center_report(source, mu, c);
      log << "com " << source << ": |c| = " << format_number(Eigen::Map<const Eigen::VectorXd>(
                                                   entry["center"].get<std::vector<double>>().data(), c.m + 1)
                                                   .norm())
          << ", residual " << format_number(entry["residual"].get<double>()) << '\n';
      entries.push_back(std::move(entry));
    } catch (const std::exception& e) {
      ok = false;
      entries.push_back({{"source", source}, {"error", e.what()}});
      log << "com " << source << ": error: " << e.what() << '\n';
    }
  };
  if (!c.center.atoms.empty()) {
    std::ifstream in(c.center.atoms);
    if (!in) {
      throw ConfigError("center.atoms: cannot open " + c.center.atoms);
    }
    DiscreteMeasure mu = [&] {
      try {
        return read_atoms(in);
      } catch (const std::exception& e) {
        throw ConfigError("center.atoms: " + std::string(e.what()));
      }
    }();
    if (mu.dim() != c.m) {
      throw ConfigError("center.atoms: atoms live on S^" + std::to_string(mu.dim()) + ", config has m=" +
                        std::to_string(c.m));
    }
    run(c.center.atoms, mu);
  } else {
    const auto mesh = make_mesh(c.m, c.level);
    const auto metrics = build_metrics(c, mesh);
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const DiscreteMeasure mu = volume_measure(metrics[k].metric, *mesh);
      if (k == 0) {
        auto atoms = open_output(c, "atoms.txt");
        write_atoms(atoms, mu);
      }
      run(metrics[k].label, mu);
    }
  }
  write_json(c, "com.json", {{"header", header("com")}, {"m", c.m}, {"level", c.level}, {"measures", entries}});
  return ok ? kExitSuccess : kExitCheckFailure;
}

int cmd_vfield(const ExperimentConfig& c, std::ostream& log) {
  const auto mesh = make_mesh(c.m, c.level);
  const auto metrics = build_metrics(c, mesh);
  json entries = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    const auto& [label, g] = metrics[k];
    json entry{{"metric", label}};
    try {
      const auto d = std::make_shared<const Discretization>(discretize(g, mesh));
      const SpectrumResult s = solve_bottom(d->pair, eigen_options(c));
      const VectorField field(d, first_excited(s), center_options(c));
      const ZeroSearchResult zero = find_zero(field, zero_options(c));
      const std::string grid_file = "vfield_" + std::to_string(k) + ".csv";
      {
        auto out = open_output(c, grid_file);
        csv_preamble(out, "vfield", c);
        out << "# metric=" << label << '\n';
        write_field_csv(out, zero.grid);
      }
      double t0_min = std::numeric_limits<double>::infinity();
      for (const auto& sample : zero.grid) {
        if (sample.t == 0.0) {
          t0_min = std::min(t0_min, sample.norm() / field.volume());
        }
      }
      entry["grid_file"] = grid_file;
      entry["volume"] = field.volume();
      entry["whole_sphere_value"] = to_vector(field.whole_sphere());
      entry["zero"] = {{"p", to_vector(zero.best.p)},
                       {"t", zero.best.t},
                       {"value", to_vector(zero.best.value)},
                       {"relative_norm", zero.relative_norm},
                       {"converged", zero.converged},
                       {"whole_sphere", zero.whole_sphere},
                       {"evaluations", zero.evaluations},
                       {"candidates", zero.candidates.size()}};
      entry["t0_min_relative_norm"] = t0_min;
      const bool grid_zero_at_t0 = t0_min <= c.grid.zero_threshold;
      entry["grid_zero_at_t0"] = grid_zero_at_t0;
      bool degree_ok = true;
      if (grid_zero_at_t0) {
        entry["degree"] = nullptr;
        entry["degree_note"] = "skipped: the t = 0 grid shows a zero";
      } else {
        try {
          const DegreeResult deg = reflection_symmetry_degree_check(field, degree_options(c));
          entry["degree"] = deg.degree;
          entry["degree_level"] = deg.level;
          degree_ok = deg.degree != 0;
        } catch (const DegreeError& e) {
          entry["degree"] = nullptr;
          entry["degree_note"] = e.what();
        }
      }
      const bool pass = zero.converged && degree_ok;
      entry["pass"] = pass;
      ok = ok && pass;
      log << "vfield " << label << ": |V|/Vol = " << format_number(zero.relative_norm) << " at t = "
          << format_number(zero.best.t) << ", degree "
          << (entry["degree"].is_null() ? std::string("n/a") : std::to_string(entry["degree"].get<int>())) << ' '
          << verdict(pass) << '\n';
    } catch (const std::exception& e) {
      ok = false;
      entry["error"] = e.what();
      entry["pass"] = false;
      log << "vfield " << label << ": error: " << e.what() << '\n';
    }
    entries.push_back(std::move(entry));
  }
  write_json(c, "vfield.json",
             {{"header", header("vfield")}, {"m", c.m}, {"level", c.level}, {"tol", c.grid.tol}, {"metrics", entries}});
  return ok ? kExitSuccess : kExitCheckFailure;
}

int cmd_optimize(const ExperimentConfig& c, std::ostream& log) {
  const auto mesh = make_mesh(c.m, c.level);
  const auto metrics = build_metrics(c, mesh);
  if (metrics.size() > 1) {
    log << "optimize: starting from the first of " << metrics.size() << " metrics\n";
  }
  const auto& [label, start] = metrics.front();
  const OptimizationRun run = maximize(start, mesh, maximize_options(c));
  {
    auto out = open_output(c, "optimize.jsonl");
    write_run_jsonl(out, run);
  }
  const double bound = second_eigenvalue_bound(c.m);
  const double slack = slack_for(c);
  const bool respected = run.best <= bound * (1.0 + slack);
  write_json(c, "optimize.json",
             {{"header", header("optimize")},
              {"m", c.m},
              {"level", c.level},
              {"start", label},
              {"degree", run.degree},
              {"evaluations", run.history.size()},
              {"start_objective", run.history.front().objective},
              {"best", run.best},
              {"best_coeffs", run.best_coeffs},
              {"termination", run.termination},
              {"bound", bound},
              {"slack", slack},
              {"bound_respected", respected}});
  log << "optimize " << label << ": " << run.history.size() << " evaluations, best lambda_2 Vol^{2/m} = "
      << format_number(run.best) << " (bound " << format_number(bound) << "), " << run.termination << '\n';
  return respected ? kExitSuccess : kExitCheckFailure;
}

namespace {

std::optional<json> read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    return std::nullopt;
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": unreadable report: " + e.what());
  }
}

std::vector<json> read_jsonl_file(const fs::path& path) {
  std::vector<json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": unreadable line: " + e.what());
    }
  }
  return out;
}

std::string num(const json& v) { return v.is_number() ? format_number(v.get<double>()) : "n/a"; }

}  // namespace

int cmd_report(const ExperimentConfig& c, std::ostream& log) {
  std::ostringstream md;
  std::vector<std::string> failures;
  md << "# confbound report\n\n"
     << "generated_at: " << utc_timestamp() << "\n\n"
     << "## Constants, m = " << c.m << "\n\n"
     << "| quantity | value |\n|---|---|\n"
     << "| sigma_m | " << format_number(sphere_volume(c.m)) << " |\n"
     << "| m sigma_m^{2/m} (round lambda_1 Vol^{2/m}) | " << format_number(first_eigenvalue_bound(c.m)) << " |\n"
     << "| m (2 sigma_m)^{2/m} (lambda_2 bound) | " << format_number(second_eigenvalue_bound(c.m)) << " |\n"
     << "| sigma_m m^{m/2} (identity m-energy) | " << format_number(identity_m_energy(c.m)) << " |\n";

  if (const auto geom = read_json_file(c.out / "geom_check.json")) {
    md << "\n## Geometry identities\n\n| identity | max residual |\n|---|---|\n";
    for (const auto& [name, value] : (*geom)["residuals"].items()) {
      md << "| " << name << " | " << num(value) << " |\n";
    }
    md << "\nsamples " << (*geom)["samples"] << ", m = " << (*geom)["m"] << ", "
       << verdict((*geom)["pass"].get<bool>()) << '\n';
    if (!(*geom)["pass"].get<bool>()) {
      failures.emplace_back("geometry identities");
    }
  }
  const auto chains = read_jsonl_file(c.out / "chains.jsonl");
  if (!chains.empty()) {
    md << "\n## Bound scan\n\n| metric | lambda_1 Vol^{2/m} | lambda_2 Vol^{2/m} | bound | chain |\n"
       << "|---|---|---|---|---|\n";
    for (const auto& r : chains) {
      const std::string label = r.value("metric", "?");
      if (r.contains("error")) {
        md << "| " << label << " | | | | error: " << r["error"].get<std::string>() << " |\n";
        failures.push_back("bound scan " + label);
        continue;
      }
      const bool hold = r["all_hold"].get<bool>();
      md << "| " << label << " | " << num(r["normalized_lambda1"]) << " | " << num(r["normalized_lambda2"]) << " | "
         << num(r["bound"]) << " | " << verdict(hold) << " |\n";
      if (!hold) {
        failures.push_back("bound scan " + label);
      }
    }
  }
  if (const auto vf = read_json_file(c.out / "vfield.json")) {
    md << "\n## Vector field zeros\n\n| metric | t | abs(V)/Vol | degree at t = 0 | result |\n|---|---|---|---|---|\n";
    for (const auto& e : (*vf)["metrics"]) {
      const std::string label = e.value("metric", "?");
      const bool pass = e.value("pass", false);
      if (e.contains("zero")) {
        md << "| " << label << " | " << num(e["zero"]["t"]) << " | " << num(e["zero"]["relative_norm"]) << " | "
           << (e["degree"].is_null() ? std::string("n/a") : e["degree"].dump()) << " | " << verdict(pass) << " |\n";
      } else {
        md << "| " << label << " | | | | error |\n";
      }
      if (!pass) {
        failures.push_back("vector field " + label);
      }
    }
  }
  if (const auto com = read_json_file(c.out / "com.json")) {
    md << "\n## Centers of mass\n\n| measure | center residual | iterations |\n|---|---|---|\n";
    for (const auto& e : (*com)["measures"]) {
      const std::string source = e.value("source", "?");
      if (e.contains("error")) {
        md << "| " << source << " | error | |\n";
        failures.push_back("center of mass " + source);
      } else {
        md << "| " << source << " | " << num(e["residual"]) << " | " << e["iterations"] << " |\n";
      }
    }
  }
  if (const auto opt = read_json_file(c.out / "optimize.json")) {
    const bool respected = (*opt)["bound_respected"].get<bool>();
    md << "\n## Optimization\n\nstart " << (*opt)["start"].get<std::string>() << ", "
       << (*opt)["evaluations"] << " evaluations: lambda_2 Vol^{2/m} " << num((*opt)["start_objective"]) << " -> "
       << num((*opt)["best"]) << " (bound " << num((*opt)["bound"]) << "), " << verdict(respected) << '\n';
    if (!respected) {
      failures.emplace_back("optimization bound");
    }
  }
  md << "\n## Summary\n\n";
  if (failures.empty()) {
    md << "no failures\n";
  } else {
    for (const auto& f : failures) {
      md << "- FAIL: " << f << '\n';
    }
  }
  {
    auto out = open_output(c, "report.md");
    out << md.str();
  }
  log << "report: " << (c.out / "report.md").string() << ", " << failures.size() << " failure(s)\n";
  return failures.empty() ? kExitSuccess : kExitCheckFailure;
}

}  // namespace confbound::cli
