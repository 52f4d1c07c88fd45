#include "fracsurf/cli.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "fracsurf/parallel.hpp"

namespace fracsurf {

using json = nlohmann::json;

namespace {

json estimate_json(const Estimate& e) {
  return json{{"value", e.value},
              {"error_bound", e.error_bound},
              {"kind", to_string(e.kind)},
              {"work", e.work},
              {"status", to_string(e.status)}};
}

json spec_json(const QuadratureSpec& q) {
  return json{{"method", to_string(q.method)},        {"rel_tol", q.rel_tol},
              {"abs_tol", q.abs_tol},                 {"max_subdivisions", q.max_subdivisions},
              {"truncation_radius", q.truncation_radius}, {"pv_epsilon", q.pv_epsilon},
              {"sample_budget", q.sample_budget},     {"seed", q.seed}};
}

// Shortest representation that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_tail(const Estimate& e) {
  return fmt(e.value) + "," + fmt(e.error_bound) + "," + to_string(e.kind) + "," + std::to_string(e.work);
}

// Evaluates a quantity; divergence and NaN become flagged estimates rather than aborting a grid.
Estimate guarded(const QuantityInputs& in, const FractionalParams& params, const QuadratureSpec& spec,
                 std::vector<std::string>& notes) {
  try {
    return evaluate(in, params, spec);
  } catch (const DivergenceError& e) {
    notes.push_back(e.what());
    return flagged_estimate(Status::divergent);
  } catch (const EvaluationError& e) {
    notes.push_back(e.what());
    return flagged_estimate(Status::non_convergent);
  }
}

json base_document(const ExperimentConfig& cfg, const char* target) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = to_string(cfg.command);
  doc["target"] = target;
  doc["inputs"] = json::parse(cfg.canonical);
  return doc;
}

RunOutput run_quantity(const ExperimentConfig& cfg) {
  RunOutput out;
  std::vector<std::string> notes;
  json doc = base_document(cfg, to_string(cfg.inputs.quantity));
  const QuadratureSpec& spec = cfg.command == Command::check ? cfg.check.spec : cfg.spec;
  bool flagged = false;
  std::ostringstream csv;
  if (cfg.command == Command::compute) {
    Estimate e = guarded(cfg.inputs, cfg.params, spec, notes);
    flagged = !e.ok();
    doc["result"] = estimate_json(e);
    csv << "value,error_bound,kind,work\n" << csv_tail(e) << "\n";
  } else {
    const std::string& par = cfg.grid.parameter;
    json records = json::array();
    csv << par << ",value,error_bound,kind,work\n";
    if (par == "s" && cfg.inputs.quantity == Quantity::gagliardo) notes.push_back("s does not enter the Gagliardo seminorm");
    for (double v : cfg.grid.values) {
      QuantityInputs in = cfg.inputs;
      FractionalParams params = cfg.params;
      if (par == "R") in.R = v;
      if (par == "height") in.height = v;
      if (par == "scale") in = dilated(cfg.inputs, v);
      if (par == "s") params = FractionalParams(params.n, v);
      Estimate e = guarded(in, params, spec, notes);
      flagged = flagged || !e.ok();
      records.push_back(json{{"grid", json{{par, v}}}, {"result", estimate_json(e)}});
      csv << fmt(v) << "," << csv_tail(e) << "\n";
    }
    doc["records"] = records;
  }
  doc["seed"] = spec.seed;
  doc["notes"] = notes;
  out.json = doc.dump(2) + "\n";
  out.csv = csv.str();
  out.exit_code = flagged ? exit_flagged : exit_ok;
  return out;
}

RunOutput run_check_command(const ExperimentConfig& cfg) {
  RunOutput out;
  CheckReport r = run_check(cfg.check);
  json doc = base_document(cfg, to_string(r.check_id));
  doc["verdict"] = to_string(r.verdict);
  json measured = json::array();
  for (const auto& m : r.measured) {
    json e = estimate_json(m.estimate);
    e["name"] = m.name;
    measured.push_back(e);
  }
  doc["measured"] = measured;
  json constants = json::array();
  // Derived from measured values; the bounds of their inputs are in the rows.
  for (const auto& c : r.empirical_constants)
    constants.push_back(json{{"name", c.name}, {"value", c.value}, {"error_bound", nullptr}, {"kind", "empirical"}});
  doc["empirical_constants"] = constants;
  doc["grid_columns"] = r.grid_columns;
  json rows = json::array();
  std::ostringstream csv;
  for (const auto& c : r.grid_columns) csv << c << ",";
  csv << "quantity,value,error_bound,kind,work\n";
  for (const auto& row : r.rows) {
    json e = estimate_json(row.estimate);
    e["coords"] = row.coords;
    e["quantity"] = row.quantity;
    rows.push_back(e);
    for (size_t k = 0; k < r.grid_columns.size(); ++k) csv << (k < row.coords.size() ? fmt(row.coords[k]) : "") << ",";
    csv << row.quantity << "," << csv_tail(row.estimate) << "\n";
  }
  doc["rows"] = rows;
  doc["notes"] = r.notes;
  doc["spec"] = spec_json(r.spec);
  doc["seed"] = r.seed;
  out.json = doc.dump(2) + "\n";
  out.csv = csv.str();
  out.exit_code = r.verdict == Verdict::pass ? exit_ok : (r.verdict == Verdict::fail ? exit_check_fail : exit_inconclusive);
  return out;
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

}  // namespace

RunOutput execute(const ExperimentConfig& cfg) {
  return cfg.command == Command::check ? run_check_command(cfg) : run_quantity(cfg);
}

int run(const RunOptions& opt) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  RunOutput result;
  try {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) throw ConfigError("/", "cannot read config file '" + opt.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
    if (opt.seed) {
      cfg.spec.seed = *opt.seed;
      cfg.check.spec.seed = *opt.seed;
      json c = json::parse(cfg.canonical);
      c["spec"]["seed"] = *opt.seed;
      cfg.canonical = c.dump();
    }
    set_thread_count(opt.threads);
    result = execute(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return exit_config;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DegenerateConfigurationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DivergenceError& e) {
    std::cerr << "computation flagged: " << e.what() << "\n";
    return exit_flagged;
  } catch (const EvaluationError& e) {
    std::cerr << "computation flagged: " << e.what() << "\n";
    return exit_flagged;
  }

  namespace fs = std::filesystem;
  fs::path dir(opt.out_dir);
  std::vector<std::string> written;
  try {
    fs::create_directories(dir);
    if (opt.format != OutputFormat::csv) {
      write_file(dir / "result.json", result.json);
      written.push_back("result.json");
    }
    if (opt.format != OutputFormat::json) {
      write_file(dir / "result.csv", result.csv);
      written.push_back("result.csv");
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json prov{{"tool", "fracsurf"},
              {"schema_version", kSchemaVersion},
              {"config_path", opt.config_path},
              {"argv", opt.argv},
              {"threads", thread_count()},
              {"seed", cfg.command == Command::check ? cfg.check.spec.seed : cfg.spec.seed},
              {"started_utc", started},
              {"finished_utc", utc_now()},
              {"elapsed_seconds", elapsed},
              {"outputs", written},
              {"exit_code", result.exit_code}};
    write_file(dir / "provenance.json", prov.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return exit_config;
  }
  json doc = json::parse(result.json);
  if (doc.contains("verdict"))
    std::cout << doc["target"].get<std::string>() << ": " << doc["verdict"].get<std::string>() << "\n";
  else if (doc.contains("result"))
    std::cout << doc["target"].get<std::string>() << " = " << fmt(doc["result"]["value"].get<double>()) << " +- "
              << fmt(doc["result"]["error_bound"].get<double>()) << " (" << doc["result"]["kind"].get<std::string>() << ")\n";
  else
    std::cout << doc["target"].get<std::string>() << ": " << doc["records"].size() << " grid points\n";
  return result.exit_code;
}

}  // namespace fracsurf
