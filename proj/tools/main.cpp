// Batch front-end: runs convergence / moments / compare studies described by
// a JSON config and writes CSV + JSON reports. See README for the schema.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdenum/harness.hpp"
#include "sdenum/problems.hpp"
#include "sdenum/report_io.hpp"
#include "sdenum/version.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  return j;
}

sdenum::SdeSystem problem_from_config(const json& cfg) {
  if (!cfg.contains("problem")) throw UsageError("config needs a \"problem\"");
  const json& p = cfg.at("problem");
  std::string name;
  std::map<std::string, double> params;
  if (p.is_string()) {
    name = p.get<std::string>();
  } else if (p.is_object()) {
    if (!p.contains("name")) throw UsageError("\"problem\" needs a \"name\"");
    name = p.at("name").get<std::string>();
    for (const auto& [key, value] : p.items()) {
      if (key == "name") continue;
      if (!value.is_number()) {
        throw UsageError("problem parameter '" + key + "' must be a number");
      }
      params[key] = value.get<double>();
    }
  } else {
    throw UsageError("\"problem\" must be a string or an object");
  }
  try {
    return sdenum::make_problem(name, params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

sdenum::SchemeSpec scheme_from_json(const json& s) {
  std::string name;
  sdenum::SchemeSpec spec;
  if (s.is_string()) {
    name = s.get<std::string>();
  } else if (s.is_object()) {
    if (!s.contains("name")) throw UsageError("scheme entries need a \"name\"");
    name = s.at("name").get<std::string>();
    if (s.contains("beta")) spec.beta = s.at("beta").get<double>();
    if (s.contains("drift_taming")) {
      const std::string mode = s.at("drift_taming").get<std::string>();
      if (mode == "sine") {
        spec.drift_taming = sdenum::DriftTaming::Sine;
      } else if (mode == "rational") {
        spec.drift_taming = sdenum::DriftTaming::Rational;
      } else {
        throw UsageError("drift_taming must be \"sine\" or \"rational\"");
      }
    }
  } else {
    throw UsageError("scheme entries must be strings or objects");
  }
  const auto kind = sdenum::parse_scheme_name(name);
  if (!kind) {
    std::string valid;
    for (const auto& n : sdenum::scheme_names()) valid += " " + n;
    throw UsageError("unknown scheme '" + name + "'; valid names:" + valid);
  }
  spec.kind = *kind;
  return spec;
}

std::vector<double> x0_from_config(const json& cfg, int dim) {
  if (!cfg.contains("x0")) throw UsageError("config needs \"x0\"");
  const json& x = cfg.at("x0");
  std::vector<double> out;
  if (x.is_number()) {
    out.push_back(x.get<double>());
  } else if (x.is_array()) {
    for (const auto& v : x) out.push_back(v.get<double>());
  } else {
    throw UsageError("\"x0\" must be a number or an array of numbers");
  }
  if (static_cast<int>(out.size()) != dim) {
    throw UsageError("\"x0\" has dimension " + std::to_string(out.size()) +
                     " but the problem has dimension " + std::to_string(dim));
  }
  return out;
}

std::vector<int> levels_from_config(const json& cfg) {
  if (!cfg.contains("levels")) throw UsageError("config needs \"levels\"");
  const json& l = cfg.at("levels");
  std::vector<int> out;
  if (l.is_array()) {
    for (const auto& v : l) out.push_back(v.get<int>());
  } else if (l.is_object() && l.contains("min") && l.contains("max")) {
    for (int v = l.at("min").get<int>(); v <= l.at("max").get<int>(); ++v) {
      out.push_back(v);
    }
  } else {
    throw UsageError("\"levels\" must be an array or {\"min\":..,\"max\":..}");
  }
  return out;
}

sdenum::SimConfig sim_config_from(const json& cfg, const sdenum::SdeSystem& sys) {
  sdenum::SimConfig sim;
  sim.t0 = cfg.value("t0", 0.0);
  if (!cfg.contains("T")) throw UsageError("config needs \"T\"");
  sim.T = cfg.at("T").get<double>();
  sim.initial_state = x0_from_config(cfg, sys.dim_state);
  sim.coarse_levels = levels_from_config(cfg);
  if (!cfg.contains("fine_level")) throw UsageError("config needs \"fine_level\"");
  sim.fine_level = cfg.at("fine_level").get<int>();
  if (!cfg.contains("paths")) throw UsageError("config needs \"paths\"");
  sim.num_paths = cfg.at("paths").get<std::int64_t>();
  sim.seed = cfg.value("seed", std::uint64_t{0});
  return sim;
}

std::vector<double> p_list_from(const json& cfg) {
  if (!cfg.contains("p")) return {1.0};
  const json& p = cfg.at("p");
  std::vector<double> out;
  if (p.is_number()) {
    out.push_back(p.get<double>());
  } else if (p.is_array()) {
    for (const auto& v : p) out.push_back(v.get<double>());
  } else {
    throw UsageError("\"p\" must be a number or an array");
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

struct OutputOptions {
  std::string dir = ".";
  std::string format = "both";
  bool want_json() const { return format != "csv"; }
  bool want_csv() const { return format != "json"; }
};

void emit(const OutputOptions& out, const std::string& csv_name,
          const std::string& csv, json report_json, const json& config_echo) {
  std::filesystem::create_directories(out.dir);
  report_json["config"] = config_echo;
  if (out.want_json()) {
    write_file(std::filesystem::path(out.dir) / "report.json",
               report_json.dump(2) + "\n");
  }
  if (out.want_csv()) {
    write_file(std::filesystem::path(out.dir) / csv_name, csv);
  }
}

void print_notes(const sdenum::SdeSystem& sys) {
  for (const auto& note : sys.notes) std::cerr << "note: " << note << "\n";
}

int run_convergence(const json& cfg, const OutputOptions& out, int threads) {
  const sdenum::SdeSystem sys = problem_from_config(cfg);
  print_notes(sys);
  if (!cfg.contains("scheme")) throw UsageError("config needs \"scheme\"");
  const sdenum::SchemeSpec spec = scheme_from_json(cfg.at("scheme"));
  const sdenum::SimConfig sim = sim_config_from(cfg, sys);
  if (sim.coarse_levels.size() < 3) {
    throw UsageError("need >= 3 levels for a convergence study");
  }
  try {
    const auto report = sdenum::convergence_study(sys, spec, sim, threads);
    emit(out, "errors.csv", sdenum::convergence_csv(report),
         sdenum::to_json(report), cfg);
    std::cout << sdenum::format_text(report);
    return report.unstable ? 2 : 0;
  } catch (const sdenum::StudyError& e) {
    std::cerr << "study failed: " << e.what() << "\n";
    return 2;
  }
}

int run_compare(const json& cfg, const OutputOptions& out, int threads) {
  const sdenum::SdeSystem sys = problem_from_config(cfg);
  print_notes(sys);
  if (!cfg.contains("schemes") || !cfg.at("schemes").is_array() ||
      cfg.at("schemes").empty()) {
    throw UsageError("compare needs a non-empty \"schemes\" array");
  }
  std::vector<sdenum::SchemeSpec> specs;
  for (const auto& s : cfg.at("schemes")) specs.push_back(scheme_from_json(s));
  const sdenum::SimConfig sim = sim_config_from(cfg, sys);
  if (sim.coarse_levels.size() < 3) {
    throw UsageError("need >= 3 levels for a convergence study");
  }
  try {
    const auto report = sdenum::compare_study(sys, specs, sim, threads);
    emit(out, "compare.csv", sdenum::compare_csv(report),
         sdenum::to_json(report), cfg);
    std::cout << sdenum::format_text(report);
    for (const auto& r : report.schemes) {
      if (r.unstable) return 2;
    }
    return 0;
  } catch (const sdenum::StudyError& e) {
    std::cerr << "study failed: " << e.what() << "\n";
    return 2;
  }
}

int run_moments(const json& cfg, const OutputOptions& out, int threads) {
  const sdenum::SdeSystem sys = problem_from_config(cfg);
  print_notes(sys);
  if (!cfg.contains("scheme")) throw UsageError("config needs \"scheme\"");
  const sdenum::SchemeSpec spec = scheme_from_json(cfg.at("scheme"));
  const sdenum::SimConfig sim = sim_config_from(cfg, sys);
  const std::vector<double> p_list = p_list_from(cfg);
  const auto report = sdenum::moment_study(sys, spec, sim, p_list, threads);
  emit(out, "moments.csv", sdenum::moments_csv(report), sdenum::to_json(report),
       cfg);
  std::cout << sdenum::format_text(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced and tamed explicit SDE integrators: convergence and "
               "moment studies"};
  app.set_version_flag("--version", sdenum::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  OutputOptions out;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", config_path, "JSON run configuration")
          ->required();
      sub->add_option("--out", out.dir, "output directory (default .)");
      sub->add_option("--threads", threads,
                      "worker cap, 0 = hardware (results are identical for "
                      "any value)");
      sub->add_option("--format", out.format, "csv, json, or both")
          ->check(CLI::IsMember({"csv", "json", "both"}));
    }
  };

  auto* conv = app.add_subcommand("convergence", "mean-square order study");
  add_common(conv, true);
  auto* mom = app.add_subcommand("moments", "moment boundedness study");
  add_common(mom, true);
  auto* cmp = app.add_subcommand("compare", "side-by-side scheme comparison");
  add_common(cmp, true);
  auto* lp = app.add_subcommand("list-problems", "print built-in problems");
  add_common(lp, false);
  auto* ls = app.add_subcommand("list-schemes", "print scheme names");
  add_common(ls, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (lp->parsed()) {
      for (const auto& name : sdenum::problem_names()) {
        std::cout << name << "  [" << sdenum::problem_parameter_help(name)
                  << "]\n";
      }
      return 0;
    }
    if (ls->parsed()) {
      for (const auto& name : sdenum::scheme_names()) std::cout << name << "\n";
      return 0;
    }
    const json cfg = load_config(config_path);
    if (conv->parsed()) return run_convergence(cfg, out, threads);
    if (cmp->parsed()) return run_compare(cfg, out, threads);
    if (mom->parsed()) return run_moments(cfg, out, threads);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const sdenum::CapabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
