#include "sdenum/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sdenum/version.hpp"

namespace sdenum {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::json json_number(double v) {
  // JSON has no NaN/inf literals; emit null like nlohmann's dump() would.
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json common_header(const ConvergenceReport& r) {
  nlohmann::json j;
  j["library_version"] = kVersion;
  j["problem"] = r.problem;
  j["scheme"] = r.scheme;
  j["t0"] = r.t0;
  j["T"] = r.T;
  if (!r.x0.empty()) {
    j["x0"] = r.x0;
  } else {
    j["x0"] = "sampled";
  }
  j["fine_level"] = r.fine_level;
  j["paths"] = r.num_paths;
  j["seed"] = r.seed;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& s : r.levels) levels.push_back(s.level);
  j["levels"] = levels;
  return j;
}

std::string aligned(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const LevelStat& s) {
  nlohmann::json j;
  j["level"] = s.level;
  j["h"] = s.h;
  j["rms_error"] = json_number(s.rms_error);
  j["rms_stderr"] = json_number(s.rms_stderr);
  j["diverged_fraction"] = s.diverged_fraction;
  j["paths_used"] = s.paths_used;
  return j;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j = common_header(r);
  j["study"] = "convergence";
  j["reference"] = {{"kind", r.reference_kind},
                    {"order_warning", r.reference_order_warning}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : r.levels) rows.push_back(to_json(s));
  j["results"] = rows;
  j["fitted_order"] = json_number(r.fitted_order);
  j["slope_stderr"] = json_number(r.slope_stderr);
  j["fit_valid"] = r.fit_valid;
  j["unstable"] = r.unstable;
  return j;
}

nlohmann::json to_json(const CompareReport& r) {
  nlohmann::json j;
  j["study"] = "compare";
  j["library_version"] = kVersion;
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& rep : r.schemes) {
    nlohmann::json one = to_json(rep);
    one.erase("study");
    one.erase("library_version");
    schemes.push_back(std::move(one));
  }
  j["schemes"] = schemes;
  return j;
}

nlohmann::json to_json(const MomentReport& r) {
  nlohmann::json j;
  j["study"] = "moments";
  j["library_version"] = kVersion;
  j["problem"] = r.problem;
  j["scheme"] = r.scheme;
  j["t0"] = r.t0;
  j["T"] = r.T;
  if (!r.x0.empty()) {
    j["x0"] = r.x0;
  } else {
    j["x0"] = "sampled";
  }
  j["fine_level"] = r.fine_level;
  j["paths"] = r.num_paths;
  j["seed"] = r.seed;
  j["p_values"] = r.p_values;

  nlohmann::json levels = nlohmann::json::array();
  for (const auto& s : r.levels) {
    nlohmann::json one;
    one["level"] = s.level;
    one["h"] = s.h;
    one["diverged_fraction"] = s.diverged_fraction;
    one["times"] = s.times;
    nlohmann::json est = nlohmann::json::array();
    nlohmann::json se = nlohmann::json::array();
    nlohmann::json mx = nlohmann::json::array();
    for (std::size_t pi = 0; pi < r.p_values.size(); ++pi) {
      nlohmann::json est_row = nlohmann::json::array();
      nlohmann::json se_row = nlohmann::json::array();
      for (double v : s.estimates[pi]) est_row.push_back(json_number(v));
      for (double v : s.std_errors[pi]) se_row.push_back(json_number(v));
      est.push_back(std::move(est_row));
      se.push_back(std::move(se_row));
      mx.push_back(json_number(s.max_over_time[pi]));
    }
    one["estimates"] = est;
    one["std_errors"] = se;
    one["max_over_time"] = mx;
    levels.push_back(std::move(one));
  }
  j["results"] = levels;
  return j;
}

std::string convergence_csv(const ConvergenceReport& r) {
  std::string out = "level,h,rms_error,stderr,diverged_fraction\n";
  for (const auto& s : r.levels) {
    out += std::to_string(s.level);
    out += ',';
    out += format_double(s.h);
    out += ',';
    out += format_double(s.rms_error);
    out += ',';
    out += format_double(s.rms_stderr);
    out += ',';
    out += format_double(s.diverged_fraction);
    out += '\n';
  }
  return out;
}

std::string compare_csv(const CompareReport& r) {
  std::string out = "level,h";
  for (const auto& rep : r.schemes) out += ",rms_error_" + rep.scheme;
  out += '\n';
  if (r.schemes.empty()) return out;
  const auto& levels = r.schemes.front().levels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    out += std::to_string(levels[l].level);
    out += ',';
    out += format_double(levels[l].h);
    for (const auto& rep : r.schemes) {
      out += ',';
      out += format_double(rep.levels[l].rms_error);
    }
    out += '\n';
  }
  return out;
}

std::string moments_csv(const MomentReport& r) {
  std::string out = "level,h,time,p,estimate,stderr\n";
  for (const auto& s : r.levels) {
    for (std::size_t pi = 0; pi < r.p_values.size(); ++pi) {
      for (std::size_t k = 0; k < s.times.size(); ++k) {
        out += std::to_string(s.level);
        out += ',';
        out += format_double(s.h);
        out += ',';
        out += format_double(s.times[k]);
        out += ',';
        out += format_double(r.p_values[pi]);
        out += ',';
        out += format_double(s.estimates[pi][k]);
        out += ',';
        out += format_double(s.std_errors[pi][k]);
        out += '\n';
      }
    }
  }
  return out;
}

std::string format_text(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "problem " << r.problem << ", scheme " << r.scheme << ", paths "
     << r.num_paths << ", seed " << r.seed << "\n";
  os << "reference: " << r.reference_kind;
  if (r.reference_order_warning) os << " (order warning: Euler fallback)";
  os << "\n";
  os << " level            h     rms_error        stderr   diverged\n";
  for (const auto& s : r.levels) {
    os << aligned("%6.0f", static_cast<double>(s.level))
       << aligned("%13.6g", s.h) << aligned("%14.6g", s.rms_error)
       << aligned("%14.3g", s.rms_stderr)
       << aligned("%11.4f", s.diverged_fraction) << "\n";
  }
  if (r.fit_valid) {
    os << "fitted order: " << aligned("%.4f", r.fitted_order) << " +/- "
       << aligned("%.4f", r.slope_stderr) << "\n";
  } else {
    os << "fitted order: n/a\n";
  }
  if (r.unstable) {
    os << "verdict: UNSTABLE (more than 1% of paths diverged at some level)\n";
  }
  return os.str();
}

std::string format_text(const CompareReport& r) {
  std::ostringstream os;
  if (r.schemes.empty()) return "";
  os << "problem " << r.schemes.front().problem << ", paths "
     << r.schemes.front().num_paths << ", seed " << r.schemes.front().seed
     << ", reference " << r.schemes.front().reference_kind << "\n";
  os << " level            h";
  for (const auto& rep : r.schemes) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %20s", rep.scheme.c_str());
    os << buf;
  }
  os << "\n";
  const auto& levels = r.schemes.front().levels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    os << aligned("%6.0f", static_cast<double>(levels[l].level))
       << aligned("%13.6g", levels[l].h);
    for (const auto& rep : r.schemes) {
      os << aligned("%22.6g", rep.levels[l].rms_error);
    }
    os << "\n";
  }
  os << "fitted order:      ";
  for (const auto& rep : r.schemes) {
    if (rep.fit_valid) {
      os << aligned("%22.4f", rep.fitted_order);
    } else {
      os << "                   n/a";
    }
  }
  os << "\n";
  return os.str();
}

std::string format_text(const MomentReport& r) {
  std::ostringstream os;
  os << "problem " << r.problem << ", scheme " << r.scheme << ", paths "
     << r.num_paths << ", seed " << r.seed << "\n";
  os << " level            h          p   max E||X||^2p   diverged\n";
  for (const auto& s : r.levels) {
    for (std::size_t pi = 0; pi < r.p_values.size(); ++pi) {
      os << aligned("%6.0f", static_cast<double>(s.level))
         << aligned("%13.6g", s.h) << aligned("%11.3g", r.p_values[pi])
         << aligned("%16.6g", s.max_over_time[pi])
         << aligned("%11.4f", s.diverged_fraction) << "\n";
    }
  }
  return os.str();
}

}  // namespace sdenum
