#include "pszkit/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pszkit {

namespace {

[[noreturn]] void fail_at(const std::string& origin, int line,
                          const std::string& msg) {
  throw std::invalid_argument("config " + origin + ":" +
                              std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, const std::string& origin, int line) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    fail_at(origin, line, "expected a number, got '" + v + "'");
  return d;
}

long to_long(const std::string& v, const std::string& origin, int line) {
  char* end = nullptr;
  errno = 0;
  const long d = std::strtol(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    fail_at(origin, line, "expected an integer, got '" + v + "'");
  return d;
}

bool to_bool(const std::string& v, const std::string& origin, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail_at(origin, line, "expected a boolean, got '" + v + "'");
}

Vec3 to_vec3(const std::string& v, const std::string& origin, int line) {
  std::istringstream ss(v);
  Vec3 out;
  if (!(ss >> out.x >> out.y >> out.z))
    fail_at(origin, line, "expected three numbers, got '" + v + "'");
  std::string extra;
  if (ss >> extra)
    fail_at(origin, line, "expected exactly three numbers, got '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<Stage> parse_stage_list(const std::string& text) {
  std::vector<Stage> stages;
  std::string cur;
  auto flush = [&]() {
    const std::string t = trim(cur);
    if (!t.empty()) stages.push_back(stage_from_name(t));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else
      cur += c;
  }
  flush();
  if (stages.empty())
    throw std::invalid_argument("stage list '" + text + "' is empty");
  return stages;
}

DesignConfig RunConfig::build_design(const Scene& scene) const {
  DesignConfig cfg = DesignConfig::for_scene(scene);
  cfg.lambda_rel = lambda_rel;
  cfg.filter_length = filter_length;
  cfg.modeling_delay = modeling_delay < 0
                           ? filter_length / 2
                           : static_cast<std::size_t>(modeling_delay);
  cfg.taper_len = taper_len;
  return cfg;
}

AblationPlan RunConfig::build_plan() const {
  AblationPlan plan;
  plan.scene = build_scene();
  plan.grid = build_grid();
  plan.design = build_design(plan.scene);
  plan.series = series;
  plan.epsilon = epsilon;
  plan.design_stages = design_stages;
  plan.eval_stage = eval_stage;
  plan.plan_id = plan_id;
  plan.synthetic_fr = synthetic_fr;
  plan.enable_fr = enable_fr;
  plan.enable_dir = enable_dir;
  plan.enable_hrtf = enable_hrtf;
  return plan;
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  SceneParams& sp = cfg.scene_params;

  // Per-section key handlers; a key not listed here is a hard error.
  using Handler = std::function<void(const std::string&, int)>;
  std::map<std::string, std::map<std::string, Handler>> sections;

  auto num = [&origin](double& slot) {
    return [&slot, &origin](const std::string& v, int line) {
      slot = to_double(v, origin, line);
    };
  };
  auto integer = [&origin](int& slot) {
    return [&slot, &origin](const std::string& v, int line) {
      slot = static_cast<int>(to_long(v, origin, line));
    };
  };
  auto size = [&origin](std::size_t& slot) {
    return [&slot, &origin](const std::string& v, int line) {
      const long x = to_long(v, origin, line);
      if (x < 0) fail_at(origin, line, "value must be non-negative");
      slot = static_cast<std::size_t>(x);
    };
  };
  auto boolean = [&origin](bool& slot) {
    return [&slot, &origin](const std::string& v, int line) {
      slot = to_bool(v, origin, line);
    };
  };
  auto vec3 = [&origin](Vec3& slot) {
    return [&slot, &origin](const std::string& v, int line) {
      slot = to_vec3(v, origin, line);
    };
  };

  sections["geometry"] = {
      {"woofers", integer(sp.n_woofers)},
      {"tweeters", integer(sp.n_tweeters)},
      {"array_width", num(sp.array_width)},
      {"row_separation", num(sp.row_separation)},
      {"woofer_radius", num(sp.woofer_radius)},
      {"tweeter_radius", num(sp.tweeter_radius)},
      {"woofer_f_lo", num(sp.woofer_f_lo)},
      {"woofer_f_hi", num(sp.woofer_f_hi)},
      {"tweeter_f_lo", num(sp.tweeter_f_lo)},
      {"tweeter_f_hi", num(sp.tweeter_f_hi)},
      {"array_center", vec3(sp.array_center)},
      {"listener_offset", num(sp.listener_offset)},
      {"listener_distance", num(sp.listener_distance)},
      {"head_radius", num(sp.head_radius)},
      {"points_per_ear", integer(sp.points_per_ear)},
      {"ring_radius", num(sp.ring_radius)},
      {"speed_of_sound", num(sp.speed_of_sound)},
      {"sample_rate", num(sp.sample_rate)},
  };
  sections["room"] = {
      {"dimensions", vec3(sp.room_dims)},
      {"reflectance",
       [&sp, &origin](const std::string& v, int line) {
         std::istringstream ss(v);
         std::vector<double> vals;
         double x;
         while (ss >> x) vals.push_back(x);
         if (vals.size() == 1)
           sp.reflectance.fill(vals[0]);
         else if (vals.size() == 6)
           for (int i = 0; i < 6; ++i) sp.reflectance[i] = vals[i];
         else
           fail_at(origin, line,
                   "reflectance takes one value or six, got " +
                       std::to_string(vals.size()));
       }},
      {"max_image_order", integer(sp.max_image_order)},
      {"rir_seconds", num(sp.rir_seconds)},
  };
  sections["atf"] = {
      {"n_fft", size(cfg.n_fft)},
      {"max_order", integer(cfg.series.max_order)},
      {"term_tol", num(cfg.series.term_tol)},
  };
  sections["filters"] = {
      {"lambda", num(cfg.lambda_rel)},
      {"filter_length", size(cfg.filter_length)},
      {"modeling_delay",
       [&cfg, &origin](const std::string& v, int line) {
         cfg.modeling_delay = to_long(v, origin, line);
       }},
      {"taper_len", size(cfg.taper_len)},
  };
  sections["metrics"] = {
      {"epsilon", num(cfg.epsilon)},
  };
  sections["ablation"] = {
      {"stages",
       [&cfg, &origin](const std::string& v, int line) {
         try {
           cfg.design_stages = parse_stage_list(v);
         } catch (const std::exception& e) {
           fail_at(origin, line, e.what());
         }
       }},
      {"eval_stage",
       [&cfg, &origin](const std::string& v, int line) {
         try {
           cfg.eval_stage = stage_from_name(v);
         } catch (const std::exception& e) {
           fail_at(origin, line, e.what());
         }
       }},
      {"plan_id",
       [&cfg](const std::string& v, int) { cfg.plan_id = v; }},
      {"synthetic_fr", boolean(cfg.synthetic_fr)},
      {"enable_fr", boolean(cfg.enable_fr)},
      {"enable_dir", boolean(cfg.enable_dir)},
      {"enable_hrtf", boolean(cfg.enable_hrtf)},
      {"fr_dir",
       [&cfg](const std::string& v, int) { cfg.fr_dir = v; }},
      {"out_dir",
       [&cfg](const std::string& v, int) { cfg.out_dir = v; }},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail_at(origin, line_no, "malformed section header '" + raw + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section))
        fail_at(origin, line_no, "unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail_at(origin, line_no, "expected 'key = value', got '" + raw + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      fail_at(origin, line_no, "key '" + key + "' outside any section");
    auto& handlers = sections[section];
    auto it = handlers.find(key);
    if (it == handlers.end())
      fail_at(origin, line_no,
              "unknown key '" + key + "' in section [" + section + "]");
    if (value.empty()) fail_at(origin, line_no, "empty value for '" + key + "'");
    it->second(value, line_no);
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("config file does not exist or cannot be "
                                "read: " +
                                path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

}  // namespace pszkit
