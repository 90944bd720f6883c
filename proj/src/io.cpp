#include "pszkit/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pszkit {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const std::uint64_t v = std::strtoull(s.c_str(), &end, 16);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    throw std::runtime_error(what + ": bad hex value '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error(what + ": bad number '" + s + "'");
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    throw std::runtime_error(what + ": bad count '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open file for writing: " + path.string());
  out << body;
  out.flush();
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// key -> value lines; '#' comment lines become metadata ("# key value").
struct TextDoc {
  std::vector<std::string> lines;
  std::map<std::string, std::string> comments;
};

TextDoc parse_text_doc(const std::string& body) {
  TextDoc doc;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      if (!key.empty()) doc.comments[key] = rest;
      continue;
    }
    doc.lines.push_back(line);
  }
  return doc;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- transfer-set archive --------------------------------------------------

void save_atf_archive(const AtfSet& atf, const std::filesystem::path& path) {
  std::string body;
  body.reserve(atf.h.size() * 50 + 512);
  body += "# atf archive v1\n";
  body += std::string("stage ") + stage_name(atf.stage) + "\n";
  body += "scene_digest " + hex64(atf.scene_digest) + "\n";
  body += "listeners " + std::to_string(atf.listeners) + "\n";
  body += "ears " + std::to_string(atf.ears) + "\n";
  body += "points " + std::to_string(atf.points) + "\n";
  body += "speakers " + std::to_string(atf.speakers) + "\n";
  body += "sample_rate " + format_g17(atf.grid.sample_rate) + "\n";
  body += "n_fft " + std::to_string(atf.grid.n_fft) + "\n";
  body += "data " + std::to_string(atf.h.size()) + "\n";
  for (const cplx& v : atf.h) {
    body += format_g17(v.real());
    body += ' ';
    body += format_g17(v.imag());
    body += '\n';
  }
  body += "checksum " + hex64(fnv1a64(body)) + "\n";
  write_file(path, body);
}

AtfSet load_atf_archive(const std::filesystem::path& path) {
  const std::string ctx = "atf archive " + path.string();
  const std::string body = read_file(path);

  const std::size_t pos = body.rfind("\nchecksum ");
  if (pos == std::string::npos)
    throw std::runtime_error(ctx + ": missing checksum line");
  const std::string prefix = body.substr(0, pos + 1);
  std::istringstream tail(body.substr(pos + 1));
  std::string word, stated;
  tail >> word >> stated;
  const std::uint64_t expect = parse_hex64(stated, ctx + ": checksum");
  const std::uint64_t actual = fnv1a64(prefix);
  if (expect != actual)
    throw std::runtime_error(ctx + ": checksum mismatch (file says " +
                             hex64(expect) + ", content hashes to " +
                             hex64(actual) + "); the archive is corrupt");

  TextDoc doc = parse_text_doc(prefix);
  std::map<std::string, std::string> kv;
  std::size_t data_start = 0;
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    std::istringstream ls(doc.lines[i]);
    std::string key;
    ls >> key;
    if (key == "data") {
      std::string count;
      ls >> count;
      kv["data"] = count;
      data_start = i + 1;
      break;
    }
    std::string value;
    ls >> value;
    kv[key] = value;
  }
  for (const char* req : {"stage", "scene_digest", "listeners", "ears",
                          "points", "speakers", "sample_rate", "n_fft",
                          "data"})
    if (!kv.count(req))
      throw std::runtime_error(ctx + ": missing header field '" + req + "'");

  AtfSet atf;
  atf.stage = stage_from_name(kv["stage"]);
  atf.scene_digest = parse_hex64(kv["scene_digest"], ctx + ": scene_digest");
  atf.listeners = parse_size(kv["listeners"], ctx);
  atf.ears = parse_size(kv["ears"], ctx);
  atf.points = parse_size(kv["points"], ctx);
  atf.speakers = parse_size(kv["speakers"], ctx);
  atf.grid.sample_rate = parse_double(kv["sample_rate"], ctx);
  atf.grid.n_fft = parse_size(kv["n_fft"], ctx);
  atf.grid.validate();

  const std::size_t count = parse_size(kv["data"], ctx + ": data");
  const std::size_t want = atf.listeners * atf.ears * atf.points *
                           atf.speakers * atf.grid.n_bins();
  if (count != want)
    throw std::runtime_error(ctx + ": data count " + std::to_string(count) +
                             " does not match dimensions (expected " +
                             std::to_string(want) + ")");
  if (doc.lines.size() - data_start != count)
    throw std::runtime_error(ctx + ": expected " + std::to_string(count) +
                             " data lines, found " +
                             std::to_string(doc.lines.size() - data_start));
  atf.h.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& line = doc.lines[data_start + i];
    const char* s = line.c_str();
    char* end = nullptr;
    const double re = std::strtod(s, &end);
    if (end == s)
      throw std::runtime_error(ctx + ": bad data line " + std::to_string(i));
    const char* s2 = end;
    const double im = std::strtod(s2, &end);
    if (end == s2)
      throw std::runtime_error(ctx + ": bad data line " + std::to_string(i));
    atf.h[i] = cplx(re, im);
  }
  return atf;
}

// --- filter bank -------------------------------------------------------------

void save_filter_bank(const FilterBank& bank,
                      const std::filesystem::path& path) {
  std::string body;
  body.reserve(bank.w.size() * 26 + 256);
  body += "# filter bank v1\n";
  body += "speakers " + std::to_string(bank.speakers) + "\n";
  body += "programs " + std::to_string(bank.programs) + "\n";
  body += "channels " + std::to_string(bank.channels) + "\n";
  body += "taps " + std::to_string(bank.taps) + "\n";
  body += "sample_rate " + format_g17(bank.sample_rate) + "\n";
  body += "data " + std::to_string(bank.w.size()) + "\n";
  for (double v : bank.w) {
    body += format_g17(v);
    body += '\n';
  }
  write_file(path, body);
}

FilterBank load_filter_bank(const std::filesystem::path& path) {
  const std::string ctx = "filter bank " + path.string();
  TextDoc doc = parse_text_doc(read_file(path));
  std::map<std::string, std::string> kv;
  std::size_t data_start = 0;
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    std::istringstream ls(doc.lines[i]);
    std::string key, value;
    ls >> key >> value;
    kv[key] = value;
    if (key == "data") {
      data_start = i + 1;
      break;
    }
  }
  for (const char* req :
       {"speakers", "programs", "channels", "taps", "sample_rate", "data"})
    if (!kv.count(req))
      throw std::runtime_error(ctx + ": missing header field '" + req + "'");

  FilterBank bank;
  bank.speakers = parse_size(kv["speakers"], ctx);
  bank.programs = parse_size(kv["programs"], ctx);
  bank.channels = parse_size(kv["channels"], ctx);
  bank.taps = parse_size(kv["taps"], ctx);
  bank.sample_rate = parse_double(kv["sample_rate"], ctx);
  const std::size_t count = parse_size(kv["data"], ctx);
  if (count != bank.speakers * bank.programs * bank.channels * bank.taps)
    throw std::runtime_error(ctx + ": data count does not match dimensions");
  if (doc.lines.size() - data_start != count)
    throw std::runtime_error(ctx + ": truncated data section");
  bank.w.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    bank.w[i] = parse_double(doc.lines[data_start + i],
                             ctx + " line " + std::to_string(i));
  return bank;
}

// --- metric curves ---------------------------------------------------------

void write_metric_curve_csv(
    const MetricCurve& curve, const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
  if (curve.freq_hz.size() != curve.value_db.size())
    throw std::invalid_argument("write_metric_curve_csv: ragged curve");
  std::string body;
  for (const auto& [k, v] : metadata) body += "# " + k + " " + v + "\n";
  body += "freq_hz,value_db\n";
  for (std::size_t i = 0; i < curve.freq_hz.size(); ++i)
    body += format_g17(curve.freq_hz[i]) + "," +
            format_g17(curve.value_db[i]) + "\n";
  write_file(path, body);
}

MetricCurve read_metric_curve_csv(const std::filesystem::path& path) {
  const std::string ctx = "metric curve " + path.string();
  TextDoc doc = parse_text_doc(read_file(path));
  if (doc.lines.empty() || doc.lines[0] != "freq_hz,value_db")
    throw std::runtime_error(ctx + ": missing 'freq_hz,value_db' header");
  MetricCurve curve;
  for (std::size_t i = 1; i < doc.lines.size(); ++i) {
    const auto cells = split_csv(doc.lines[i]);
    if (cells.size() != 2)
      throw std::runtime_error(ctx + ": bad row " + std::to_string(i));
    curve.freq_hz.push_back(parse_double(cells[0], ctx));
    curve.value_db.push_back(parse_double(cells[1], ctx));
  }
  return curve;
}

// --- ablation reports --------------------------------------------------------

namespace {

json curve_to_json(const MetricCurve& c) {
  json j;
  j["freq_hz"] = c.freq_hz;
  j["value_db"] = c.value_db;
  return j;
}

MetricCurve curve_from_json(const json& j) {
  MetricCurve c;
  c.freq_hz = j.at("freq_hz").get<std::vector<double>>();
  c.value_db = j.at("value_db").get<std::vector<double>>();
  if (c.freq_hz.size() != c.value_db.size())
    throw std::runtime_error("report json: ragged curve arrays");
  return c;
}

std::string curve_file_name(const std::string& plan_id, Stage stage,
                            std::size_t listener, const char* metric) {
  return plan_id + "_" + stage_name(stage) + "_listener" +
         std::to_string(listener) + "_" + metric + ".csv";
}

}  // namespace

std::string report_to_json(const AblationReport& report) {
  json j;
  j["plan_id"] = report.plan_id;
  j["eval_stage"] = stage_name(report.eval_stage);
  j["epsilon"] = report.epsilon;
  j["lambda_rel"] = report.lambda_rel;
  j["synthetic_fr"] = report.synthetic_fr;
  j["scene_digest"] = hex64(report.scene_digest);
  j["sample_rate"] = report.sample_rate;
  j["n_fft"] = report.n_fft;
  j["rows"] = json::array();
  for (const ReportRow& r : report.rows) {
    json row;
    row["stage"] = stage_name(r.stage);
    row["listener"] = r.listener;
    row["izi_db"] = r.izi_db;
    row["ipi_db"] = r.ipi_db;
    row["xtc_db"] = r.xtc_db;
    j["rows"].push_back(row);
  }
  j["deltas"] = json::array();
  for (const DeltaRow& d : report.deltas) {
    json row;
    row["from"] = stage_name(d.from);
    row["to"] = stage_name(d.to);
    row["component"] = d.component;
    row["listener"] = d.listener;
    row["d_izi_db"] = d.d_izi_db;
    row["d_ipi_db"] = d.d_ipi_db;
    row["d_xtc_db"] = d.d_xtc_db;
    j["deltas"].push_back(row);
  }
  j["curves"] = json::array();
  for (const CurveSet& c : report.curves) {
    json row;
    row["stage"] = stage_name(c.stage);
    row["listener"] = c.listener;
    row["izi"] = curve_to_json(c.izi);
    row["ipi"] = curve_to_json(c.ipi);
    row["xtc"] = curve_to_json(c.xtc);
    j["curves"].push_back(row);
  }
  return j.dump(2) + "\n";
}

AblationReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("report json: parse error: ") +
                             e.what());
  }
  try {
    AblationReport report;
    report.plan_id = j.at("plan_id").get<std::string>();
    report.eval_stage = stage_from_name(j.at("eval_stage").get<std::string>());
    report.epsilon = j.at("epsilon").get<double>();
    report.lambda_rel = j.at("lambda_rel").get<double>();
    report.synthetic_fr = j.at("synthetic_fr").get<bool>();
    report.scene_digest =
        parse_hex64(j.at("scene_digest").get<std::string>(), "report json");
    report.sample_rate = j.at("sample_rate").get<double>();
    report.n_fft = j.at("n_fft").get<std::size_t>();
    for (const json& row : j.at("rows")) {
      ReportRow r;
      r.stage = stage_from_name(row.at("stage").get<std::string>());
      r.listener = row.at("listener").get<std::size_t>();
      r.izi_db = row.at("izi_db").get<double>();
      r.ipi_db = row.at("ipi_db").get<double>();
      r.xtc_db = row.at("xtc_db").get<double>();
      report.rows.push_back(r);
    }
    for (const json& row : j.at("deltas")) {
      DeltaRow d;
      d.from = stage_from_name(row.at("from").get<std::string>());
      d.to = stage_from_name(row.at("to").get<std::string>());
      d.component = row.at("component").get<std::string>();
      d.listener = row.at("listener").get<std::size_t>();
      d.d_izi_db = row.at("d_izi_db").get<double>();
      d.d_ipi_db = row.at("d_ipi_db").get<double>();
      d.d_xtc_db = row.at("d_xtc_db").get<double>();
      report.deltas.push_back(d);
    }
    for (const json& row : j.at("curves")) {
      CurveSet c;
      c.stage = stage_from_name(row.at("stage").get<std::string>());
      c.listener = row.at("listener").get<std::size_t>();
      c.izi = curve_from_json(row.at("izi"));
      c.ipi = curve_from_json(row.at("ipi"));
      c.xtc = curve_from_json(row.at("xtc"));
      report.curves.push_back(std::move(c));
    }
    return report;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("report json: missing or mistyped "
                                         "field: ") +
                             e.what());
  }
}

AblationReport load_report_json(const std::filesystem::path& path) {
  return report_from_json(read_file(path));
}

void emit_report(const AblationReport& report,
                 const std::filesystem::path& out_dir, ReportFormat format) {
  std::filesystem::create_directories(out_dir);
  if (format == ReportFormat::json) {
    write_file(out_dir / (report.plan_id + "_report.json"),
               report_to_json(report));
    return;
  }

  std::string meta;
  meta += "# plan_id " + report.plan_id + "\n";
  meta += std::string("# eval_stage ") + stage_name(report.eval_stage) + "\n";
  meta += "# epsilon " + format_g17(report.epsilon) + "\n";
  meta += "# lambda_rel " + format_g17(report.lambda_rel) + "\n";
  meta += std::string("# synthetic_fr ") +
          (report.synthetic_fr ? "1" : "0") + "\n";
  meta += "# scene_digest " + hex64(report.scene_digest) + "\n";
  meta += "# sample_rate " + format_g17(report.sample_rate) + "\n";
  meta += "# n_fft " + std::to_string(report.n_fft) + "\n";

  std::string summary = meta;
  if (report.deltas.empty())
    summary += "# no deltas: a single design stage was evaluated\n";
  summary += "stage,listener,izi_db,ipi_db,xtc_db\n";
  for (const ReportRow& r : report.rows)
    summary += std::string(stage_name(r.stage)) + "," +
               std::to_string(r.listener) + "," + format_g17(r.izi_db) + "," +
               format_g17(r.ipi_db) + "," + format_g17(r.xtc_db) + "\n";
  write_file(out_dir / (report.plan_id + "_summary.csv"), summary);

  if (!report.deltas.empty()) {
    std::string deltas = meta;
    deltas += "from,to,component,listener,d_izi_db,d_ipi_db,d_xtc_db\n";
    for (const DeltaRow& d : report.deltas)
      deltas += std::string(stage_name(d.from)) + "," + stage_name(d.to) +
                "," + d.component + "," + std::to_string(d.listener) + "," +
                format_g17(d.d_izi_db) + "," + format_g17(d.d_ipi_db) + "," +
                format_g17(d.d_xtc_db) + "\n";
    write_file(out_dir / (report.plan_id + "_deltas.csv"), deltas);
  }

  for (const CurveSet& c : report.curves) {
    const std::vector<std::pair<std::string, std::string>> curve_meta = {
        {"plan_id", report.plan_id},
        {"stage", stage_name(c.stage)},
        {"listener", std::to_string(c.listener)},
        {"eval_stage", stage_name(report.eval_stage)},
        {"synthetic_fr", report.synthetic_fr ? "1" : "0"},
    };
    write_metric_curve_csv(
        c.izi, out_dir / curve_file_name(report.plan_id, c.stage, c.listener,
                                         "izi"),
        curve_meta);
    write_metric_curve_csv(
        c.ipi, out_dir / curve_file_name(report.plan_id, c.stage, c.listener,
                                         "ipi"),
        curve_meta);
    write_metric_curve_csv(
        c.xtc, out_dir / curve_file_name(report.plan_id, c.stage, c.listener,
                                         "xtc"),
        curve_meta);
  }
}

AblationReport load_report_csv(const std::filesystem::path& dir,
                               const std::string& plan_id) {
  const std::filesystem::path summary_path = dir / (plan_id + "_summary.csv");
  const std::string ctx = "report csv " + summary_path.string();
  TextDoc summary = parse_text_doc(read_file(summary_path));

  AblationReport report;
  auto need = [&](const char* key) -> const std::string& {
    auto it = summary.comments.find(key);
    if (it == summary.comments.end())
      throw std::runtime_error(ctx + ": missing '# " + std::string(key) +
                               "' metadata line");
    return it->second;
  };
  report.plan_id = need("plan_id");
  report.eval_stage = stage_from_name(need("eval_stage"));
  report.epsilon = parse_double(need("epsilon"), ctx);
  report.lambda_rel = parse_double(need("lambda_rel"), ctx);
  report.synthetic_fr = need("synthetic_fr") == "1";
  report.scene_digest = parse_hex64(need("scene_digest"), ctx);
  report.sample_rate = parse_double(need("sample_rate"), ctx);
  report.n_fft = parse_size(need("n_fft"), ctx);

  if (summary.lines.empty() ||
      summary.lines[0] != "stage,listener,izi_db,ipi_db,xtc_db")
    throw std::runtime_error(ctx + ": missing summary column header");
  for (std::size_t i = 1; i < summary.lines.size(); ++i) {
    const auto cells = split_csv(summary.lines[i]);
    if (cells.size() != 5)
      throw std::runtime_error(ctx + ": bad summary row " + std::to_string(i));
    ReportRow r;
    r.stage = stage_from_name(cells[0]);
    r.listener = parse_size(cells[1], ctx);
    r.izi_db = parse_double(cells[2], ctx);
    r.ipi_db = parse_double(cells[3], ctx);
    r.xtc_db = parse_double(cells[4], ctx);
    report.rows.push_back(r);
  }

  // Single-stage plans omit the delta file entirely.
  const std::filesystem::path deltas_path = dir / (plan_id + "_deltas.csv");
  if (std::filesystem::exists(deltas_path)) {
    TextDoc deltas = parse_text_doc(read_file(deltas_path));
    if (deltas.lines.empty() ||
        deltas.lines[0] !=
            "from,to,component,listener,d_izi_db,d_ipi_db,d_xtc_db")
      throw std::runtime_error("report csv " + deltas_path.string() +
                               ": missing delta column header");
    for (std::size_t i = 1; i < deltas.lines.size(); ++i) {
      const auto cells = split_csv(deltas.lines[i]);
      if (cells.size() != 7)
        throw std::runtime_error("report csv " + deltas_path.string() +
                                 ": bad row " + std::to_string(i));
      DeltaRow d;
      d.from = stage_from_name(cells[0]);
      d.to = stage_from_name(cells[1]);
      d.component = cells[2];
      d.listener = parse_size(cells[3], ctx);
      d.d_izi_db = parse_double(cells[4], ctx);
      d.d_ipi_db = parse_double(cells[5], ctx);
      d.d_xtc_db = parse_double(cells[6], ctx);
      report.deltas.push_back(d);
    }
  }

  for (const ReportRow& r : report.rows) {
    CurveSet c;
    c.stage = r.stage;
    c.listener = r.listener;
    c.izi = read_metric_curve_csv(
        dir / curve_file_name(plan_id, r.stage, r.listener, "izi"));
    c.ipi = read_metric_curve_csv(
        dir / curve_file_name(plan_id, r.stage, r.listener, "ipi"));
    c.xtc = read_metric_curve_csv(
        dir / curve_file_name(plan_id, r.stage, r.listener, "xtc"));
    report.curves.push_back(std::move(c));
  }
  return report;
}

// --- impulse-response inputs ---------------------------------------------

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

std::pair<std::vector<double>, double> load_wav(
    const std::filesystem::path& path) {
  const std::string ctx = "wav file " + path.string();
  const std::string raw = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  const std::size_t n = raw.size();
  if (n < 44 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0)
    throw std::runtime_error(ctx + ": not a RIFF/WAVE file");

  std::uint16_t fmt_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t off = 12;
  while (off + 8 <= n) {
    const std::uint32_t chunk_len = rd_u32(p + off + 4);
    const unsigned char* body = p + off + 8;
    if (off + 8 + chunk_len > n)
      throw std::runtime_error(ctx + ": truncated chunk");
    if (std::memcmp(p + off, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw std::runtime_error(ctx + ": short fmt chunk");
      fmt_tag = rd_u16(body);
      channels = rd_u16(body + 2);
      rate = rd_u32(body + 4);
      bits = rd_u16(body + 14);
    } else if (std::memcmp(p + off, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    off += 8 + chunk_len + (chunk_len & 1);
  }
  if (fmt_tag == 0 || data == nullptr)
    throw std::runtime_error(ctx + ": missing fmt or data chunk");
  if (channels != 1)
    throw std::runtime_error(ctx + ": expected a mono measurement, got " +
                             std::to_string(channels) + " channels");

  std::vector<double> samples;
  if (fmt_tag == 1 && bits == 16) {
    samples.resize(data_len / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::int16_t v =
          static_cast<std::int16_t>(rd_u16(data + 2 * i));
      samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (fmt_tag == 1 && bits == 24) {
    samples.resize(data_len / 3);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(data[3 * i]) << 8) |
          (static_cast<std::uint32_t>(data[3 * i + 1]) << 16) |
          (static_cast<std::uint32_t>(data[3 * i + 2]) << 24));
      v >>= 8;
      samples[i] = static_cast<double>(v) / 8388608.0;
    }
  } else if (fmt_tag == 1 && bits == 32) {
    samples.resize(data_len / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::int32_t v = static_cast<std::int32_t>(rd_u32(data + 4 * i));
      samples[i] = static_cast<double>(v) / 2147483648.0;
    }
  } else if (fmt_tag == 3 && bits == 32) {
    samples.resize(data_len / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::uint32_t u = rd_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      samples[i] = static_cast<double>(f);
    }
  } else if (fmt_tag == 3 && bits == 64) {
    samples.resize(data_len / 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::uint64_t u =
          static_cast<std::uint64_t>(rd_u32(data + 8 * i)) |
          (static_cast<std::uint64_t>(rd_u32(data + 8 * i + 4)) << 32);
      double d;
      std::memcpy(&d, &u, 8);
      samples[i] = d;
    }
  } else {
    throw std::runtime_error(ctx + ": unsupported format (tag " +
                             std::to_string(fmt_tag) + ", " +
                             std::to_string(bits) + " bits)");
  }
  if (samples.empty()) throw std::runtime_error(ctx + ": empty data chunk");
  return {std::move(samples), static_cast<double>(rate)};
}

std::pair<std::vector<double>, double> load_text_ir(
    const std::filesystem::path& path) {
  const std::string ctx = "impulse-response file " + path.string();
  TextDoc doc = parse_text_doc(read_file(path));
  if (doc.lines.empty())
    throw std::runtime_error(ctx + ": no data (expected the sample rate "
                                   "followed by one sample per line)");
  const double rate = parse_double(doc.lines[0], ctx + ": sample rate");
  if (!(rate > 0.0))
    throw std::runtime_error(ctx + ": sample rate must be positive");
  std::vector<double> samples;
  samples.reserve(doc.lines.size() - 1);
  for (std::size_t i = 1; i < doc.lines.size(); ++i)
    samples.push_back(
        parse_double(doc.lines[i], ctx + " line " + std::to_string(i + 1)));
  if (samples.empty())
    throw std::runtime_error(ctx + ": no samples after the rate line");
  return {std::move(samples), rate};
}

}  // namespace

std::pair<std::vector<double>, double> load_impulse_response(
    const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("impulse-response file does not exist: " +
                             path.string());
  if (path.extension() == ".wav") return load_wav(path);
  return load_text_ir(path);
}

void save_impulse_response_text(const std::filesystem::path& path,
                                std::span<const double> samples,
                                double sample_rate) {
  std::string body = "# impulse response\n";
  body += format_g17(sample_rate) + "\n";
  for (double v : samples) body += format_g17(v) + "\n";
  write_file(path, body);
}

void save_impulse_response_wav(const std::filesystem::path& path,
                               std::span<const double> samples,
                               double sample_rate) {
  const std::uint32_t rate = static_cast<std::uint32_t>(sample_rate);
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 4);
  std::string body;
  auto put_u32 = [&body](std::uint32_t v) {
    body += static_cast<char>(v & 0xff);
    body += static_cast<char>((v >> 8) & 0xff);
    body += static_cast<char>((v >> 16) & 0xff);
    body += static_cast<char>((v >> 24) & 0xff);
  };
  auto put_u16 = [&body](std::uint16_t v) {
    body += static_cast<char>(v & 0xff);
    body += static_cast<char>((v >> 8) & 0xff);
  };
  body += "RIFF";
  put_u32(36 + data_len);
  body += "WAVEfmt ";
  put_u32(16);
  put_u16(3);  // IEEE float
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(rate * 4);
  put_u16(4);
  put_u16(32);
  body += "data";
  put_u32(data_len);
  for (double v : samples) {
    const float f = static_cast<float>(v);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32(u);
  }
  write_file(path, body);
}

// --- output lock ------------------------------------------------------------

DirLock::DirLock(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  lock_path_ = dir / ".lock";
  const int fd =
      ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw std::runtime_error(
          "output directory is locked by another run: " +
          lock_path_.string() + " (remove the file if that run is gone)");
    throw std::runtime_error("cannot create lock file " +
                             lock_path_.string() + ": " +
                             std::strerror(errno));
  }
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%ld\n",
                                static_cast<long>(::getpid()));
  if (::write(fd, buf, static_cast<std::size_t>(len)) < 0) {
    ::close(fd);
    throw std::runtime_error("cannot write lock file " + lock_path_.string());
  }
  ::close(fd);
}

DirLock::~DirLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

}  // namespace pszkit
