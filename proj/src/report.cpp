#include "fputlab/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fputlab::report {

Format parseFormat(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "text") return Format::text;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (json, csv, text)");
}

const char* formatName(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::text: return "text";
  }
  return "?";
}

Report::Report(std::string experiment) : experiment_(std::move(experiment)) {}

void Report::add(const std::string& name, const char* type, Json value) {
  Json entry = Json::object();
  entry["name"] = name;
  entry["type"] = type;
  entry["value"] = std::move(value);
  results_.push_back(std::move(entry));
}

void Report::addRational(const std::string& name, const Rational& value) { add(name, "rational", value.str()); }
void Report::addExpression(const std::string& name, const std::string& value) { add(name, "expression", value); }
void Report::addText(const std::string& name, const std::string& value) { add(name, "text", value); }
void Report::addInteger(const std::string& name, long long value) { add(name, "integer", value); }

void Report::addFloat(const std::string& name, double value) {
  // JSON has no inf/nan; they are recorded as null.
  add(name, "float", std::isfinite(value) ? Json(value) : Json(nullptr));
}

void Report::addSlope(const std::string& name, const SlopeFit& fit, std::size_t points) {
  Json v = Json::object();
  v["slope"] = fit.slope;
  v["intercept"] = fit.intercept;
  v["r2"] = fit.r2;
  v["h_min"] = fit.hMin;
  v["h_max"] = fit.hMax;
  v["points"] = points;
  add(name, "slope", std::move(v));
}

bool Report::check(const std::string& name, bool passed, const std::string& detail) {
  checks_.push_back({name, passed, detail});
  return passed;
}

bool Report::passed() const {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

Json Report::toJson(bool withTimings) const {
  Json j = Json::object();
  j["schema"] = kSchema;
  j["experiment"] = experiment_;
  j["inputs"] = inputs_;
  j["results"] = results_;
  Json checks = Json::array();
  for (const auto& c : checks_) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = std::move(checks);
  j["passed"] = passed();
  j["files"] = files_;
  if (withTimings) j["timings"] = timings_;
  return j;
}

namespace {

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string valueText(const Json& entry) {
  const Json& v = entry["value"];
  if (v.is_string()) return v.get<std::string>();
  if (entry["type"] == "slope") {
    std::ostringstream os;
    os << std::setprecision(6) << "slope " << v["slope"].get<double>() << " (R^2 " << v["r2"].get<double>()
       << ", h " << v["h_min"].get<double>() << ".." << v["h_max"].get<double>() << ")";
    return os.str();
  }
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace

std::string toCsv(const Report& r) {
  std::ostringstream os;
  os << "section,name,type,value,passed,detail\n";
  for (const auto& e : r.results())
    os << "result," << csvField(e["name"].get<std::string>()) << "," << e["type"].get<std::string>() << ","
       << csvField(valueText(e)) << ",,\n";
  for (const auto& c : r.checks())
    os << "check," << csvField(c.name) << ",check,," << (c.passed ? "true" : "false") << "," << csvField(c.detail)
       << "\n";
  return os.str();
}

std::string toText(const Report& r) {
  std::ostringstream os;
  os << r.experiment() << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& e : r.results()) os << "  " << e["name"].get<std::string>() << " = " << valueText(e) << "\n";
  for (const auto& c : r.checks()) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  return os.str();
}

std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::json: return r.toJson().dump(2) + "\n";
    case Format::csv: return toCsv(r);
    case Format::text: return toText(r);
  }
  return {};
}

namespace {

void writeFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit(const Report& r, Format f, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written{dir / (r.experiment() + "_report.json")};
  writeFile(written.back(), render(r, Format::json));
  if (f != Format::json) {
    written.push_back(dir / (r.experiment() + (f == Format::csv ? "_report.csv" : "_report.txt")));
    writeFile(written.back(), render(r, f));
  }
  return written;
}

void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  writeFile(path, os.str());
}

}  // namespace fputlab::report
