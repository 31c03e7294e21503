#pragma once

// Machine-readable experiment reports, schema "fputlab.report/1"
// (docs/report.schema.json).  Exact values are serialized as strings, measured
// values as numbers.  Everything except the "timings" object is a function of
// the inputs and the seed.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fputlab/fit.hpp"
#include "fputlab/rational.hpp"

namespace fputlab::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "fputlab.report/1";

enum class Format { json, csv, text };
// Throws std::invalid_argument for anything but "json", "csv", "text".
Format parseFormat(std::string_view name);
const char* formatName(Format f);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

class Report {
 public:
  explicit Report(std::string experiment);

  const std::string& experiment() const { return experiment_; }
  Json& inputs() { return inputs_; }
  const Json& inputs() const { return inputs_; }
  const Json& results() const { return results_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::string>& files() const { return files_; }

  void addRational(const std::string& name, const Rational& value);
  // Exact symbolic value, e.g. a polynomial in the chain parameters.
  void addExpression(const std::string& name, const std::string& value);
  void addFloat(const std::string& name, double value);
  void addInteger(const std::string& name, long long value);
  void addText(const std::string& name, const std::string& value);
  void addSlope(const std::string& name, const SlopeFit& fit, std::size_t points);

  // Records and returns `passed`.
  bool check(const std::string& name, bool passed, const std::string& detail = "");
  bool passed() const;

  void addFile(const std::string& path) { files_.push_back(path); }
  void setTiming(const std::string& name, double seconds) { timings_[name] = seconds; }
  void setStartedAt(const std::string& iso) { timings_["started_at"] = iso; }

  // withTimings = false drops the only non-deterministic field.
  Json toJson(bool withTimings = true) const;

 private:
  void add(const std::string& name, const char* type, Json value);

  std::string experiment_;
  Json inputs_ = Json::object();
  Json results_ = Json::array();
  std::vector<Check> checks_;
  std::vector<std::string> files_;
  Json timings_ = Json::object();
};

// One row per result and per check: section,name,type,value,passed,detail.
std::string toCsv(const Report& r);
std::string toText(const Report& r);
std::string render(const Report& r, Format f);

// Writes <experiment>_report.json and, for csv/text, the matching summary file.
// Returns the paths written.  Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit(const Report& r, Format f, const std::filesystem::path& dir);

// Writes a CSV table with a header row; throws std::runtime_error on failure.
void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);

}  // namespace fputlab::report
