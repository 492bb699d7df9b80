#include "report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bblab::cli {

namespace {

nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "case_id,surface,basepoint,quantity,value,reference_value,residual,pass\r\n";
  for (const auto& r : rows) {
    os << r.case_id << ',' << csv_field(r.surface) << ',' << csv_field(r.basepoint) << ',' << csv_field(r.quantity)
       << ',' << format_double(r.value) << ',' << (r.reference_value ? format_double(*r.reference_value) : "") << ','
       << format_double(r.residual) << ',' << (r.pass ? "true" : "false") << "\r\n";
  }
  return os.str();
}

std::string rows_to_json(const std::string& command, const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  bool all = true;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["case_id"] = r.case_id;
    j["surface"] = r.surface;
    j["basepoint"] = r.basepoint;
    j["quantity"] = r.quantity;
    j["value"] = number_or_null(r.value);
    j["reference_value"] = r.reference_value ? number_or_null(*r.reference_value) : nullptr;
    j["residual"] = number_or_null(r.residual);
    j["pass"] = r.pass;
    all = all && r.pass;
    arr.push_back(std::move(j));
  }
  doc["passed"] = all;
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string table_to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << csv_field(t.columns[c]);
  os << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << "\r\n";
  }
  return os.str();
}

std::string table_to_json(const std::string& command, const Table& t) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["columns"] = t.columns;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    for (std::size_t c = 0; c < row.size(); ++c) j[t.columns[c]] = number_or_null(row[c]);
    arr.push_back(std::move(j));
  }
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace bblab::cli
