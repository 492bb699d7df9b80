#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bblab::cli {

struct ReportRow {
  int case_id = 0;
  std::string surface;
  std::string basepoint;
  std::string quantity;
  double value = 0.0;
  std::optional<double> reference_value;
  double residual = 0.0;
  bool pass = false;
};

/// A plain table with a fixed header; every cell is a float.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest decimal form with 17 significant digits ("%.17g").
std::string format_double(double v);

/// RFC-4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

/// Header: case_id,surface,basepoint,quantity,value,reference_value,residual,pass
std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::string rows_to_json(const std::string& command, const std::vector<ReportRow>& rows);

std::string table_to_csv(const Table& t);
std::string table_to_json(const std::string& command, const Table& t);

}  // namespace bblab::cli
