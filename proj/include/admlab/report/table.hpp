#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace admlab::report {

/// How a number was obtained.
enum class Provenance { ClosedForm, Quadrature, TrialMax };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::TrialMax: return "trial-max";
  }
  return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "closed-form") return Provenance::ClosedForm;
  if (s == "quadrature") return Provenance::Quadrature;
  if (s == "trial-max") return Provenance::TrialMax;
  throw std::invalid_argument("unknown provenance tag \"" + s + "\"");
}

struct Column {
  std::string name;
  bool numeric = true;
  Provenance tag = Provenance::ClosedForm;  ///< meaningful for numeric columns only
};

using Cell = std::variant<double, std::string>;

/// Shortest round-trip text for a double ("%.17g"), with inf/nan spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> cols) : cols_(std::move(cols)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != cols_.size()) throw std::logic_error("Table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i)
      if (std::holds_alternative<double>(row[i]) != cols_[i].numeric)
        throw std::logic_error("Table: cell type does not match column " + cols_[i].name);
    rows_.push_back(std::move(row));
  }

  [[nodiscard]] const std::vector<Column>& columns() const noexcept { return cols_; }
  [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  [[nodiscard]] std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < cols_.size(); ++i)
      if (cols_[i].name == name) return i;
    throw std::out_of_range("Table: no column " + name);
  }

  [[nodiscard]] double number(std::size_t row, const std::string& col) const {
    return std::get<double>(rows_.at(row).at(column_index(col)));
  }

  /// Comma-separated text with a header row and LF line endings.
  [[nodiscard]] std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < cols_.size(); ++i) out += (i ? "," : "") + cols_[i].name;
    out += '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += std::holds_alternative<double>(r[i]) ? format_number(std::get<double>(r[i])) : std::get<std::string>(r[i]);
      }
      out += '\n';
    }
    return out;
  }

  /// Parses text written by to_csv() given the column layout.
  static Table from_csv(const std::string& text, std::vector<Column> cols) {
    Table t(std::move(cols));
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("CSV: empty file");
    std::string expect;
    for (std::size_t i = 0; i < t.cols_.size(); ++i) expect += (i ? "," : "") + t.cols_[i].name;
    if (line != expect) throw std::invalid_argument("CSV: header does not match manifest columns");
    while (std::getline(in, line)) {
      std::vector<Cell> row;
      std::size_t start = 0;
      for (std::size_t i = 0; i < t.cols_.size(); ++i) {
        const std::size_t end = i + 1 == t.cols_.size() ? line.size() : line.find(',', start);
        if (end == std::string::npos) throw std::invalid_argument("CSV: short row");
        const std::string field = line.substr(start, end - start);
        if (t.cols_[i].numeric) {
          row.emplace_back(parse_number(field));
        } else {
          row.emplace_back(field);
        }
        start = end + 1;
      }
      t.rows_.push_back(std::move(row));
    }
    return t;
  }

 private:
  std::vector<Column> cols_;
  std::vector<std::vector<Cell>> rows_;
};

/// 64-bit FNV-1a hash, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json columns_to_json(const std::vector<Column>& cols) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cols) {
    nlohmann::json j{{"name", c.name}, {"numeric", c.numeric}};
    j["tag"] = c.numeric ? nlohmann::json(to_string(c.tag)) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Rejects manifests with an untagged numeric column or an unknown tag.
inline std::vector<Column> columns_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw std::invalid_argument("manifest: \"columns\" must be an array");
  std::vector<Column> cols;
  for (const auto& j : arr) {
    Column c;
    c.name = j.at("name").get<std::string>();
    c.numeric = j.at("numeric").get<bool>();
    if (c.numeric) {
      if (!j.contains("tag") || !j.at("tag").is_string())
        throw std::invalid_argument("manifest: numeric column \"" + c.name + "\" has no provenance tag");
      c.tag = provenance_from_string(j.at("tag").get<std::string>());
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace admlab::report
