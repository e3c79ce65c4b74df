#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "slim/io.hpp"

namespace slim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "?" || cell == "N/A";
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::vector<std::string> split_record(std::string_view line, std::string_view source, std::size_t lineno) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      cells.emplace_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::parse_error, where(source, lineno) + ": unterminated quoted cell");
  cells.emplace_back(was_quoted ? cur : std::string(trim(cur)));
  return cells;
}

struct Record {
  std::size_t line;
  std::vector<std::string> cells;
};

// Header plus data records with their file line numbers; blank lines skipped.
std::pair<std::vector<std::string>, std::vector<Record>> read_records(std::istream& in,
                                                                      std::string_view source) {
  std::vector<std::string> header;
  std::vector<Record> records;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_record(line, source, lineno);
    if (!have_header) {
      header = std::move(cells);
      have_header = true;
      std::set<std::string> seen;
      for (const auto& h : header) {
        if (h.empty()) throw Error(ErrorCode::parse_error, where(source, lineno) + ": empty column name");
        if (!seen.insert(h).second)
          throw Error(ErrorCode::parse_error, where(source, lineno) + ": duplicate column \"" + h + "\"");
      }
      continue;
    }
    if (cells.size() != header.size())
      throw Error(ErrorCode::parse_error, where(source, lineno) + ": expected " +
                                              std::to_string(header.size()) + " cells, found " +
                                              std::to_string(cells.size()));
    records.push_back(Record{lineno, std::move(cells)});
  }
  if (!have_header) throw Error(ErrorCode::parse_error, std::string(source) + ": no header row");
  return {std::move(header), std::move(records)};
}

bool same_label(std::string_view cell, std::string_view label) {
  if (cell == label) return true;
  auto a = parse_number(cell), b = parse_number(label);
  return a && b && *a == *b;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string_view source) {
  auto [header, records] = read_records(in, source);
  std::size_t label_col = header.size() - 1;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end())
      throw Error(ErrorCode::invalid_input,
                  std::string(source) + ": label column \"" + options.label_column + "\" not found");
    label_col = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<bool> dropped(header.size(), false);
  for (const auto& d : options.drop_columns) {
    auto it = std::find(header.begin(), header.end(), d);
    if (it == header.end())
      throw Error(ErrorCode::invalid_input, std::string(source) + ": column \"" + d + "\" not found");
    if (static_cast<std::size_t>(it - header.begin()) == label_col)
      throw Error(ErrorCode::invalid_input, "cannot drop the label column \"" + d + "\"");
    dropped[static_cast<std::size_t>(it - header.begin())] = true;
  }
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col || dropped[c]) continue;
    feature_cols.push_back(c);
    names.push_back(header[c]);
  }
  if (records.empty()) throw Error(ErrorCode::invalid_input, std::string(source) + ": no data rows");

  std::vector<double> features;
  features.reserve(records.size() * feature_cols.size());
  std::vector<int> labels;
  std::string negative = options.negative_label;
  for (const auto& r : records) {
    for (std::size_t c : feature_cols) {
      const std::string& cell = r.cells[c];
      if (is_missing(cell))
        throw Error(ErrorCode::invalid_input, where(source, r.line) + ": missing value in row " +
                                                  std::to_string(r.line) + ", column \"" + header[c] +
                                                  "\"");
      auto v = parse_number(cell);
      if (!v)
        throw Error(ErrorCode::invalid_input, where(source, r.line) + ": non-numeric value \"" + cell +
                                                  "\" in row " + std::to_string(r.line) + ", column \"" +
                                                  header[c] + "\"");
      features.push_back(*v);
    }
    const std::string& lab = r.cells[label_col];
    if (is_missing(lab))
      throw Error(ErrorCode::invalid_input, where(source, r.line) + ": missing label in row " +
                                                std::to_string(r.line) + ", column \"" +
                                                header[label_col] + "\"");
    if (same_label(lab, options.positive_label)) {
      labels.push_back(1);
    } else if (negative.empty() || same_label(lab, negative)) {
      if (negative.empty()) negative = lab;
      labels.push_back(-1);
    } else {
      throw Error(ErrorCode::invalid_input, where(source, r.line) + ": label \"" + lab +
                                                "\" is neither \"" + options.positive_label +
                                                "\" nor \"" + negative + "\"");
    }
  }
  return Dataset(std::move(features), records.size(), feature_cols.size(), std::move(labels),
                 std::move(names));
}

Dataset ingest_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  return parse_csv(in, options, path);
}

CsvTable read_csv_table(std::istream& in, std::string_view source) {
  auto [header, records] = read_records(in, source);
  CsvTable t;
  t.header = std::move(header);
  for (auto& r : records) t.rows.push_back(std::move(r.cells));
  return t;
}

void write_csv_table(std::ostream& out, const CsvTable& table) {
  auto cell = [&](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) {
      out << s;
      return;
    }
    out << '"';
    for (char c : s) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  };
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out << ',';
      cell(r[k]);
    }
    out << '\n';
  };
  row(table.header);
  for (const auto& r : table.rows) row(r);
}

CsvTable one_hot(const CsvTable& table, const OneHotOptions& options) {
  const std::size_t width = table.header.size();
  auto index_of = [&](const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error(ErrorCode::invalid_input, "column \"" + name + "\" not found");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  std::vector<bool> keep(width, false);
  for (const auto& k : options.keep) keep[index_of(k)] = true;

  std::vector<const std::vector<std::string>*> rows;
  for (const auto& r : table.rows) {
    if (options.drop_missing_rows &&
        std::any_of(r.begin(), r.end(), [](const std::string& c) { return is_missing(c); }))
      continue;
    rows.push_back(&r);
  }

  std::vector<bool> expand(width, false);
  if (!options.columns.empty()) {
    for (const auto& c : options.columns) expand[index_of(c)] = true;
  } else {
    for (std::size_t c = 0; c < width; ++c) {
      if (keep[c]) continue;
      for (const auto* r : rows) {
        const std::string& cell = (*r)[c];
        if (!is_missing(cell) && !parse_number(cell)) {
          expand[c] = true;
          break;
        }
      }
    }
  }

  std::vector<std::vector<std::string>> levels(width);
  for (std::size_t c = 0; c < width; ++c) {
    if (!expand[c]) continue;
    std::set<std::string> seen;
    for (const auto* r : rows) {
      const std::string& cell = (*r)[c];
      if (is_missing(cell))
        throw Error(ErrorCode::invalid_input,
                    "missing value in categorical column \"" + table.header[c] + "\"");
      seen.insert(cell);
    }
    levels[c].assign(seen.begin(), seen.end());
  }

  CsvTable out;
  for (std::size_t c = 0; c < width; ++c) {
    if (!expand[c]) {
      out.header.push_back(table.header[c]);
      continue;
    }
    for (const auto& level : levels[c]) out.header.push_back(table.header[c] + "=" + level);
  }
  for (const auto* r : rows) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < width; ++c) {
      if (!expand[c]) {
        row.push_back((*r)[c]);
        continue;
      }
      for (const auto& level : levels[c]) row.emplace_back((*r)[c] == level ? "1" : "0");
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "error writing " + path);
}

}  // namespace slim
