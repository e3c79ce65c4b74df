// Writers and readers for the two MIP interchange formats: fixed-column MPS
// and the free-form algebraic LP format. The readers accept the subset the
// writers produce plus common variations (two entries per MPS line, wrapped
// LP expressions).

#include <algorithm>
#include <cstring>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "slim/mip.hpp"

namespace slim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kFixedNameWidth = 8;
constexpr std::size_t kFixedValueWidth = 12;
constexpr std::size_t kLpNameLimit = 255;
constexpr std::size_t kLpLineTarget = 200;

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Shortest round-trip text when it fits the 12-column field, otherwise the
// most precise %g rendering that does.
std::string fixed_number(double v) {
  std::string s = shortest(v);
  if (s.size() <= kFixedValueWidth) return s;
  char buf[64];
  for (int prec = 12; prec > 0; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strlen(buf) <= kFixedValueWidth) return buf;
  }
  throw Error(ErrorCode::format_limit, "value " + s + " does not fit a fixed MPS field");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void rtrim(std::string& s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, std::size_t line_no) {
  std::string t = tok;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity" || t == "1e30" || t == "1e+30")
    return kInf;
  if (t == "-inf" || t == "-infinity" || t == "-1e30" || t == "-1e+30") return -kInf;
  double v = 0;
  const char* first = tok.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  return v;
}

// Column-major view of the constraint matrix plus the objective.
struct ColumnEntries {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // per var: (row, coef)
  std::vector<double> objective;
};

ColumnEntries transpose(const MipInstance& m) {
  ColumnEntries c;
  c.rows.resize(m.variables.size());
  c.objective.assign(m.variables.size(), 0.0);
  for (const auto& t : m.objective) c.objective[t.var] += t.coef;
  for (std::size_t r = 0; r < m.constraints.size(); ++r)
    for (auto [var, coef] : m.constraints[r].terms) c.rows[var].emplace_back(r, coef);
  return c;
}

void check_fixed_name(const std::string& name) {
  if (name.empty() || name.size() > kFixedNameWidth || name.find(' ') != std::string::npos)
    throw Error(ErrorCode::format_limit,
                "name '" + name + "' does not fit the 8-column fixed MPS name field");
}

void check_lp_name(const std::string& name) {
  bool ok = !name.empty() && name.size() <= kLpNameLimit &&
            !std::isdigit(static_cast<unsigned char>(name[0])) && name[0] != '.' &&
            name[0] != 'e' && name[0] != 'E';
  for (char c : name)
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("+-*/^<>=:[]\\").find(c) != std::string_view::npos)
      ok = false;
  // A leading e/E would be confused with an exponent only after a number; our
  // generated names never start with it, so reject it rather than quote.
  if (!ok) throw Error(ErrorCode::format_limit, "name '" + name + "' is not a legal LP identifier");
}

// ---------------------------------------------------------------------------
// Fixed MPS

std::string write_fixed(const MipInstance& m) {
  const std::string obj_name = "obj";
  for (const auto& v : m.variables) check_fixed_name(v.name);
  for (const auto& r : m.constraints) check_fixed_name(r.name);
  check_fixed_name(m.name.empty() ? "slim" : m.name);

  std::string out;
  auto line = [&](std::string s) {
    rtrim(s);
    out += s;
    out += '\n';
  };
  line("NAME          " + (m.name.empty() ? std::string("slim") : m.name));
  line("OBJSENSE");
  line("    MIN");
  line("ROWS");
  line(" N  " + obj_name);
  for (const auto& r : m.constraints) {
    const char* s = r.sense == Sense::le ? " L  " : r.sense == Sense::ge ? " G  " : " E  ";
    line(s + r.name);
  }
  line("COLUMNS");
  const ColumnEntries cols = transpose(m);
  bool in_int = false;
  int marker = 0;
  auto entry = [&](const std::string& col, const std::string& row, double v) {
    line("    " + pad(col, 10) + pad(row, 10) + fixed_number(v));
  };
  for (std::size_t k = 0; k < m.variables.size(); ++k) {
    const auto& v = m.variables[k];
    bool is_int = v.kind != VarKind::continuous;
    if (is_int != in_int) {
      std::string id = "M" + std::to_string(marker++);
      line("    " + pad(id, 10) + "'MARKER'                 " + (is_int ? "'INTORG'" : "'INTEND'"));
      in_int = is_int;
    }
    bool any = false;
    if (cols.objective[k] != 0.0) {
      entry(v.name, obj_name, cols.objective[k]);
      any = true;
    }
    for (auto [r, coef] : cols.rows[k]) {
      entry(v.name, m.constraints[r].name, coef);
      any = true;
    }
    if (!any) entry(v.name, obj_name, 0.0);
  }
  if (in_int) line("    " + pad("M" + std::to_string(marker), 10) + "'MARKER'                 'INTEND'");
  line("RHS");
  for (const auto& r : m.constraints)
    if (r.rhs != 0.0) line("    " + pad("RHS", 10) + pad(r.name, 10) + fixed_number(r.rhs));
  line("BOUNDS");
  auto bound = [&](const char* type, const std::string& name, const std::string& value) {
    line(std::string(" ") + type + " " + pad("BND", 10) + pad(name, 10) + value);
  };
  for (const auto& v : m.variables) {
    if (v.kind == VarKind::binary) {
      bound("BV", v.name, "");
      continue;
    }
    if (v.lower == v.upper) {
      bound("FX", v.name, fixed_number(v.lower));
      continue;
    }
    if (v.lower == -kInf) bound("MI", v.name, "");
    else if (v.lower != 0.0) bound("LO", v.name, fixed_number(v.lower));
    if (v.upper == kInf) {
      if (v.kind == VarKind::integer) bound("PL", v.name, "");
    } else {
      bound("UP", v.name, fixed_number(v.upper));
    }
  }
  line("ENDATA");
  return out;
}

MipInstance read_fixed(std::string_view text) {
  MipInstance m;
  enum class Section { none, name, objsense, rows, columns, rhs, ranges, bounds, done };
  Section section = Section::none;
  std::string obj_row;
  std::unordered_map<std::string, std::size_t> row_index;
  std::unordered_map<std::string, std::size_t> var_index;
  std::vector<bool> explicit_lower;
  bool in_int = false;

  auto var_for = [&](const std::string& name, std::size_t line_no) -> std::size_t {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    if (section != Section::columns)
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown column '" + name + "'");
    m.variables.push_back(Variable{name, in_int ? VarKind::integer : VarKind::continuous, 0.0, kInf});
    explicit_lower.push_back(false);
    var_index.emplace(name, m.variables.size() - 1);
    return m.variables.size() - 1;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '*') continue;
    auto tok = split_ws(raw);
    if (tok.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(raw[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") {
        section = Section::name;
        m.name = tok.size() > 1 ? tok[1] : "";
      } else if (head == "OBJSENSE") {
        section = Section::objsense;
        if (tok.size() > 1 && tok[1] != "MIN" && tok[1] != "MINIMIZE")
          throw Error(ErrorCode::parse_error, "only minimization is supported");
      } else if (head == "ROWS") {
        section = Section::rows;
      } else if (head == "COLUMNS") {
        section = Section::columns;
      } else if (head == "RHS") {
        section = Section::rhs;
      } else if (head == "RANGES") {
        throw Error(ErrorCode::parse_error, "RANGES section is not supported");
      } else if (head == "BOUNDS") {
        section = Section::bounds;
      } else if (head == "ENDATA") {
        section = Section::done;
        break;
      } else {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown section '" + head + "'");
      }
      continue;
    }
    switch (section) {
      case Section::objsense:
        if (tok[0] != "MIN" && tok[0] != "MINIMIZE")
          throw Error(ErrorCode::parse_error, "only minimization is supported");
        break;
      case Section::rows: {
        if (tok.size() != 2) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad row");
        if (tok[0] == "N") {
          if (obj_row.empty()) obj_row = tok[1];
          break;
        }
        Sense s = tok[0] == "L" ? Sense::le : tok[0] == "G" ? Sense::ge : Sense::eq;
        if (tok[0] != "L" && tok[0] != "G" && tok[0] != "E")
          throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad row type '" + tok[0] + "'");
        row_index.emplace(tok[1], m.constraints.size());
        m.constraints.push_back(Constraint{tok[1], {}, s, 0.0});
        break;
      }
      case Section::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_int = true;
          else if (tok[2] == "'INTEND'") in_int = false;
          else throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad marker");
          break;
        }
        if (tok.size() != 3 && tok.size() != 5)
          throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad column entry");
        std::size_t var = var_for(tok[0], line_no);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          double v = parse_number(tok[k + 1], line_no);
          if (tok[k] == obj_row) {
            if (v != 0.0) m.objective.push_back(ObjectiveTerm{var, v, std::nullopt});
            continue;
          }
          auto r = row_index.find(tok[k]);
          if (r == row_index.end())
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown row '" + tok[k] + "'");
          m.constraints[r->second].terms.emplace_back(var, v);
        }
        break;
      }
      case Section::rhs: {
        if (tok.size() != 3 && tok.size() != 5)
          throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad RHS entry");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          if (tok[k] == obj_row) continue;
          auto r = row_index.find(tok[k]);
          if (r == row_index.end())
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown row '" + tok[k] + "'");
          m.constraints[r->second].rhs = parse_number(tok[k + 1], line_no);
        }
        break;
      }
      case Section::bounds: {
        if (tok.size() < 3) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad bound");
        std::size_t var = var_for(tok[2], line_no);
        auto& v = m.variables[var];
        const std::string& type = tok[0];
        auto value = [&] {
          if (tok.size() < 4) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bound needs a value");
          return parse_number(tok[3], line_no);
        };
        if (type == "BV") {
          v.kind = VarKind::binary;
          v.lower = 0;
          v.upper = 1;
        } else if (type == "LO") {
          v.lower = value();
          explicit_lower[var] = true;
        } else if (type == "UP") {
          v.upper = value();
          if (v.upper < 0 && !explicit_lower[var] && v.lower == 0) v.lower = -kInf;
        } else if (type == "FX") {
          v.lower = v.upper = value();
        } else if (type == "MI") {
          v.lower = -kInf;
        } else if (type == "PL") {
          v.upper = kInf;
        } else if (type == "LI") {
          v.kind = VarKind::integer;
          v.lower = value();
        } else if (type == "UI") {
          v.kind = VarKind::integer;
          v.upper = value();
        } else if (type == "FR") {
          v.lower = -kInf;
          v.upper = kInf;
        } else {
          throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown bound type '" + type + "'");
        }
        break;
      }
      default:
        throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": data outside a section");
    }
  }
  if (section != Section::done) throw Error(ErrorCode::parse_error, "missing ENDATA");
  return m;
}

// ---------------------------------------------------------------------------
// LP format

struct LpWriter {
  std::string out;
  std::string current;

  void flush() {
    rtrim(current);
    if (!current.empty()) out += current + '\n';
    current.clear();
  }
  void start(const std::string& s) {
    flush();
    current = s;
  }
  void append(const std::string& piece) {
    if (current.size() + piece.size() + 1 > kLpLineTarget) {
      flush();
      current = " ";
    }
    if (!current.empty() && current.back() != ' ') current += ' ';
    current += piece;
  }
  void raw(const std::string& s) {
    flush();
    out += s + '\n';
  }
};

void append_terms(LpWriter& w, const MipInstance& m,
                  const std::vector<std::pair<std::size_t, double>>& terms, std::size_t fallback_var) {
  bool first = true;
  for (auto [var, coef] : terms) {
    if (coef == 0.0) continue;
    std::string piece;
    if (coef < 0) piece = first ? "-" + shortest(-coef) : "- " + shortest(-coef);
    else piece = first ? shortest(coef) : "+ " + shortest(coef);
    w.append(piece + " " + m.variables[var].name);
    first = false;
  }
  if (first) w.append("0 " + m.variables[fallback_var].name);
}

std::string write_lp(const MipInstance& m) {
  if (m.variables.empty()) throw Error(ErrorCode::format_limit, "LP format needs at least one variable");
  for (const auto& v : m.variables) check_lp_name(v.name);
  for (const auto& r : m.constraints) check_lp_name(r.name);

  LpWriter w;
  w.raw("\\ Problem name: " + (m.name.empty() ? std::string("slim") : m.name));
  w.raw("Minimize");
  std::vector<std::pair<std::size_t, double>> obj;
  {
    const ColumnEntries cols = transpose(m);
    for (std::size_t k = 0; k < m.variables.size(); ++k)
      if (cols.objective[k] != 0.0) obj.emplace_back(k, cols.objective[k]);
  }
  w.start(" obj:");
  append_terms(w, m, obj, 0);
  w.raw("Subject To");
  for (const auto& r : m.constraints) {
    w.start(" " + r.name + ":");
    append_terms(w, m, r.terms, 0);
    const char* sense = r.sense == Sense::le ? "<=" : r.sense == Sense::ge ? ">=" : "=";
    w.append(std::string(sense) + " " + shortest(r.rhs));
  }
  // Every variable is listed here, in declaration order, so a reader can
  // recover the column order.
  w.raw("Bounds");
  for (const auto& v : m.variables) {
    std::string lo = v.lower == -kInf ? "-inf" : shortest(v.lower);
    std::string up = v.upper == kInf ? "+inf" : shortest(v.upper);
    if (v.lower == v.upper) w.raw(" " + v.name + " = " + lo);
    else if (v.lower == -kInf && v.upper == kInf) w.raw(" " + v.name + " free");
    else w.raw(" " + lo + " <= " + v.name + " <= " + up);
  }
  auto list = [&](const char* header, VarKind kind) {
    bool any = std::any_of(m.variables.begin(), m.variables.end(),
                           [&](const Variable& v) { return v.kind == kind; });
    if (!any) return;
    w.raw(header);
    w.start("");
    for (const auto& v : m.variables)
      if (v.kind == kind) w.append(v.name);
    w.flush();
  };
  list("Binaries", VarKind::binary);
  list("Generals", VarKind::integer);
  w.raw("End");
  return w.out;
}

struct LpToken {
  enum Kind { name, number, plus, minus, colon, le, ge, eq } kind;
  std::string text;
  double value = 0;
  std::size_t line = 0;
};

std::vector<LpToken> lp_tokenize(const std::string& text, std::size_t first_line) {
  std::vector<LpToken> out;
  std::size_t line = first_line;
  std::size_t k = 0;
  auto is_name_char = [](char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && std::string_view("+-:<>=").find(c) == std::string_view::npos;
  };
  while (k < text.size()) {
    char c = text[k];
    if (c == '\n') {
      ++line;
      ++k;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++k;
      continue;
    }
    if (c == '+') { out.push_back({LpToken::plus, "+", 0, line}); ++k; continue; }
    if (c == '-') { out.push_back({LpToken::minus, "-", 0, line}); ++k; continue; }
    if (c == ':') { out.push_back({LpToken::colon, ":", 0, line}); ++k; continue; }
    if (c == '<' || c == '>' || c == '=') {
      LpToken::Kind kind = c == '<' ? LpToken::le : c == '>' ? LpToken::ge : LpToken::eq;
      ++k;
      if (k < text.size() && text[k] == '=') ++k;
      if (c == '=' && k < text.size() && (text[k] == '<' || text[k] == '>')) {
        kind = text[k] == '<' ? LpToken::le : LpToken::ge;
        ++k;
      }
      out.push_back({kind, "", 0, line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = k;
      while (k < text.size() && (std::isdigit(static_cast<unsigned char>(text[k])) || text[k] == '.')) ++k;
      if (k < text.size() && (text[k] == 'e' || text[k] == 'E')) {
        std::size_t save = k++;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        } else {
          k = save;
        }
      }
      std::string num = text.substr(start, k - start);
      out.push_back({LpToken::number, num, parse_number(num, line), line});
      continue;
    }
    std::size_t start = k;
    while (k < text.size() && is_name_char(text[k])) ++k;
    std::string word = text.substr(start, k - start);
    std::string lower = word;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "inf" || lower == "infinity") out.push_back({LpToken::number, word, kInf, line});
    else out.push_back({LpToken::name, word, 0, line});
  }
  return out;
}

MipInstance read_lp(std::string_view text) {
  MipInstance m;
  enum class Section { none, objective, constraints, bounds, binaries, generals, end };
  std::map<Section, std::string> bodies;
  std::map<Section, std::size_t> first_line;
  Section section = Section::none;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string trimmed = raw;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    rtrim(trimmed);
    if (!trimmed.empty() && trimmed[0] == '\\') {
      const std::string tag = "\\ Problem name: ";
      if (trimmed.rfind(tag, 0) == 0) m.name = trimmed.substr(tag.size());
      continue;
    }
    std::string lower = trimmed;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    Section next = Section::none;
    if (lower == "minimize" || lower == "minimise" || lower == "min") next = Section::objective;
    else if (lower == "maximize" || lower == "maximise" || lower == "max")
      throw Error(ErrorCode::parse_error, "only minimization is supported");
    else if (lower == "subject to" || lower == "such that" || lower == "st" || lower == "s.t.") next = Section::constraints;
    else if (lower == "bounds" || lower == "bound") next = Section::bounds;
    else if (lower == "binaries" || lower == "binary" || lower == "bin") next = Section::binaries;
    else if (lower == "generals" || lower == "general" || lower == "gen") next = Section::generals;
    else if (lower == "end") next = Section::end;
    if (next != Section::none) {
      section = next;
      if (!first_line.count(section)) first_line[section] = line_no + 1;
      if (section == Section::end) break;
      continue;
    }
    if (trimmed.empty()) continue;
    if (section == Section::none)
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": text before the objective");
    bodies[section] += trimmed + "\n";
  }
  if (section != Section::end) throw Error(ErrorCode::parse_error, "missing End");

  std::unordered_map<std::string, std::size_t> var_index;
  auto var_for = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    m.variables.push_back(Variable{name, VarKind::continuous, 0.0, kInf});
    var_index.emplace(name, m.variables.size() - 1);
    return m.variables.size() - 1;
  };
  auto fail = [](const LpToken& t, const std::string& what) {
    return Error(ErrorCode::parse_error, "line " + std::to_string(t.line) + ": " + what);
  };

  // Bounds come first so that declaration order is recovered.
  {
    std::istringstream b(bodies[Section::bounds]);
    std::string line;
    std::size_t ln = first_line[Section::bounds];
    while (std::getline(b, line)) {
      auto toks = lp_tokenize(line, ln);
      // Fold unary signs into numbers.
      std::vector<LpToken> t;
      for (std::size_t k = 0; k < toks.size(); ++k) {
        if ((toks[k].kind == LpToken::minus || toks[k].kind == LpToken::plus) && k + 1 < toks.size() &&
            toks[k + 1].kind == LpToken::number) {
          LpToken num = toks[k + 1];
          if (toks[k].kind == LpToken::minus) num.value = -num.value;
          t.push_back(num);
          ++k;
        } else {
          t.push_back(toks[k]);
        }
      }
      if (t.size() == 2 && t[0].kind == LpToken::name && t[1].kind == LpToken::name) {
        auto& v = m.variables[var_for(t[0].text)];
        v.lower = -kInf;
        v.upper = kInf;
      } else if (t.size() == 5 && t[0].kind == LpToken::number && t[1].kind == LpToken::le &&
                 t[2].kind == LpToken::name && t[3].kind == LpToken::le && t[4].kind == LpToken::number) {
        auto& v = m.variables[var_for(t[2].text)];
        v.lower = t[0].value;
        v.upper = t[4].value;
      } else if (t.size() == 3 && t[0].kind == LpToken::name && t[2].kind == LpToken::number) {
        auto& v = m.variables[var_for(t[0].text)];
        if (t[1].kind == LpToken::le) v.upper = t[2].value;
        else if (t[1].kind == LpToken::ge) v.lower = t[2].value;
        else v.lower = v.upper = t[2].value;
      } else if (!t.empty()) {
        throw fail(t[0], "unsupported bound statement");
      }
      ++ln;
    }
  }

  auto parse_expression = [&](const std::vector<LpToken>& t, std::size_t& k,
                              std::vector<std::pair<std::size_t, double>>& terms) {
    double sign = 1.0;
    std::optional<double> coef;
    bool expect_term = true;
    while (k < t.size()) {
      const auto& tok = t[k];
      if (tok.kind == LpToken::plus || tok.kind == LpToken::minus) {
        if (coef) throw fail(tok, "dangling coefficient");
        if (tok.kind == LpToken::minus) sign = -sign;
        expect_term = true;
        ++k;
      } else if (tok.kind == LpToken::number) {
        if (coef) throw fail(tok, "two numbers in a row");
        // A number followed by a sense ends the expression (constant rhs).
        coef = tok.value;
        ++k;
      } else if (tok.kind == LpToken::name) {
        if (k + 1 < t.size() && t[k + 1].kind == LpToken::colon) break;  // next label
        if (!expect_term && !coef) throw fail(tok, "missing operator before '" + tok.text + "'");
        double c = sign * (coef ? *coef : 1.0);
        std::size_t var = var_for(tok.text);
        if (c != 0.0) terms.emplace_back(var, c);
        coef.reset();
        sign = 1.0;
        expect_term = false;
        ++k;
      } else {
        break;
      }
    }
    if (coef) throw fail(t[k - 1], "coefficient without a variable");
  };

  {
    auto t = lp_tokenize(bodies[Section::objective], first_line[Section::objective]);
    std::size_t k = 0;
    if (t.size() >= 2 && t[0].kind == LpToken::name && t[1].kind == LpToken::colon) k = 2;
    std::vector<std::pair<std::size_t, double>> terms;
    parse_expression(t, k, terms);
    if (k != t.size()) throw fail(t[k], "unexpected token in the objective");
    for (auto [var, c] : terms) m.objective.push_back(ObjectiveTerm{var, c, std::nullopt});
  }
  {
    auto t = lp_tokenize(bodies[Section::constraints], first_line[Section::constraints]);
    std::size_t k = 0;
    std::size_t unnamed = 0;
    while (k < t.size()) {
      Constraint row;
      if (k + 1 < t.size() && t[k].kind == LpToken::name && t[k + 1].kind == LpToken::colon) {
        row.name = t[k].text;
        k += 2;
      } else {
        row.name = "R" + std::to_string(++unnamed);
      }
      parse_expression(t, k, row.terms);
      if (k >= t.size() || (t[k].kind != LpToken::le && t[k].kind != LpToken::ge && t[k].kind != LpToken::eq))
        throw fail(t[std::min(k, t.size() - 1)], "constraint '" + row.name + "' has no sense");
      row.sense = t[k].kind == LpToken::le ? Sense::le : t[k].kind == LpToken::ge ? Sense::ge : Sense::eq;
      ++k;
      double sign = 1.0;
      if (k < t.size() && (t[k].kind == LpToken::minus || t[k].kind == LpToken::plus)) {
        if (t[k].kind == LpToken::minus) sign = -1.0;
        ++k;
      }
      if (k >= t.size() || t[k].kind != LpToken::number)
        throw fail(t[std::min(k, t.size() - 1)], "constraint '" + row.name + "' has no right-hand side");
      row.rhs = sign * t[k].value;
      ++k;
      m.constraints.push_back(std::move(row));
    }
  }
  auto mark = [&](Section s, VarKind kind) {
    for (const auto& tok : lp_tokenize(bodies[s], first_line[s])) {
      if (tok.kind != LpToken::name) throw fail(tok, "expected a variable name");
      auto& v = m.variables[var_for(tok.text)];
      v.kind = kind;
      if (kind == VarKind::binary) {
        v.lower = std::max(v.lower, 0.0);
        v.upper = std::min(v.upper, 1.0);
      }
    }
  };
  mark(Section::binaries, VarKind::binary);
  mark(Section::generals, VarKind::integer);
  return m;
}

}  // namespace

std::string_view to_string(MipFormat format) {
  return format == MipFormat::fixed ? "interchange-fixed" : "interchange-free";
}

MipFormat parse_mip_format(std::string_view text) {
  if (text == "interchange-fixed" || text == "fixed" || text == "mps") return MipFormat::fixed;
  if (text == "interchange-free" || text == "free" || text == "lp") return MipFormat::free;
  throw Error(ErrorCode::parse_error, "unknown MIP format '" + std::string(text) + "'");
}

std::string export_mip(const MipInstance& instance, MipFormat format) {
  for (const auto& row : instance.constraints)
    for (auto [var, coef] : row.terms)
      if (var >= instance.variables.size())
        throw Error(ErrorCode::invalid_input, "row '" + row.name + "' references an undeclared variable");
  for (const auto& t : instance.objective)
    if (t.var >= instance.variables.size())
      throw Error(ErrorCode::invalid_input, "objective references an undeclared variable");
  return format == MipFormat::fixed ? write_fixed(instance) : write_lp(instance);
}

MipInstance parse_mip(std::string_view text, MipFormat format) {
  return format == MipFormat::fixed ? read_fixed(text) : read_lp(text);
}

}  // namespace slim
