#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "slim/io.hpp"

namespace slim {
namespace {

bool needs_escape(unsigned char c) {
  return c < 0x20 || c == 0x7f || c == '%' || c == '[' || c == ']' || c == ' ' || c == '#' || c == '=';
}

std::string encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (needs_escape(c)) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string decode(std::string_view s, std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    unsigned v = 0;
    if (i + 2 >= s.size() ||
        std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16).ptr != s.data() + i + 3)
      throw Error(ErrorCode::parse_error, "model line " + std::to_string(line) + ": bad escape");
    out += static_cast<char>(v);
    i += 2;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::parse_error,
                "model line " + std::to_string(line) + ": \"" + std::string(s) + "\" is not an integer");
  return v;
}

}  // namespace

std::string serialize(const ModelDocument& doc) {
  const auto& m = doc.model;
  if (m.feature_names.size() != m.coefficients.size())
    throw Error(ErrorCode::dimension_mismatch, "model has " + std::to_string(m.coefficients.size()) +
                                                   " coefficients but " +
                                                   std::to_string(m.feature_names.size()) + " names");
  std::ostringstream out;
  out << "# SLIM scoring system\n";
  out << "format_version = " << doc.format_version << '\n';
  out << "lattice = " << encode(m.lattice_id) << '\n';
  out << "intercept = " << m.intercept << '\n';
  for (std::size_t j = 0; j < m.coefficients.size(); ++j)
    out << "coefficient[" << encode(m.feature_names[j]) << "] = " << m.coefficients[j] << '\n';
  const auto& md = doc.metadata;
  out << "meta.dataset_hash = " << encode(md.dataset_hash) << '\n';
  out << "meta.c0 = " << encode(md.c0) << '\n';
  out << "meta.c1 = " << encode(md.c1) << '\n';
  out << "meta.seed = " << md.seed << '\n';
  out << "meta.gap = " << encode(md.gap) << '\n';
  out << "meta.timestamp = " << encode(md.timestamp) << '\n';
  return out.str();
}

ModelDocument parse_model_document(std::string_view text) {
  ModelDocument doc;
  doc.format_version = 0;
  std::set<std::string> seen;
  std::size_t line = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line;
    raw = trim(raw);
    if (raw.empty() || raw.front() == '#') continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::parse_error, "model line " + std::to_string(line) + ": expected key = value");
    const std::string_view key = trim(raw.substr(0, eq));
    const std::string_view value = trim(raw.substr(eq + 1));
    if (!seen.insert(std::string(key)).second)
      throw Error(ErrorCode::parse_error, "model line " + std::to_string(line) + ": duplicate key " +
                                              std::string(key));
    if (key != "format_version" && doc.format_version == 0)
      throw Error(ErrorCode::parse_error, "model document must start with format_version");

    if (key == "format_version") {
      doc.format_version = parse_integer<int>(value, line);
      if (doc.format_version > ModelDocument::kFormatVersion)
        throw Error(ErrorCode::version_error,
                    "model format version " + std::to_string(doc.format_version) +
                        " is newer than supported version " +
                        std::to_string(ModelDocument::kFormatVersion));
      if (doc.format_version < 1) throw Error(ErrorCode::parse_error, "invalid format_version");
    } else if (key == "lattice") {
      doc.model.lattice_id = decode(value, line);
    } else if (key == "intercept") {
      doc.model.intercept = parse_integer<Coefficient>(value, line);
    } else if (key.starts_with("coefficient[") && key.ends_with("]")) {
      doc.model.feature_names.push_back(decode(key.substr(12, key.size() - 13), line));
      doc.model.coefficients.push_back(parse_integer<Coefficient>(value, line));
    } else if (key == "meta.dataset_hash") {
      doc.metadata.dataset_hash = decode(value, line);
    } else if (key == "meta.c0") {
      doc.metadata.c0 = decode(value, line);
    } else if (key == "meta.c1") {
      doc.metadata.c1 = decode(value, line);
    } else if (key == "meta.seed") {
      doc.metadata.seed = parse_integer<std::uint64_t>(value, line);
    } else if (key == "meta.gap") {
      doc.metadata.gap = decode(value, line);
    } else if (key == "meta.timestamp") {
      doc.metadata.timestamp = decode(value, line);
    } else {
      throw Error(ErrorCode::version_error, "model line " + std::to_string(line) + ": unknown key \"" +
                                                std::string(key) + "\" (written by a newer version?)");
    }
  }
  if (doc.format_version == 0) throw Error(ErrorCode::parse_error, "model document has no format_version");
  if (!seen.contains("intercept")) throw Error(ErrorCode::parse_error, "model document has no intercept");
  return doc;
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto bytes = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= b[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = data.n(), p = data.p();
  bytes(&n, sizeof n);
  bytes(&p, sizeof p);
  for (const auto& name : data.feature_names()) bytes(name.c_str(), name.size() + 1);
  for (double x : data.features()) {
    const double v = x == 0 ? 0.0 : x;  // -0 and +0 hash alike
    bytes(&v, sizeof v);
  }
  for (int y : data.labels()) {
    const std::int32_t v = y;
    bytes(&v, sizeof v);
  }
  return h;
}

}  // namespace slim
