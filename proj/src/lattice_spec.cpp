#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "slim/io.hpp"

namespace slim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(std::string_view spec, std::string_view why) {
  throw Error(ErrorCode::parse_error, "lattice \"" + std::string(spec) + "\": " + std::string(why));
}

Coefficient parse_int(std::string_view spec, std::string_view token) {
  token = trim(token);
  bool negative = false;
  if (token.starts_with("\xE2\x88\x92")) {  // U+2212 minus sign
    negative = true;
    token.remove_prefix(3);
  } else if (token.starts_with("-")) {
    negative = true;
    token.remove_prefix(1);
  } else if (token.starts_with("+")) {
    token.remove_prefix(1);
  }
  Coefficient v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
    malformed(spec, "\"" + std::string(token) + "\" is not an integer");
  if (v > kLatticeValueCap)
    throw Error(ErrorCode::invalid_input, "lattice \"" + std::string(spec) + "\": |" + std::to_string(v) +
                                              "| exceeds the cap " + std::to_string(kLatticeValueCap));
  return negative ? -v : v;
}

std::pair<Coefficient, Coefficient> parse_range(std::string_view spec, std::string_view body) {
  if (!body.starts_with("[") || !body.ends_with("]")) malformed(spec, "expected [lo,hi]");
  body = body.substr(1, body.size() - 2);
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) malformed(spec, "expected [lo,hi]");
  const Coefficient lo = parse_int(spec, body.substr(0, comma));
  const Coefficient hi = parse_int(spec, body.substr(comma + 1));
  if (lo > hi) malformed(spec, "empty range");
  return {lo, hi};
}

}  // namespace

CoefficientLattice parse_lattice(std::string_view text, std::size_t p) {
  const std::string_view spec = trim(text);
  if (p == 0) throw Error(ErrorCode::invalid_input, "lattice needs at least one coordinate");
  std::set<Coefficient> values;
  if (spec.starts_with("{")) {
    if (!spec.ends_with("}")) malformed(spec, "missing '}'");
    std::string_view body = spec.substr(1, spec.size() - 2);
    if (trim(body).empty()) malformed(spec, "empty set");
    while (true) {
      const auto comma = body.find(',');
      std::string_view token = trim(body.substr(0, comma));
      bool both = false;
      if (token.starts_with("\xC2\xB1")) {  // U+00B1 plus-minus sign
        both = true;
        token.remove_prefix(2);
      } else if (token.starts_with("+-")) {
        both = true;
        token.remove_prefix(2);
      }
      const Coefficient v = parse_int(spec, token);
      if (both && v < 0) malformed(spec, "signed value after a plus-minus sign");
      values.insert(v);
      if (both) values.insert(-v);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  } else if (spec.starts_with("int")) {
    auto [lo, hi] = parse_range(spec, trim(spec.substr(3)));
    if (lo == -hi) return CoefficientLattice::integer_range(std::max<Coefficient>(hi, 1), p);
    for (Coefficient v = lo; v <= hi; ++v) values.insert(v);
  } else if (spec.starts_with("digit1")) {
    auto [lo, hi] = parse_range(spec, trim(spec.substr(6)));
    values.insert(0);
    for (Coefficient scale = 1; scale <= kLatticeValueCap; scale *= 10)
      for (Coefficient d = 1; d <= 9; ++d)
        for (Coefficient v : {d * scale, -d * scale})
          if (v >= lo && v <= hi) values.insert(v);
  } else {
    malformed(spec, "expected {..}, int[lo,hi] or digit1[lo,hi]");
  }
  if (!values.contains(0))
    throw Error(ErrorCode::invalid_input, "lattice \"" + std::string(spec) + "\" does not contain 0");
  Coefficient bound = 1;
  for (Coefficient v : values) bound = std::max(bound, v < 0 ? -v : v);
  return CoefficientLattice(std::vector<std::vector<Coefficient>>(p, {values.begin(), values.end()}),
                            bound, std::string(spec));
}

}  // namespace slim
