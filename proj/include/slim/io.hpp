#ifndef SLIM_IO_HPP
#define SLIM_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slim/model.hpp"

namespace slim {

struct CsvOptions {
  std::string label_column;  // empty: last column
  std::string positive_label = "1";
  /// Empty: any second distinct value is the negative class.
  std::string negative_label;
  std::vector<std::string> drop_columns;
};

/// Header row required; every other column is a numeric feature in file
/// order. Missing cells ("", NA, NaN, ?) are rejected naming the file line
/// and column.
Dataset ingest_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {},
                  std::string_view source = "<stream>");

/// Raw table for preprocessing: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv_table(std::istream& in, std::string_view source = "<stream>");
void write_csv_table(std::ostream& out, const CsvTable& table);

struct OneHotOptions {
  /// Columns to expand; empty means every column with a non-numeric cell.
  std::vector<std::string> columns;
  std::vector<std::string> keep;  // never expanded (e.g. the label)
  bool drop_missing_rows = false;
};
/// Replaces each categorical column by 0/1 columns named "<column>=<level>",
/// levels in sorted order.
CsvTable one_hot(const CsvTable& table, const OneHotOptions& options);

/// "{0,±1,±5}" (also "+-"), "int[a,b]" or "digit1[a,b]", the same set for
/// every coordinate. Lambda is the largest magnitude (at least 1).
CoefficientLattice parse_lattice(std::string_view spec, std::size_t p);

inline constexpr Coefficient kLatticeValueCap = 1'000'000;

std::uint64_t dataset_hash(const Dataset& data);

struct ModelMetadata {
  std::string dataset_hash;  // 16 hex digits, FNV-1a 64 over the parsed data
  std::string c0;
  std::string c1;
  std::uint64_t seed = 0;
  std::string gap;
  std::string timestamp;  // ISO 8601 UTC

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

struct ModelDocument {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  ScoringSystem model;  // lattice_id holds the lattice string
  ModelMetadata metadata;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

std::string serialize(const ModelDocument& doc);
/// Rejects unknown keys and versions newer than kFormatVersion.
ModelDocument parse_model_document(std::string_view text);

/// Two lines: "Score = ..." and "Predicted Class = sign(Score)".
std::string render_scoring_system(const ScoringSystem& model);

struct TreeNode {
  // Leaf when feature is empty.
  std::string feature;
  std::size_t feature_index = 0;
  int label = 0;
  std::unique_ptr<TreeNode> yes;  // feature = 1
  std::unique_ptr<TreeNode> no;   // feature = 0

  bool is_leaf() const { return !yes; }
};

struct DecisionTree {
  std::unique_ptr<TreeNode> root;

  std::size_t leaves() const;
  int classify(std::span<const double> x) const;
};

/// `binary[j]` marks 0/1 features; every nonzero coefficient must be on one.
DecisionTree induce_tree(const ScoringSystem& model, const std::vector<bool>& binary);

struct TreeLabels {
  std::string positive = "+1";
  std::string negative = "-1";
};
std::string render_tree(const DecisionTree& tree, const TreeLabels& labels = {});
std::string render_tree_dot(const DecisionTree& tree, const TreeLabels& labels = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace slim

#endif  // SLIM_IO_HPP
