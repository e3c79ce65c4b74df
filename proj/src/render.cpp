#include <algorithm>
#include <numeric>
#include <sstream>

#include "slim/io.hpp"

namespace slim {

std::string render_scoring_system(const ScoringSystem& model) {
  std::ostringstream out;
  out << "Score =";
  bool first = true;
  auto term = [&](Coefficient c, const std::string* name) {
    const Coefficient mag = c < 0 ? -c : c;
    if (first) {
      out << ' ' << (c < 0 ? "-" : "");
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (name == nullptr) {
      out << mag;
    } else {
      if (mag != 1) out << mag << ' ';
      out << *name;
    }
    first = false;
  };
  for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
    if (model.coefficients[j] == 0) continue;
    const std::string fallback = "x" + std::to_string(j + 1);
    term(model.coefficients[j], j < model.feature_names.size() ? &model.feature_names[j] : &fallback);
  }
  if (model.intercept != 0 || first) {
    if (model.intercept == 0)
      out << " 0";
    else
      term(model.intercept, nullptr);
  }
  out << "\nPredicted Class = sign(Score)\n";
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Builder {
  const ScoringSystem& model;
  std::vector<std::size_t> order;
  std::vector<Coefficient> lo_rest;  // min / max of the remaining terms from k on
  std::vector<Coefficient> hi_rest;

  std::unique_ptr<TreeNode> build(std::size_t k, Coefficient partial) const {
    auto node = std::make_unique<TreeNode>();
    const Coefficient lo = model.intercept + partial + lo_rest[k];
    const Coefficient hi = model.intercept + partial + hi_rest[k];
    if (lo > 0 || hi <= 0) {
      node->label = lo > 0 ? 1 : -1;
      return node;
    }
    const std::size_t j = order[k];
    node->feature_index = j;
    node->feature = j < model.feature_names.size() ? model.feature_names[j] : "x" + std::to_string(j + 1);
    node->yes = build(k + 1, partial + model.coefficients[j]);
    node->no = build(k + 1, partial);
    return node;
  }
};

std::size_t count_leaves(const TreeNode& n) {
  return n.is_leaf() ? 1 : count_leaves(*n.yes) + count_leaves(*n.no);
}

}  // namespace

std::size_t DecisionTree::leaves() const { return root ? count_leaves(*root) : 0; }

int DecisionTree::classify(std::span<const double> x) const {
  const TreeNode* n = root.get();
  while (!n->is_leaf()) n = x[n->feature_index] > 0.5 ? n->yes.get() : n->no.get();
  return n->label;
}

DecisionTree induce_tree(const ScoringSystem& model, const std::vector<bool>& binary) {
  if (binary.size() != model.coefficients.size())
    throw Error(ErrorCode::dimension_mismatch, "binary flags cover " + std::to_string(binary.size()) +
                                                   " features, the model has " +
                                                   std::to_string(model.coefficients.size()));
  Builder b{model, {}, {}, {}};
  for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
    if (model.coefficients[j] == 0) continue;
    if (!binary[j])
      throw Error(ErrorCode::invalid_input,
                  "feature " + (j < model.feature_names.size() ? model.feature_names[j] : std::to_string(j)) +
                      " has a nonzero coefficient but is not binary");
    b.order.push_back(j);
  }
  std::stable_sort(b.order.begin(), b.order.end(), [&](std::size_t a, std::size_t c) {
    const Coefficient ma = model.coefficients[a] < 0 ? -model.coefficients[a] : model.coefficients[a];
    const Coefficient mc = model.coefficients[c] < 0 ? -model.coefficients[c] : model.coefficients[c];
    return ma > mc;
  });
  b.lo_rest.assign(b.order.size() + 1, 0);
  b.hi_rest.assign(b.order.size() + 1, 0);
  for (std::size_t k = b.order.size(); k-- > 0;) {
    const Coefficient c = model.coefficients[b.order[k]];
    b.lo_rest[k] = b.lo_rest[k + 1] + std::min<Coefficient>(c, 0);
    b.hi_rest[k] = b.hi_rest[k + 1] + std::max<Coefficient>(c, 0);
  }
  DecisionTree tree;
  tree.root = b.build(0, 0);
  return tree;
}

namespace {

const std::string& label_text(int label, const TreeLabels& labels) {
  return label > 0 ? labels.positive : labels.negative;
}

void render_node(std::ostringstream& out, const TreeNode& n, const TreeLabels& labels, int indent) {
  if (n.is_leaf()) {
    out << label_text(n.label, labels) << '\n';
    return;
  }
  out << n.feature << "?\n";
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  out << pad << "yes: ";
  render_node(out, *n.yes, labels, indent + 2);
  out << pad << "no: ";
  render_node(out, *n.no, labels, indent + 2);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

int render_dot(std::ostringstream& out, const TreeNode& n, const TreeLabels& labels, int& next) {
  const int id = next++;
  if (n.is_leaf()) {
    out << "  n" << id << " [label=\"" << dot_escape(label_text(n.label, labels)) << "\", shape=ellipse];\n";
    return id;
  }
  out << "  n" << id << " [label=\"" << dot_escape(n.feature) << "?\", shape=box];\n";
  const int yes = render_dot(out, *n.yes, labels, next);
  const int no = render_dot(out, *n.no, labels, next);
  out << "  n" << id << " -> n" << yes << " [label=\"yes\"];\n";
  out << "  n" << id << " -> n" << no << " [label=\"no\"];\n";
  return id;
}

}  // namespace

std::string render_tree(const DecisionTree& tree, const TreeLabels& labels) {
  std::ostringstream out;
  if (tree.root) render_node(out, *tree.root, labels, 0);
  return out.str();
}

std::string render_tree_dot(const DecisionTree& tree, const TreeLabels& labels) {
  std::ostringstream out;
  out << "digraph scoring_tree {\n";
  int next = 0;
  if (tree.root) render_dot(out, *tree.root, labels, next);
  out << "}\n";
  return out.str();
}

}  // namespace slim
