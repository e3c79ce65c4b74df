#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slim/cv.hpp"
#include "slim/io.hpp"
#include "slim/mip.hpp"
#include "slim/solver.hpp"

namespace {

using namespace slim;

struct DataOptions {
  std::string path;
  CsvOptions csv;

  void add(CLI::App* cmd, bool required = true) {
    auto* o = cmd->add_option("--data", path, "CSV file with a header row");
    if (required) o->required();
    cmd->add_option("--label", csv.label_column, "label column (default: last column)");
    cmd->add_option("--positive", csv.positive_label, "value of the positive class")->capture_default_str();
    cmd->add_option("--negative", csv.negative_label, "value of the negative class (default: the other value)");
    cmd->add_option("--drop", csv.drop_columns, "columns to ignore");
  }
  Dataset load() const { return ingest_csv(path, csv); }
};

struct TrainOptions {
  std::string lattice = "int[-100,100]";
  std::optional<std::int64_t> lambda_bound;
  std::string c0 = "0.01";
  std::string c1 = "0.00001";
  double epsilon = 0.1;
  std::optional<double> big_m;
  std::string intercept = "unpenalized";
  double time_limit = 300;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::uint64_t node_limit = 0;
  CLI::Option* lattice_opt = nullptr;

  void add(CLI::App* cmd, bool search = true) {
    lattice_opt = cmd->add_option("--lattice", lattice,
                                  "coefficient set: {0,+-1,+-5}, int[lo,hi] or digit1[lo,hi]")
                      ->capture_default_str();
    cmd->add_option("--lambda-bound", lambda_bound, "shorthand for --lattice int[-B,B] (default 100)");
    cmd->add_option("--c0", c0, "per-nonzero penalty")->capture_default_str();
    cmd->add_option("--c1", c1, "per-unit L1 penalty")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "margin for a correct prediction in the MIP")->capture_default_str();
    cmd->add_option("--big-m", big_m, "big-M constant (default: automatic)");
    cmd->add_option("--intercept", intercept, "none, unpenalized or penalized")->capture_default_str();
    if (!search) return;
    cmd->add_option("--time-limit", time_limit, "seconds")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads")->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--node-limit", node_limit, "node budget, 0 for none")->capture_default_str();
  }

  CoefficientLattice make_lattice(std::size_t p) const {
    if (lambda_bound) {
      if (lattice_opt->count() > 0)
        throw Error(ErrorCode::invalid_config, "--lattice and --lambda-bound are mutually exclusive");
      return parse_lattice("int[-" + std::to_string(*lambda_bound) + "," + std::to_string(*lambda_bound) + "]",
                           p);
    }
    return parse_lattice(lattice, p);
  }

  SlimConfig config() const {
    SlimConfig cfg;
    cfg.c0 = Penalty::parse(c0);
    cfg.c1 = Penalty::parse(c1);
    cfg.epsilon = epsilon;
    cfg.big_m = big_m;
    cfg.intercept = parse_intercept_policy(intercept);
    if (!(time_limit > 0)) throw Error(ErrorCode::invalid_config, "--time-limit must be positive");
    cfg.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(time_limit * 1000)));
    cfg.threads = threads;
    cfg.seed = seed;
    cfg.node_limit = node_limit;
    cfg.validate();
    return cfg;
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void warn_if_fractional(const Dataset& data, double epsilon) {
  if (!data.all_integral())
    std::cerr << "warning: non-integer features; scores in (0, " << epsilon
              << "] are errors in the MIP but correct for prediction\n";
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    write_file(path, content);
}

ScoringSystem load_model(const std::string& path) { return parse_model_document(read_file(path)).model; }

std::vector<Penalty> parse_penalty_list(const std::vector<std::string>& items) {
  std::vector<Penalty> out;
  for (const auto& s : items) out.push_back(Penalty::parse(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse integer linear scoring systems"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  // train
  auto* train = app.add_subcommand("train", "fit a scoring system and write a model document");
  DataOptions train_data;
  TrainOptions train_opts;
  std::string train_out;
  std::vector<std::string> warm_models;
  std::string warm_values;
  bool train_quiet = false;
  train_data.add(train);
  train_opts.add(train);
  train->add_option("--out", train_out, "model file (default: stdout)");
  train->add_option("--warm-start", warm_models, "model documents used as starting incumbents");
  train->add_option("--warm-start-values", warm_values,
                    "variable values from an external MIP solver for the exported instance");
  train->add_flag("--quiet", train_quiet, "no summary on stderr");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "print +1/-1 per CSV row");
  std::string predict_model, predict_data, predict_out;
  predict_cmd->add_option("--model", predict_model, "model document")->required();
  predict_cmd->add_option("--data", predict_data, "CSV containing the model's feature columns")->required();
  predict_cmd->add_option("--out", predict_out, "output file (default: stdout)");

  // cv
  auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  DataOptions cv_data;
  TrainOptions cv_opts;
  CvPlan plan;
  bool no_stratify = false;
  std::string cv_name, cv_table, cv_csv;
  std::vector<std::string> grid_c0, grid_c1;
  cv_data.add(cv);
  cv_opts.add(cv);
  cv->add_option("--folds", plan.k, "fold count")->capture_default_str();
  cv->add_option("--fold-seed", plan.seed, "seed for fold assignment")->capture_default_str();
  cv->add_flag("--no-stratify", no_stratify, "plain shuffled folds");
  cv->add_option("--parallel-folds", plan.parallel_folds, "folds trained at once")->capture_default_str();
  cv->add_option("--name", cv_name, "dataset name in the table (default: file stem)");
  cv->add_option("--table", cv_table, "write the text table here (default: stdout)");
  cv->add_option("--csv", cv_csv, "write the delimited results here");
  cv->add_option("--grid-c0", grid_c0, "c0 candidates for nested selection")->delimiter(',');
  cv->add_option("--grid-c1", grid_c1, "c1 candidates for nested selection")->delimiter(',');

  // bound
  auto* bound = app.add_subcommand("bound", "structural risk bound for a finite lattice");
  std::string bound_model, bound_lattice;
  std::optional<std::size_t> bound_p;
  std::optional<std::int64_t> bound_lambda;
  std::int64_t bound_n = 0;
  double bound_delta = 0.05;
  std::optional<double> bound_remp;
  DataOptions bound_data;
  bound->add_option("--model", bound_model, "model document (lattice and P taken from it)");
  bound->add_option("--lattice", bound_lattice, "lattice string (with --p)");
  bound->add_option("--p", bound_p, "number of features");
  bound->add_option("--lambda", bound_lambda, "coefficient bound for the full integer box");
  bound->add_option("--n", bound_n, "sample size");
  bound->add_option("--delta", bound_delta, "confidence parameter")->capture_default_str();
  bound->add_option("--remp", bound_remp, "empirical risk");
  bound_data.add(bound, false);

  // export-mip
  auto* exp = app.add_subcommand("export-mip", "write the training MIP");
  DataOptions exp_data;
  TrainOptions exp_opts;
  std::string exp_format = "interchange-fixed", exp_out;
  exp_data.add(exp);
  exp_opts.add(exp, false);
  exp->add_option("--format", exp_format, "interchange-fixed (MPS) or interchange-free (LP)")
      ->capture_default_str();
  exp->add_option("--out", exp_out, "output file (default: stdout)");

  // render
  auto* render = app.add_subcommand("render", "print a model as a scoring system or decision tree");
  std::string render_model;
  bool render_tree_flag = false, render_dot = false, render_all_binary = false;
  TreeLabels labels;
  DataOptions render_data;
  render->add_option("--model", render_model, "model document")->required();
  render->add_flag("--tree", render_tree_flag, "render the equivalent decision tree");
  render->add_flag("--dot", render_dot, "tree in Graphviz DOT");
  render->add_flag("--assume-binary", render_all_binary, "treat every feature as 0/1 without data");
  render->add_option("--positive-name", labels.positive, "leaf text for +1")->capture_default_str();
  render->add_option("--negative-name", labels.negative, "leaf text for -1")->capture_default_str();
  render_data.add(render, false);

  // prep
  auto* prep = app.add_subcommand("prep", "one-hot encode categorical columns");
  std::string prep_in, prep_out;
  OneHotOptions onehot;
  prep->add_option("--in", prep_in, "raw CSV")->required();
  prep->add_option("--out", prep_out, "output CSV (default: stdout)");
  prep->add_option("--columns", onehot.columns, "columns to expand (default: every non-numeric)")
      ->delimiter(',');
  prep->add_option("--keep", onehot.keep, "columns never expanded, e.g. the label")->delimiter(',');
  prep->add_flag("--drop-missing", onehot.drop_missing_rows, "drop rows with a missing cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    if (*train) {
      const Dataset data = train_data.load();
      const CoefficientLattice lattice = train_opts.make_lattice(data.p());
      const SlimConfig cfg = train_opts.config();
      if (!warm_values.empty()) warn_if_fractional(data, cfg.epsilon);
      std::vector<ScoringSystem> warm;
      for (const auto& path : warm_models) warm.push_back(load_model(path));
      if (!warm_values.empty()) {
        const MipInstance mip = encode(data, lattice, cfg);
        warm.push_back(model_from_assignment(mip, parse_value_map(read_file(warm_values)),
                                             data.feature_names()));
      }
      for (auto& w : warm) {
        if (w.feature_names != data.feature_names())
          throw Error(ErrorCode::dimension_mismatch, "warm start features do not match the data columns");
        w.lattice_id = lattice.id();
      }
      const SolveReport rep = solve(data, lattice, cfg, warm);
      ModelDocument doc;
      doc.model = rep.incumbent;
      doc.metadata.dataset_hash = hex64(dataset_hash(data));
      doc.metadata.c0 = cfg.c0.to_string();
      doc.metadata.c1 = cfg.c1.to_string();
      doc.metadata.seed = cfg.seed;
      std::ostringstream gap;
      gap << rep.gap;
      doc.metadata.gap = gap.str();
      doc.metadata.timestamp = utc_now();
      emit(train_out, serialize(doc));
      if (!train_quiet) {
        std::cerr << "status " << to_string(rep.status) << ", objective " << rep.objective_value.value()
                  << ", lower bound " << rep.best_lower_bound.value() << ", training error "
                  << zero_one_loss(data, rep.incumbent) << ", size " << rep.incumbent.model_size()
                  << ", nodes " << rep.nodes_expanded << ", " << rep.elapsed.count() << " ms\n"
                  << render_scoring_system(rep.incumbent);
      }
    } else if (*predict_cmd) {
      const ScoringSystem model = load_model(predict_model);
      std::ifstream in(predict_data, std::ios::binary);
      if (!in) throw Error(ErrorCode::io_error, "cannot open " + predict_data);
      const CsvTable table = read_csv_table(in, predict_data);
      std::vector<std::size_t> cols;
      for (const auto& name : model.feature_names) {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end())
          throw Error(ErrorCode::invalid_input, "column \"" + name + "\" not found in " + predict_data);
        cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
      }
      // Reuse the numeric ingestion rules for the selected columns.
      CsvTable selected;
      selected.header = model.feature_names;
      selected.header.emplace_back("__label");
      for (const auto& row : table.rows) {
        std::vector<std::string> r;
        for (std::size_t c : cols) r.push_back(row[c]);
        r.emplace_back("1");
        selected.rows.push_back(std::move(r));
      }
      std::stringstream buffer;
      write_csv_table(buffer, selected);
      const Dataset data = parse_csv(buffer, CsvOptions{}, predict_data);
      std::ostringstream out;
      for (int label : predict(model, data)) out << (label > 0 ? "+1" : "-1") << '\n';
      emit(predict_out, out.str());
    } else if (*cv) {
      const Dataset data = cv_data.load();
      const CoefficientLattice lattice = cv_opts.make_lattice(data.p());
      const SlimConfig cfg = cv_opts.config();
      plan.stratified = !no_stratify;
      if (grid_c0.empty() != grid_c1.empty())
        throw Error(ErrorCode::invalid_config, "--grid-c0 and --grid-c1 must be given together");
      const CvResult result =
          grid_c0.empty()
              ? cross_validate(data, lattice, cfg, plan)
              : cross_validate_selected(data, lattice, cfg, plan,
                                        PenaltyGrid{parse_penalty_list(grid_c0), parse_penalty_list(grid_c1)});
      std::string name = cv_name;
      if (name.empty()) {
        name = cv_data.path;
        if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
        if (auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
      }
      const ResultTable table = report_table({{name, result}});
      emit(cv_table, table.text);
      if (!cv_csv.empty()) write_file(cv_csv, table.csv);
      for (const auto& f : result.per_fold)
        std::cerr << "fold " << f.fold << ": test " << f.test_error << ", train " << f.train_error
                  << ", size " << f.model_size << ", gap " << f.gap << ", " << to_string(f.status) << ", "
                  << f.elapsed.count() << " ms\n";
    } else if (*bound) {
      double log_k = 0;
      std::int64_t n = bound_n;
      std::optional<double> remp = bound_remp;
      if (!bound_model.empty()) {
        if (bound_lattice.size() || bound_lambda)
          throw Error(ErrorCode::invalid_config, "--model conflicts with --lattice and --lambda");
        const ScoringSystem model = load_model(bound_model);
        log_k = log_cardinality(parse_lattice(model.lattice_id, model.p()));
        if (!bound_data.path.empty()) {
          const Dataset data = bound_data.load();
          check_compatible(data, model);
          if (n == 0) n = static_cast<std::int64_t>(data.n());
          if (!remp) remp = zero_one_loss(data, model);
        }
      } else if (!bound_lattice.empty()) {
        if (bound_lambda) throw Error(ErrorCode::invalid_config, "--lattice conflicts with --lambda");
        if (!bound_p) throw Error(ErrorCode::invalid_config, "--lattice needs --p");
        log_k = log_cardinality(parse_lattice(bound_lattice, *bound_p));
      } else if (bound_lambda && bound_p) {
        log_k = log_cardinality_upper_bound(*bound_p, *bound_lambda);
      } else {
        throw Error(ErrorCode::invalid_config, "give --model, --lattice with --p, or --p with --lambda");
      }
      if (!remp) throw Error(ErrorCode::invalid_config, "--remp is required without --model and --data");
      const GeneralizationBound b = generalization_bound(*remp, log_k, n, bound_delta);
      std::printf("empirical_risk = %.6g\nlog_cardinality = %.6f\nn = %lld\ndelta = %.6g\nslack = %.6f\n"
                  "bound = %.6f\n",
                  b.empirical_risk, b.log_k, static_cast<long long>(b.n), b.delta, b.slack(), b.bound_value);
    } else if (*exp) {
      const Dataset data = exp_data.load();
      const CoefficientLattice lattice = exp_opts.make_lattice(data.p());
      const SlimConfig cfg = exp_opts.config();
      warn_if_fractional(data, cfg.epsilon);
      const MipInstance mip = encode(data, lattice, cfg);
      emit(exp_out, export_mip(mip, parse_mip_format(exp_format)));
      std::cerr << mip.variables.size() << " variables, " << mip.constraints.size() << " constraints, big-M "
                << mip.layout->big_m << '\n';
    } else if (*render) {
      const ScoringSystem model = load_model(render_model);
      if (!render_tree_flag && !render_dot) {
        std::cout << render_scoring_system(model);
        return 0;
      }
      std::vector<bool> binary(model.p(), render_all_binary);
      if (!render_data.path.empty()) {
        if (render_all_binary)
          throw Error(ErrorCode::invalid_config, "--assume-binary conflicts with --data");
        const Dataset data = render_data.load();
        check_compatible(data, model);
        for (std::size_t j = 0; j < data.p(); ++j) binary[j] = data.is_binary(j);
      } else if (!render_all_binary) {
        throw Error(ErrorCode::invalid_config, "tree rendering needs --data or --assume-binary");
      }
      const DecisionTree tree = induce_tree(model, binary);
      std::cout << (render_dot ? render_tree_dot(tree, labels) : render_tree(tree, labels));
    } else if (*prep) {
      std::ifstream in(prep_in, std::ios::binary);
      if (!in) throw Error(ErrorCode::io_error, "cannot open " + prep_in);
      const CsvTable out = one_hot(read_csv_table(in, prep_in), onehot);
      std::ostringstream buffer;
      write_csv_table(buffer, out);
      emit(prep_out, buffer.str());
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: " << to_string(e.code()) << ": " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
