#include "gsosel/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsosel/bundle.hpp"
#include "gsosel/errors.hpp"
#include "gsosel/gnn/msd_o.hpp"
#include "gsosel/gnn/train.hpp"
#include "gsosel/gso.hpp"
#include "gsosel/msd.hpp"
#include "gsosel/stats.hpp"

namespace gsosel::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string bundle;
  std::string gso;
  std::string gsos;
  int k = 2;
  std::string subset = "val";
  int sample_size = 2000;
  double epsilon_rel = 1e-3;
  std::string manifold = "knn";
  std::optional<double> bandwidth;
  std::string solver = "dense-auto";
  double tol = 1e-6;
  int max_iter = 1000;
  int dense_cap = 256;
  bool ahat_plain = false;

  int layers = 2;
  int hidden = 64;
  int epochs = 200;
  int patience = 20;
  double lr = 0.01;
  double weight_decay = 5e-4;
  int bjorck_iters = gnn::kDefaultBjorckIters;

  std::uint64_t seed = 0;
  int seeds = 5;
  std::string out_path;
  std::string csv_path;

  // synth-sbm
  SbmConfig sbm;
  std::string feature_mode = "gaussian";
  bool f32 = false;
  // ingest
  std::string save_dir;
  // perturb
  std::vector<double> deltas{0.0, 0.01, 0.02, 0.05, 0.1};
  int trials = 20;
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    write_line(f, header_);
    for (const auto& r : rows_) write_line(f, r);
  }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string num(std::optional<double> v) { return v ? num(*v) : std::string(); }

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

MsdConfig msd_config(const Options& o) {
  MsdConfig cfg;
  cfg.manifold.k = o.k;
  cfg.manifold.mode = parse_manifold_mode(o.manifold);
  cfg.manifold.bandwidth = o.bandwidth;
  cfg.manifold.subset.kind = parse_subset_kind(o.subset);
  cfg.manifold.subset.sample_size = o.sample_size;
  cfg.manifold.subset.seed = o.seed;
  cfg.epsilon_rel = o.epsilon_rel;
  cfg.solver = parse_msd_solver(o.solver);
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.seed = o.seed;
  if (o.dense_cap < 1) throw std::invalid_argument("--dense-cap must be >= 1");
  cfg.dense_cap = static_cast<std::size_t>(o.dense_cap);
  validate_msd_config(cfg);
  return cfg;
}

gnn::TrainConfig train_config(const Options& o, std::uint64_t seed) {
  gnn::TrainConfig cfg;
  cfg.lr = o.lr;
  cfg.weight_decay = o.weight_decay;
  cfg.max_epochs = o.epochs;
  cfg.patience = o.patience;
  cfg.seed = seed;
  cfg.bjorck_iters = o.bjorck_iters;
  gnn::validate_train_config(cfg);
  return cfg;
}

std::vector<GsoKind> kind_list(const Options& o) {
  if (o.gsos.empty()) return {kAllGsoKinds.begin(), kAllGsoKinds.end()};
  std::vector<GsoKind> out;
  std::stringstream ss(o.gsos);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_gso_kind(item));
  }
  if (out.empty()) throw InputError("--gsos selects no GSO kinds");
  return out;
}

std::optional<GsoKind> single_kind(const std::string& name) {
  if (name == "identity") return std::nullopt;
  return parse_gso_kind(name);
}

std::vector<std::uint64_t> seed_list(const Options& o) {
  if (o.seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
  std::vector<std::uint64_t> out;
  for (int i = 0; i < o.seeds; ++i) out.push_back(o.seed + static_cast<std::uint64_t>(i));
  return out;
}

json config_echo(const std::string& command, const Options& o) {
  json c;
  c["bundle"] = o.bundle;
  if (command == "synth-sbm") {
    c["n"] = o.sbm.n;
    c["c"] = o.sbm.c;
    c["p_in"] = o.sbm.p_in;
    c["p_out"] = o.sbm.p_out;
    c["heterophilic"] = o.sbm.heterophilic;
    c["d"] = o.sbm.d;
    c["features"] = o.feature_mode;
    c["mean_separation"] = o.sbm.mean_separation;
    c["stddev"] = o.sbm.stddev;
    c["flip_probability"] = o.sbm.flip_probability;
    c["train_fraction"] = o.sbm.train_fraction;
    c["val_fraction"] = o.sbm.val_fraction;
    c["seed"] = o.seed;
    c["f32"] = o.f32;
    return c;
  }
  if (command == "ingest") return c;
  if (!o.gso.empty()) c["gso"] = o.gso;
  if (!o.gsos.empty()) c["gsos"] = o.gsos;
  c["k"] = o.k;
  c["subset"] = o.subset;
  c["sample_size"] = o.sample_size;
  c["epsilon_rel"] = o.epsilon_rel;
  c["manifold"] = o.manifold;
  c["bandwidth"] = opt_json(o.bandwidth);
  c["solver"] = o.solver;
  c["tol"] = o.tol;
  c["max_iter"] = o.max_iter;
  c["dense_cap"] = o.dense_cap;
  c["ahat_plain"] = o.ahat_plain;
  c["seed"] = o.seed;
  if (command == "correlate" || command == "select") {
    c["seeds"] = o.seeds;
    c["hidden"] = o.hidden;
    c["epochs"] = o.epochs;
    c["patience"] = o.patience;
    c["lr"] = o.lr;
    c["weight_decay"] = o.weight_decay;
    c["bjorck_iters"] = o.bjorck_iters;
  }
  if (command == "select") c["layers"] = o.layers;
  if (command == "perturb") {
    c["deltas"] = o.deltas;
    c["trials"] = o.trials;
  }
  return c;
}

json report_json(const MsdReport& r, int complexity_n) {
  json j;
  j["gso"] = r.gso;
  j["m"] = r.m;
  j["lambda_max"] = r.lambda_max;
  j["inverse_msd"] = opt_json(r.inverse_msd);
  j["inverse_msd_flagged"] = !r.inverse_msd.has_value();
  j["alignment_gain"] = opt_json(r.alignment_gain);
  j["baseline_lambda"] = opt_json(r.baseline_lambda);
  j["complexity_term"] = complexity_term(std::max(r.lambda_max, 0.0), complexity_n);
  j["solver"] = r.solver;
  j["solver_iters"] = r.solver_iters;
  j["cg_iters"] = r.cg_iters;
  j["converged"] = r.converged;
  j["epsilon_used"] = r.epsilon_used;
  j["knn_edges"] = r.knn_edges;
  j["bandwidth"] = r.bandwidth;
  j["seed"] = r.seed;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

const std::vector<std::string> kMsdCsvHeader = {
    "gso", "lambda_max", "inverse_msd", "inverse_msd_normalized", "alignment_gain",
    "baseline_lambda", "complexity_term", "solver", "solver_iters", "converged",
    "epsilon_used", "m", "elapsed_ms"};

std::vector<std::string> report_csv(const MsdReport& r, std::optional<double> normalized,
                                    int complexity_n) {
  return {r.gso,
          num(r.lambda_max),
          num(r.inverse_msd),
          num(normalized),
          num(r.alignment_gain),
          num(r.baseline_lambda),
          num(complexity_term(std::max(r.lambda_max, 0.0), complexity_n)),
          r.solver,
          std::to_string(r.solver_iters),
          r.converged ? "true" : "false",
          num(r.epsilon_used),
          std::to_string(r.m),
          num(r.elapsed_ms)};
}

/// N for the complexity term: the number of labelled training nodes.
int training_size(const GraphBundle& b) {
  const auto n = static_cast<int>(b.nodes_in(Split::Train).size());
  return n > 0 ? n : b.n;
}

/// Min-max normalized 1/λ over the reports that have one; flagged entries
/// stay empty.
std::vector<std::optional<double>> normalized_inverse(const std::vector<MsdReport>& reports) {
  std::vector<double> values;
  for (const auto& r : reports)
    if (r.inverse_msd) values.push_back(*r.inverse_msd);
  std::vector<std::optional<double>> out(reports.size());
  if (values.empty()) return out;
  const auto norm = minmax_normalize(values);
  std::size_t k = 0;
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (reports[i].inverse_msd) out[i] = norm[k++];
  return out;
}

void print_table(std::ostream& err, const Csv& csv) {
  std::vector<std::size_t> width(csv.header().size(), 0);
  auto widen = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  };
  widen(csv.header());
  for (const auto& r : csv.rows()) widen(r);
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) err << std::left << std::setw(static_cast<int>(width[i]) + 2) << r[i];
    err << '\n';
  };
  line(csv.header());
  for (const auto& r : csv.rows()) line(r);
}

struct Output {
  json results;
  std::optional<Csv> csv;
};

GraphBundle load(const Options& o, std::ostream& err) {
  if (o.bundle.empty()) throw InputError("--bundle is required");
  LoadedBundle lb = load_bundle(o.bundle);
  if (lb.stats.self_loops_removed > 0)
    err << "warning: removed " << lb.stats.self_loops_removed << " self-loop(s)\n";
  if (lb.stats.duplicate_edges_removed > 0)
    err << "warning: removed " << lb.stats.duplicate_edges_removed << " duplicate edge(s)\n";
  return std::move(lb.bundle);
}

json diagnostics_json(const GraphBundle& b) {
  const BundleDiagnostics d = validate_bundle(b);
  json j;
  j["name"] = b.name;
  j["nodes"] = d.nodes;
  j["features"] = b.d;
  j["classes"] = b.c;
  j["edges"] = d.edges;
  j["components"] = d.components;
  j["isolated_nodes"] = d.isolated_nodes;
  json hist = json::object();
  for (const auto& [deg, count] : d.degree_histogram) hist[std::to_string(deg)] = count;
  j["degree_histogram"] = hist;
  j["class_counts"] = d.class_counts;
  j["split"] = {{"train", d.train}, {"val", d.val}, {"test", d.test}};
  j["homophily"] = opt_json(d.homophily);
  return j;
}

Output cmd_ingest(const Options& o, std::ostream& err) {
  if (o.bundle.empty()) throw InputError("--bundle is required");
  LoadedBundle lb = load_bundle(o.bundle);
  Output out;
  out.results = diagnostics_json(lb.bundle);
  out.results["self_loops_removed"] = lb.stats.self_loops_removed;
  out.results["duplicate_edges_removed"] = lb.stats.duplicate_edges_removed;
  out.results["features_from_f32"] = lb.stats.features_from_f32;
  if (lb.stats.self_loops_removed + lb.stats.duplicate_edges_removed > 0)
    err << "warning: removed " << lb.stats.self_loops_removed << " self-loop(s) and "
        << lb.stats.duplicate_edges_removed << " duplicate edge(s)\n";
  if (!o.save_dir.empty()) {
    save_bundle(lb.bundle, o.save_dir, o.f32 ? FeatureFormat::F32 : FeatureFormat::Tsv);
    out.results["saved_to"] = o.save_dir;
  }
  return out;
}

Output cmd_synth_sbm(const Options& o) {
  if (o.bundle.empty()) throw InputError("--bundle (output directory) is required");
  SbmConfig cfg = o.sbm;
  cfg.seed = o.seed;
  if (o.feature_mode == "gaussian")
    cfg.feature_mode = FeatureMode::GaussianPerClass;
  else if (o.feature_mode == "onehot")
    cfg.feature_mode = FeatureMode::OneHotNoisy;
  else
    throw std::invalid_argument("--features must be gaussian or onehot");
  const GraphBundle b = generate_sbm(cfg);
  save_bundle(b, o.bundle, o.f32 ? FeatureFormat::F32 : FeatureFormat::Tsv);
  Output out;
  out.results = diagnostics_json(b);
  out.results["written_to"] = o.bundle;
  return out;
}

Output cmd_msd(const Options& o, std::ostream& err) {
  if (o.gso.empty()) throw InputError("--gso is required");
  const auto kind = single_kind(o.gso);
  const MsdConfig cfg = msd_config(o);
  const GraphBundle b = load(o, err);
  const GsoLibrary lib(b, {o.ahat_plain});
  const MsdReport r = alignment_gain(lib, kind, cfg);
  Output out;
  out.results = report_json(r, training_size(b));
  Csv csv(kMsdCsvHeader);
  csv.row(report_csv(r, std::nullopt, training_size(b)));
  out.csv = std::move(csv);
  return out;
}

Output cmd_rank(const Options& o, std::ostream& err) {
  const MsdConfig cfg = msd_config(o);
  const auto kinds = kind_list(o);
  const GraphBundle b = load(o, err);
  const GsoLibrary lib(b, {o.ahat_plain});
  const auto reports = rank_gsos(lib, kinds, cfg);
  const auto normalized = normalized_inverse(reports);
  Output out;
  out.results["rows"] = json::array();
  Csv csv(kMsdCsvHeader);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json row = report_json(reports[i], training_size(b));
    row["rank"] = i + 1;
    row["inverse_msd_normalized"] = opt_json(normalized[i]);
    out.results["rows"].push_back(row);
    csv.row(report_csv(reports[i], normalized[i], training_size(b)));
  }
  out.results["best"] = reports.front().gso;
  out.csv = std::move(csv);
  return out;
}

Output cmd_init_select(const Options& o, std::ostream& err) {
  Options plain = o;
  Output out = cmd_rank(plain, err);
  out.results["selected"] = out.results["best"];
  return out;
}

Output cmd_correlate(const Options& o, std::ostream& err) {
  const MsdConfig cfg = msd_config(o);
  const auto kinds = kind_list(o);
  const auto seeds = seed_list(o);
  const GraphBundle b = load(o, err);
  const GsoLibrary lib(b, {o.ahat_plain});
  const std::vector<int> test_nodes = b.nodes_in(Split::Test);
  if (test_nodes.empty()) throw InputError("correlate: the test split is empty");

  std::vector<MsdReport> reports;
  std::vector<std::vector<double>> accs(kinds.size());
  std::vector<double> acc_mean(kinds.size()), acc_std(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    reports.push_back(alignment_gain(lib, kinds[i], cfg));
    for (std::uint64_t s : seeds) {
      const std::vector<std::size_t> dims{static_cast<std::size_t>(b.d), static_cast<std::size_t>(b.c)};
      const std::vector<std::optional<GsoKind>> gsos{kinds[i]};
      const gnn::TrainResult tr =
          gnn::train(gnn::make_model(dims, gsos, s), lib, b.features, train_config(o, s));
      accs[i].push_back(gnn::evaluate(tr.model, lib, b.features, test_nodes));
    }
    acc_mean[i] = mean(accs[i]);
    acc_std[i] = stddev(accs[i]);
  }

  // Flagged (zero-λ) kinds have no inverse and are left out of ρ and of
  // the normalization.
  std::vector<double> inv, acc;
  json excluded = json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (reports[i].inverse_msd) {
      inv.push_back(*reports[i].inverse_msd);
      acc.push_back(acc_mean[i]);
    } else {
      excluded.push_back(reports[i].gso);
    }
  }
  const std::optional<double> rho = spearman(inv, acc);
  const auto inv_norm = normalized_inverse(reports);
  const auto acc_norm = minmax_normalize(acc_mean);

  Output out;
  Csv csv({"gso", "lambda_max", "inverse_msd", "inverse_msd_normalized", "test_acc_mean",
           "test_acc_std", "test_acc_normalized", "alignment_gain"});
  out.results["rows"] = json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    json row;
    row["gso"] = reports[i].gso;
    row["lambda_max"] = reports[i].lambda_max;
    row["inverse_msd"] = opt_json(reports[i].inverse_msd);
    row["inverse_msd_flagged"] = !reports[i].inverse_msd.has_value();
    row["inverse_msd_normalized"] = opt_json(inv_norm[i]);
    row["alignment_gain"] = opt_json(reports[i].alignment_gain);
    row["test_acc"] = accs[i];
    row["test_acc_mean"] = acc_mean[i];
    row["test_acc_std"] = acc_std[i];
    row["test_acc_normalized"] = acc_norm[i];
    row["msd_elapsed_ms"] = reports[i].elapsed_ms;
    out.results["rows"].push_back(row);
    csv.row({reports[i].gso, num(reports[i].lambda_max), num(reports[i].inverse_msd),
             num(inv_norm[i]), num(acc_mean[i]), num(acc_std[i]), num(acc_norm[i]),
             num(reports[i].alignment_gain)});
  }
  out.results["seeds"] = seeds;
  out.results["spearman"] = opt_json(rho);
  out.results["spearman_flagged"] = !rho.has_value();
  out.results["excluded_from_correlation"] = excluded;
  out.csv = std::move(csv);
  return out;
}

std::string join_kinds(const std::vector<GsoKind>& kinds) {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) s += (i ? "," : "") + std::string(to_string(kinds[i]));
  return s;
}

Output cmd_select(const Options& o, std::ostream& err) {
  const auto kinds = kind_list(o);
  const auto seeds = seed_list(o);
  gnn::MsdOConfig cfg;
  cfg.layers = o.layers;
  if (o.hidden < 1) throw std::invalid_argument("--hidden must be >= 1");
  cfg.hidden = static_cast<std::size_t>(o.hidden);
  cfg.msd = msd_config(o);
  const GraphBundle b = load(o, err);
  const GsoLibrary lib(b, {o.ahat_plain});

  Output out;
  Csv csv({"seed", "selected", "val_acc", "test_acc"});
  out.results["runs"] = json::array();
  std::vector<double> test_accs;
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    cfg.train = train_config(o, seeds[r]);
    const gnn::MsdOResult res = gnn::msd_o_select_and_train(lib, kinds, cfg);
    json run;
    run["seed"] = seeds[r];
    run["selected"] = join_kinds(res.selected);
    run["val_acc"] = res.val_acc;
    run["test_acc"] = res.test_acc;
    json layers = json::array();
    for (const auto& layer : res.per_layer) {
      json ranking = json::array();
      for (const auto& rep : layer.ranking) ranking.push_back({{"gso", rep.gso}, {"lambda_max", rep.lambda_max}});
      layers.push_back({{"selected", std::string(to_string(layer.selected))},
                        {"ranking", ranking},
                        {"best_epoch", layer.training.best_epoch},
                        {"best_val_acc", layer.training.best_val_acc}});
    }
    run["layers"] = layers;
    out.results["runs"].push_back(run);
    if (r == 0) out.results["selected"] = join_kinds(res.selected);
    test_accs.push_back(res.test_acc);
    csv.row({std::to_string(seeds[r]), "\"" + join_kinds(res.selected) + "\"", num(res.val_acc),
             num(res.test_acc)});
  }
  out.results["test_acc_mean"] = mean(test_accs);
  out.results["test_acc_std"] = stddev(test_accs);
  out.csv = std::move(csv);
  return out;
}

Output cmd_perturb(const Options& o, std::ostream& err) {
  if (o.gso.empty()) throw InputError("--gso is required");
  const GsoKind kind = parse_gso_kind(o.gso);
  const MsdConfig cfg = msd_config(o);
  if (cfg.manifold.mode != ManifoldMode::Rbf)
    throw std::invalid_argument(
        "perturb needs --manifold rbf: binary k-NN weights change discontinuously, so the "
        "stability experiment is only meaningful with RBF weights");
  const GraphBundle b = load(o, err);
  const GsoLibrary lib(b, {o.ahat_plain});
  const auto rows = stability_experiment(lib, kind, o.deltas, o.trials, o.seed, cfg);

  Output out;
  Csv csv({"delta", "mean_abs_change", "std_abs_change", "trials_ok", "trials_failed"});
  out.results["rows"] = json::array();
  std::vector<double> d, m;
  for (const auto& r : rows) {
    out.results["rows"].push_back({{"delta", r.delta},
                                   {"mean_abs_change", r.mean_abs_change},
                                   {"std_abs_change", r.std_abs_change},
                                   {"trials_ok", r.trials_ok},
                                   {"trials_failed", r.trials_failed}});
    csv.row({num(r.delta), num(r.mean_abs_change), num(r.std_abs_change), std::to_string(r.trials_ok),
             std::to_string(r.trials_failed)});
    d.push_back(r.delta);
    m.push_back(r.mean_abs_change);
  }
  out.results["spearman_delta_vs_change"] = opt_json(spearman(d, m));
  out.csv = std::move(csv);
  return out;
}

void add_msd_flags(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.k, "k of the k-NN input graph")->capture_default_str();
  sub->add_option("--subset", o.subset, "all|val|test|sample")->capture_default_str();
  sub->add_option("--sample-size", o.sample_size, "nodes drawn in sample mode")->capture_default_str();
  sub->add_option("--epsilon-rel", o.epsilon_rel, "relative ridge on L_Z")->capture_default_str();
  sub->add_option("--manifold", o.manifold, "knn|rbf")->capture_default_str();
  sub->add_option("--bandwidth", o.bandwidth, "RBF bandwidth (default: median edge distance)");
  sub->add_option("--solver", o.solver, "dense-auto|dense|iterative")->capture_default_str();
  sub->add_option("--tol", o.tol, "power iteration tolerance")->capture_default_str();
  sub->add_option("--max-iter", o.max_iter, "power iteration limit")->capture_default_str();
  sub->add_option("--dense-cap", o.dense_cap, "dense-auto threshold on subset size")->capture_default_str();
  sub->add_flag("--ahat-plain", o.ahat_plain, "A_hat = D^-1/2 A D^-1/2 (no self-loops)");
}

void add_train_flags(CLI::App* sub, Options& o) {
  sub->add_option("--hidden", o.hidden, "hidden width")->capture_default_str();
  sub->add_option("--epochs", o.epochs, "maximum epochs")->capture_default_str();
  sub->add_option("--patience", o.patience, "early-stopping patience")->capture_default_str();
  sub->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--weight-decay", o.weight_decay, "L2 on raw weights")->capture_default_str();
  sub->add_option("--bjorck-iters", o.bjorck_iters, "Björck iterations")->capture_default_str();
  sub->add_option("--seeds", o.seeds, "number of training seeds (seed, seed+1, ...)")->capture_default_str();
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--bundle", o.bundle, "bundle directory");
  sub->add_option("--seed", o.seed, "seed")->capture_default_str();
  sub->add_option("--out", o.out_path, "also write the JSON report here");
  sub->add_option("--csv", o.csv_path, "write a CSV table here");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool err_is_tty) {
  Options o;
  CLI::App app{"Training-free graph shift operator selection by maximum spectral distortion",
               "gsosel"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "validate a bundle directory and report diagnostics");
  add_common(ingest, o);
  ingest->add_option("--save", o.save_dir, "write the canonical bundle to this directory");
  ingest->add_flag("--f32", o.f32, "write features as features.f32");

  auto* synth = app.add_subcommand("synth-sbm", "generate a stochastic block model bundle");
  add_common(synth, o);
  synth->add_option("--n", o.sbm.n, "nodes")->capture_default_str();
  synth->add_option("--c", o.sbm.c, "blocks / classes")->capture_default_str();
  synth->add_option("--p-in", o.sbm.p_in, "intra-block edge probability")->capture_default_str();
  synth->add_option("--p-out", o.sbm.p_out, "inter-block edge probability")->capture_default_str();
  synth->add_flag("--heterophilic", o.sbm.heterophilic, "allow p_out > p_in");
  synth->add_option("--d", o.sbm.d, "feature dimension")->capture_default_str();
  synth->add_option("--features", o.feature_mode, "gaussian|onehot")->capture_default_str();
  synth->add_option("--mean-sep", o.sbm.mean_separation, "class mean separation")->capture_default_str();
  synth->add_option("--stddev", o.sbm.stddev, "feature noise")->capture_default_str();
  synth->add_option("--flip", o.sbm.flip_probability, "one-hot flip probability")->capture_default_str();
  synth->add_option("--train-frac", o.sbm.train_fraction, "train fraction")->capture_default_str();
  synth->add_option("--val-frac", o.sbm.val_fraction, "val fraction")->capture_default_str();
  synth->add_option("--name", o.sbm.name, "bundle name")->capture_default_str();
  synth->add_flag("--f32", o.f32, "write features as features.f32");

  auto* msd = app.add_subcommand("msd", "MSD and alignment gain of one GSO");
  add_common(msd, o);
  add_msd_flags(msd, o);
  msd->add_option("--gso", o.gso, "GSO kind or 'identity'");

  auto* rank = app.add_subcommand("rank", "rank the GSO library by MSD");
  add_common(rank, o);
  add_msd_flags(rank, o);
  rank->add_option("--gsos", o.gsos, "comma-separated kinds (default: all seven)");

  auto* correlate = app.add_subcommand("correlate", "MSD vs. single-layer test accuracy");
  add_common(correlate, o);
  add_msd_flags(correlate, o);
  add_train_flags(correlate, o);
  correlate->add_option("--gsos", o.gsos, "comma-separated kinds (default: all seven)");

  auto* select = app.add_subcommand("select", "layer-wise MSD selection and training (MSD-O)");
  add_common(select, o);
  add_msd_flags(select, o);
  add_train_flags(select, o);
  select->add_option("--layers", o.layers, "number of layers")->capture_default_str();
  select->add_option("--gsos", o.gsos, "comma-separated kinds (default: all seven)");

  auto* perturb = app.add_subcommand("perturb", "stability of the MSD under GSO perturbations");
  add_common(perturb, o);
  add_msd_flags(perturb, o);
  perturb->add_option("--gso", o.gso, "GSO kind");
  perturb->add_option("--deltas", o.deltas, "perturbation sizes ‖E‖₂")->delimiter(',');
  perturb->add_option("--trials", o.trials, "trials per delta")->capture_default_str();

  auto* init = app.add_subcommand("init-select", "argmin-MSD GSO on raw features");
  add_common(init, o);
  add_msd_flags(init, o);
  init->add_option("--gsos", o.gsos, "comma-separated kinds (default: all seven)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    const auto start = std::chrono::steady_clock::now();
    Output result;
    if (chosen == ingest) result = cmd_ingest(o, err);
    else if (chosen == synth) result = cmd_synth_sbm(o);
    else if (chosen == msd) result = cmd_msd(o, err);
    else if (chosen == rank) result = cmd_rank(o, err);
    else if (chosen == correlate) result = cmd_correlate(o, err);
    else if (chosen == select) result = cmd_select(o, err);
    else if (chosen == perturb) result = cmd_perturb(o, err);
    else result = cmd_init_select(o, err);

    json report;
    report["command"] = command;
    report["config"] = config_echo(command, o);
    report["results"] = std::move(result.results);
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const std::string text = report.dump(2);
    out << text << '\n';
    if (!o.out_path.empty()) {
      std::ofstream f(o.out_path);
      if (!f) throw InputError("cannot write " + o.out_path);
      f << text << '\n';
    }
    if (result.csv) {
      if (!o.csv_path.empty()) result.csv->write(o.csv_path);
      if (err_is_tty) print_table(err, *result.csv);
    } else if (!o.csv_path.empty()) {
      Csv empty({"command"});
      empty.row({command});
      empty.write(o.csv_path);
    }
    return kOk;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace gsosel::cli
