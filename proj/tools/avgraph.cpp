// Command-line front end: dataset synthesis, series-to-graph mapping and
// export, AVGNet training/evaluation, and the naive-vs-fast mapping benchmark.
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 invalid argument or
// domain error, 4 malformed file (bad magic/version/truncation/label).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "avgraph/avgraph.hpp"

namespace {

using namespace avgraph;
namespace fs = std::filesystem;

std::vector<int> parse_snr_range(const std::string& spec) {
  // "lo..hi:step", inclusive, integers
  const auto dots = spec.find("..");
  const auto colon = spec.find(':', dots == std::string::npos ? 0 : dots + 2);
  if (dots == std::string::npos || colon == std::string::npos)
    throw std::invalid_argument("bad SNR range \"" + spec + "\", expected lo..hi:step");
  int lo = 0, hi = 0, step = 0;
  try {
    lo = std::stoi(spec.substr(0, dots));
    hi = std::stoi(spec.substr(dots + 2, colon - dots - 2));
    step = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad SNR range \"" + spec + "\", expected lo..hi:step");
  }
  if (step <= 0) throw std::invalid_argument("SNR range step must be positive");
  if (lo > hi) throw std::invalid_argument("SNR range low end exceeds high end");
  std::vector<int> out;
  for (int s = lo; s <= hi; s += step) out.push_back(s);
  return out;
}

std::vector<Modulation> parse_class_list(const std::string& csv) {
  std::vector<Modulation> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto mod = parse_modulation(item);
    if (!mod) throw std::invalid_argument("unknown modulation class \"" + item + "\"");
    out.push_back(*mod);
  }
  if (out.empty()) throw std::invalid_argument("empty class list");
  return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad ") + what + " value \"" + item + "\"");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
  return out;
}

Series read_series_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open series file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;  // blank line
    const auto end = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(begin, end - begin + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size())
      throw std::invalid_argument("non-numeric input at line " + std::to_string(line_no) +
                                  ": \"" + token + "\"");
    values.push_back(v);
  }
  if (values.size() < 2)
    throw std::invalid_argument("series file needs at least 2 samples, got " +
                                std::to_string(values.size()));
  return Series(std::move(values));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  return os;
}

// ---- synth ----

struct SynthArgs {
  std::string classes = "BPSK,QPSK,PSK8,QAM16,PAM4,GFSK,CPFSK,AMDSB,WBFM";
  std::string snrs = "-20..18:2";
  std::size_t per_cell = 100;
  std::size_t length = 128;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const Dataset ds = synth_dataset(parse_class_list(a.classes), parse_snr_range(a.snrs),
                                   a.per_cell, a.length, a.seed);
  write_dataset(ds, fs::path(a.out));
  std::cout << "wrote " << ds.size() << " frames (" << ds.class_count() << " classes, length "
            << ds.frame_length() << ") to " << a.out << "\n";
  return 0;
}

// ---- map ----

struct MapArgs {
  std::string input;
  std::string method = "vg";
  int penetrable = 1;
  int span_m = 11;
  std::string bank;
  std::string channel = "i";
  std::uint64_t seed = 0;
  std::string format = "edgelist";
  std::string out;
};

int run_map(const MapArgs& a) {
  const Series series = read_series_file(a.input);
  const GraphFormat format = parse_graph_format(a.format);
  std::ofstream os = open_out(a.out);

  auto emit_graph = [&](const VisGraph& g) {
    switch (format) {
      case GraphFormat::EdgeList: write_edge_list(g, os); break;
      case GraphFormat::Dot: write_dot(g, os); break;
      case GraphFormat::Csv: write_adjacency_csv(g, os); break;
    }
  };

  if (a.method == "vg") {
    emit_graph(vg_naive(series));
  } else if (a.method == "vg-fast") {
    emit_graph(vg_fast(series));
  } else if (a.method == "hvg") {
    emit_graph(hvg(series));
  } else if (a.method == "lpvg") {
    emit_graph(lpvg(series, a.penetrable));
  } else if (a.method == "avg") {
    BandedMatrix band = [&] {
      if (!a.bank.empty()) {
        const AvgNetParams params = avgnet_from_checkpoint(fs::path(a.bank));
        const ConvBank& bank =
            a.channel == "q" ? params.bank_for_q() : params.bank_for_i();
        return avg_forward(series, bank);
      }
      return avg_forward(series, init_bank(a.span_m, a.seed));
    }();
    switch (format) {
      case GraphFormat::EdgeList: write_edge_list(band, os); break;
      case GraphFormat::Dot: write_dot(band, os); break;
      case GraphFormat::Csv: write_adjacency_csv(band, os); break;
    }
  } else {
    throw std::invalid_argument("unknown mapping method \"" + a.method + "\"");
  }
  return 0;
}

// ---- train / sweep ----

struct TrainArgs {
  std::string data;
  std::string val;
  double train_frac = 0.8;
  std::string split_mode = "stratified";
  int epochs = 30;
  int batch_size = 128;
  double lr = 0.001;
  double lr_decay = 0.8;
  int decay_every = 10;
  std::string decay_unit = "epochs";
  int span_m = 11;
  int hidden = 64;
  int clusters = 32;
  std::uint64_t seed = 0;
  int threads = 0;
  bool aux_loss = false;
  bool share_weights = false;
  bool no_conv_bias = false;
  std::string out;
  std::string log;
};

TrainConfig to_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.initial_lr = a.lr;
  cfg.lr_decay = a.lr_decay;
  cfg.decay_every = a.decay_every;
  if (a.decay_unit == "epochs")
    cfg.decay_unit = TrainConfig::DecayUnit::Epochs;
  else if (a.decay_unit == "batches")
    cfg.decay_unit = TrainConfig::DecayUnit::Batches;
  else
    throw std::invalid_argument("decay unit must be epochs or batches");
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.net.span_m = a.span_m;
  cfg.net.hidden = a.hidden;
  cfg.net.clusters = a.clusters;
  cfg.net.aux_loss = a.aux_loss;
  cfg.net.share_weights = a.share_weights;
  cfg.net.conv_bias = !a.no_conv_bias;
  return cfg;
}

std::pair<Dataset, Dataset> load_train_val(const TrainArgs& a) {
  const Dataset full = read_dataset(fs::path(a.data));
  if (!a.val.empty()) return {full, read_dataset(fs::path(a.val))};
  if (a.split_mode == "stratified") return split_stratified(full, a.train_frac, a.seed);
  if (a.split_mode == "random") return split_random(full, a.train_frac, a.seed);
  throw std::invalid_argument("split mode must be stratified or random");
}

int run_train(const TrainArgs& a) {
  const auto [train_set, val_set] = load_train_val(a);
  const TrainConfig cfg = to_config(a);
  std::cout << "training on " << train_set.size() << " frames, validating on "
            << val_set.size() << "\n";

  TrainResult result = train(train_set, val_set, cfg);
  for (const auto& e : result.log)
    std::cout << "epoch " << e.epoch << ": loss " << e.train_loss << ", val accuracy "
              << e.val_accuracy << ", lr " << e.lr << "\n";
  std::cout << "best val accuracy " << result.best_val_accuracy << " at epoch "
            << result.best_epoch << "\n";

  const std::size_t bytes = param_bytes(result.params);
  std::cout << "parameter size: " << bytes << " bytes ("
            << static_cast<double>(bytes) / (1024.0 * 1024.0) << " MB)\n";

  ParamStore store = bind_result(result);
  save_checkpoint(store, fs::path(a.out));
  std::cout << "checkpoint written to " << a.out << "\n";
  if (!a.log.empty()) {
    std::ofstream os = open_out(a.log);
    write_metrics_csv(result.log, os);
  }
  return 0;
}

struct SweepArgs {
  TrainArgs base;
  std::string m_values = "3,7,11";
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  const std::vector<int> spans = parse_int_list(a.m_values, "m");
  std::ofstream os = open_out(a.out);
  os << "m,val_accuracy\n";
  for (int m : spans) {
    TrainArgs args = a.base;
    args.span_m = m;
    const auto [train_set, val_set] = load_train_val(args);
    const TrainResult result = train(train_set, val_set, to_config(args));
    std::cout << "m=" << m << ": best val accuracy " << result.best_val_accuracy << "\n";
    os << m << "," << result.best_val_accuracy << "\n";
  }
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string data;
  std::string checkpoint;
  std::string report;
  std::string per_snr;
  std::string confusion;
  int threads = 0;
};

int run_eval(const EvalArgs& a) {
  const Dataset ds = read_dataset(fs::path(a.data));
  AvgNetParams params = avgnet_from_checkpoint(fs::path(a.checkpoint));
  const EvalReport rep = evaluate(ds, params, a.threads);

  std::cout << "accuracy " << rep.accuracy << ", f1_macro " << rep.f1_macro
            << ", f1_weighted " << rep.f1_weighted << ", recall_macro " << rep.recall_macro
            << "\n";
  const std::size_t bytes = param_bytes(params);
  std::cout << "parameter size: " << bytes << " bytes ("
            << static_cast<double>(bytes) / (1024.0 * 1024.0) << " MB)\n";

  if (!a.report.empty()) {
    std::ofstream os = open_out(a.report);
    write_report_csv(rep, ds, os);
  }
  if (!a.per_snr.empty()) {
    std::ofstream os = open_out(a.per_snr);
    write_per_snr_csv(rep, os);
  }
  if (!a.confusion.empty()) {
    std::ofstream os = open_out(a.confusion);
    write_confusion_csv(rep, ds, os);
  }
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::size_t n = 8192;
  int trials = 5;
  std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a) {
  if (a.n < 2) throw std::invalid_argument("bench needs n >= 2");
  if (a.trials < 1) throw std::invalid_argument("bench needs at least one trial");
  using clock = std::chrono::steady_clock;

  double naive_total = 0.0, fast_total = 0.0;
  for (int trial = 0; trial < a.trials; ++trial) {
    Rng rng(mix_seed(a.seed, static_cast<std::uint64_t>(trial)));
    std::vector<double> values(a.n);
    for (auto& v : values) v = rng.normal();
    const Series series(values);

    const auto t0 = clock::now();
    const VisGraph naive = vg_naive(series);
    const auto t1 = clock::now();
    const VisGraph fast = vg_fast(series);
    const auto t2 = clock::now();

    naive_total += std::chrono::duration<double>(t1 - t0).count();
    fast_total += std::chrono::duration<double>(t2 - t1).count();
    std::cout << "trial " << trial << ": naive edges " << naive.edge_count()
              << ", fast edges " << fast.edge_count()
              << (naive == fast ? " (equal)" : " (MISMATCH)") << "\n";
  }
  const double naive_mean = naive_total / a.trials;
  const double fast_mean = fast_total / a.trials;
  std::cout << "n=" << a.n << " trials=" << a.trials << "\n"
            << "vg_naive mean " << naive_mean << " s\n"
            << "vg_fast  mean " << fast_mean << " s\n"
            << "speedup " << naive_mean / fast_mean << "x\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avgraph: visibility-graph mappings and the AVGNet classifier"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic modulation dataset");
  synth->add_option("--classes", synth_args.classes, "comma-separated modulation names");
  synth->add_option("--snrs", synth_args.snrs, "SNR range lo..hi:step in dB");
  synth->add_option("--per-cell", synth_args.per_cell, "frames per (class, snr) cell");
  synth->add_option("--len", synth_args.length, "frame length in samples");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--out", synth_args.out, "output dataset path")->required();

  MapArgs map_args;
  CLI::App* map = app.add_subcommand("map", "map a series file to a graph");
  map->add_option("--input", map_args.input, "text file, one sample per line")->required();
  map->add_option("--method", map_args.method, "vg|vg-fast|hvg|lpvg|avg");
  map->add_option("--L", map_args.penetrable, "penetrable limit for lpvg");
  map->add_option("--m", map_args.span_m, "kernel span for avg");
  map->add_option("--bank", map_args.bank, "checkpoint providing the conv bank");
  map->add_option("--channel", map_args.channel, "bank channel from checkpoint: i|q");
  map->add_option("--seed", map_args.seed, "random bank seed when no checkpoint given");
  map->add_option("--format", map_args.format, "edgelist|dot|csv");
  map->add_option("--out", map_args.out, "output path")->required();

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train AVGNet on a dataset");
  auto add_train_flags = [](CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--data", a.data, "dataset container path")->required();
    cmd->add_option("--val", a.val, "separate validation dataset (skips splitting)");
    cmd->add_option("--train-frac", a.train_frac, "train fraction when splitting");
    cmd->add_option("--split", a.split_mode, "stratified|random");
    cmd->add_option("--epochs", a.epochs, "training epochs");
    cmd->add_option("--batch-size", a.batch_size, "mini-batch size");
    cmd->add_option("--lr", a.lr, "initial learning rate");
    cmd->add_option("--lr-decay", a.lr_decay, "decay factor per interval");
    cmd->add_option("--decay-every", a.decay_every, "decay interval length");
    cmd->add_option("--decay-unit", a.decay_unit, "epochs|batches");
    cmd->add_option("--m", a.span_m, "conv kernel span");
    cmd->add_option("--hidden", a.hidden, "GCN hidden width");
    cmd->add_option("--clusters", a.clusters, "pooled cluster count");
    cmd->add_option("--seed", a.seed, "run seed");
    cmd->add_option("--threads", a.threads, "worker cap (0: AVGRAPH_THREADS or hardware)");
    cmd->add_flag("--aux-loss", a.aux_loss, "enable DiffPool auxiliary losses");
    cmd->add_flag("--share-weights", a.share_weights, "share bank/branch across I and Q");
    cmd->add_flag("--no-conv-bias", a.no_conv_bias, "drop the conv bank bias terms");
  };
  add_train_flags(train_cmd, train_args);
  train_cmd->add_option("--out", train_args.out, "checkpoint output path")->required();
  train_cmd->add_option("--log", train_args.log, "per-epoch metrics CSV path");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep-m", "train across kernel spans");
  add_train_flags(sweep, sweep_args.base);
  sweep->add_option("--m-values", sweep_args.m_values, "comma-separated spans to sweep");
  sweep->add_option("--out", sweep_args.out, "CSV output path (m, val_accuracy)")->required();

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--data", eval_args.data, "dataset container path")->required();
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint path")->required();
  eval_cmd->add_option("--report", eval_args.report, "overall metrics CSV path");
  eval_cmd->add_option("--per-snr", eval_args.per_snr, "per-SNR accuracy CSV path");
  eval_cmd->add_option("--confusion", eval_args.confusion, "confusion matrix CSV path");
  eval_cmd->add_option("--threads", eval_args.threads, "worker cap");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "time vg_naive against vg_fast");
  bench->add_option("--n", bench_args.n, "series length");
  bench->add_option("--trials", bench_args.trials, "number of random series");
  bench->add_option("--seed", bench_args.seed, "series seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(synth)) return run_synth(synth_args);
    if (app.got_subcommand(map)) return run_map(map_args);
    if (app.got_subcommand(train_cmd)) return run_train(train_args);
    if (app.got_subcommand(sweep)) return run_sweep(sweep_args);
    if (app.got_subcommand(eval_cmd)) return run_eval(eval_args);
    if (app.got_subcommand(bench)) return run_bench(bench_args);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
