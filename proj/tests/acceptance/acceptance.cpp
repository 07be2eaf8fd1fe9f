// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "avgraph/avgraph.hpp"
#include "../fd_check.hpp"
#include "../op_fd_suite.hpp"

using namespace avgraph;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

Series random_series(Rng& rng, std::size_t n, bool integer_valued) {
  std::vector<double> v(n);
  for (auto& x : v) x = integer_valued ? static_cast<double>(rng.below(8)) : rng.normal();
  return Series(std::move(v));
}

std::set<std::pair<int, int>> edge_set(const VisGraph& g) {
  std::set<std::pair<int, int>> s;
  for (const auto& e : g.edges()) s.insert({static_cast<int>(e.u), static_cast<int>(e.v)});
  return s;
}

// the seeded corpus shared by criteria 1 and 2
Series corpus_series(std::uint64_t seed, int index) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
  const std::size_t n = 2 + rng.below(255);  // lengths 2..256
  return random_series(rng, n, index % 4 == 0);
}

// ---- criteria ----

bool criterion1(std::string& detail) {
  const auto start = clock_type::now();
  for (int i = 0; i < 1000; ++i) {
    const Series s = corpus_series(0xC1, i);
    if (!(vg_fast(s) == vg_naive(s))) {
      detail = "mismatch on series " + std::to_string(i);
      return false;
    }
  }
  const double elapsed = seconds_since(start);
  detail = "1000 series equal in " + std::to_string(elapsed) + " s";
  return elapsed < 30.0;
}

bool criterion2(std::string& detail) {
  Rng affine_rng(0xC2);
  for (int i = 0; i < 1000; ++i) {
    const Series s = corpus_series(0xC1, i);
    const auto h = edge_set(hvg(s));
    const VisGraph vg = vg_naive(s);
    const auto v = edge_set(vg);
    const auto l1 = edge_set(lpvg(s, 1));

    for (const auto& e : h)
      if (!v.count(e)) {
        detail = "HVG edge outside VG on series " + std::to_string(i);
        return false;
      }
    for (const auto& e : v)
      if (!l1.count(e)) {
        detail = "VG edge outside LPVG(1) on series " + std::to_string(i);
        return false;
      }
    if (!(lpvg(s, 0) == vg)) {
      detail = "LPVG(0) != VG on series " + std::to_string(i);
      return false;
    }

    // The affine probe runs on continuous-valued series: exact collinear
    // ties (common in integer data) sit on the strict-rule boundary, where
    // rescaling legitimately flips the floating-point comparison.
    Rng crng(mix_seed(0xC2AF, static_cast<std::uint64_t>(i)));
    const Series sc = random_series(crng, 2 + crng.below(255), false);
    const auto vc = edge_set(vg_naive(sc));
    const auto hc = edge_set(hvg(sc));
    const auto lc = edge_set(lpvg(sc, 1));
    const double a = 0.1 + 4.0 * affine_rng.uniform();
    const double b = affine_rng.normal(0.0, 5.0);
    std::vector<double> mapped(sc.size());
    for (std::size_t k = 0; k < sc.size(); ++k) mapped[k] = a * sc[k] + b;
    const Series s2(mapped);
    if (edge_set(vg_naive(s2)) != vc || edge_set(hvg(s2)) != hc ||
        edge_set(lpvg(s2, 1)) != lc) {
      detail = "affine map changed an edge set on series " + std::to_string(i);
      return false;
    }
  }
  detail = "containment, LPVG(0) identity, affine invariance on 1000 series";
  return true;
}

bool criterion3(std::string& detail) {
  Rng rng(0xC3);
  int checked = 0;
  for (int m : {2, 5, 11}) {
    for (std::size_t n : {std::size_t{16}, std::size_t{128}}) {
      for (int rep = 0; rep < 3; ++rep) {
        const ConvBank bank = init_bank(m, rng.next_u64());
        const Matrix dense = avg_forward(random_series(rng, n, false), bank).densify();
        for (std::size_t i = 0; i < n; ++i) {
          if (dense(i, i) != 0.0) {
            detail = "nonzero diagonal";
            return false;
          }
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t dist = i > j ? i - j : j - i;
            if (dense(i, j) != dense(j, i)) {
              detail = "asymmetry";
              return false;
            }
            if (dense(i, j) < 0.0) {
              detail = "negative entry";
              return false;
            }
            if (dist >= static_cast<std::size_t>(m) && dense(i, j) != 0.0) {
              detail = "entry outside band m-1";
              return false;
            }
          }
        }
        ++checked;
      }
    }
  }
  detail = std::to_string(checked) + " bank/series combinations over m in {2,5,11}, n in {16,128}";
  return true;
}

bool criterion4(std::string& detail) {
  double worst_op = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    for (const auto& c : fd::run_op_fd_checks(seed)) {
      worst_op = std::max(worst_op, c.error);
      if (c.error >= 1e-4) {
        detail = "op " + c.name + " error " + std::to_string(c.error) + " at seed " +
                 std::to_string(seed);
        return false;
      }
    }
  }

  // full pipeline: loss through both branches and banks, n=32, m=4, h=8, c=4
  NetConfig cfg;
  cfg.span_m = 4;
  cfg.hidden = 8;
  cfg.clusters = 4;
  cfg.classes = 3;
  double worst_e2e = 0.0;
  const Modulation mods[] = {Modulation::Bpsk, Modulation::Qpsk, Modulation::Gfsk,
                             Modulation::Qam16, Modulation::AmDsb};
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    AvgNetParams params = make_avgnet(cfg, seed);
    const IQFrame frame = generate_synthetic(mods[seed % 5], 8, 32, seed);
    const int label = static_cast<int>(seed % 3);

    ParamStore store(param_refs(params));
    std::vector<Matrix> analytic = zero_grads(store);
    sample_loss_and_gradients(frame, label, params, analytic);

    auto eval = [&] {
      Tape t;
      const NetVals vals = bind_net(t, params);
      const SampleForward fw = tape_avgnet_sample(t, frame, params, vals);
      return t.value(tape_sample_loss(t, fw, label, params.config))(0, 0);
    };
    const double step = 1e-5;
    for (std::size_t i = 0; i < store.size(); ++i) {
      Matrix& p = store.value(i);
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double saved = p.data()[k];
        p.data()[k] = saved + step;
        const double fp = eval();
        p.data()[k] = saved - step;
        const double fm = eval();
        p.data()[k] = saved;
        const double numeric = (fp - fm) / (2.0 * step);
        const double err = fd::rel_err(analytic[i].data()[k], numeric);
        worst_e2e = std::max(worst_e2e, err);
        if (err >= 1e-4) {
          detail = "pipeline gradient error " + std::to_string(err) + " in " +
                   store.param(i).name + " at seed " + std::to_string(seed);
          return false;
        }
      }
    }
  }
  std::ostringstream os;
  os << "worst op error " << worst_op << ", worst pipeline error " << worst_e2e
     << " over 5 seeds each";
  detail = os.str();
  return true;
}

bool criterion5(std::string& detail) {
  Rng rng(0xC5);
  const std::size_t n = 32;
  const IQFrame frame = generate_synthetic(Modulation::Qam16, 10, n, 5);
  const ConvBank bank = init_bank(4, 5);
  const Matrix a = avg_forward(frame.i_channel(), bank).densify();
  const Matrix x = node_features(frame);

  NetConfig cfg;
  cfg.span_m = 4;
  cfg.hidden = 8;
  cfg.clusters = 4;
  cfg.classes = 2;
  const AvgNetParams params = make_avgnet(cfg, 3);
  const Matrix base = branch_forward(a, x, params.branch_i);

  double scale = 0.0;
  for (std::size_t j = 0; j < base.cols(); ++j)
    scale = std::max(scale, std::abs(base(0, j)));
  const double limit = 1e-9 * std::max(scale, 1.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    Matrix pa(n, n), px(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      px(i, 0) = x(perm[i], 0);
      px(i, 1) = x(perm[i], 1);
      for (std::size_t j = 0; j < n; ++j) pa(i, j) = a(perm[i], perm[j]);
    }
    const Matrix out = branch_forward(pa, px, params.branch_i);
    for (std::size_t j = 0; j < base.cols(); ++j)
      worst = std::max(worst, std::abs(out(0, j) - base(0, j)));
  }
  std::ostringstream os;
  os << "max deviation " << worst << " over 100 permutations (limit " << limit << ")";
  detail = os.str();
  return worst < limit;
}

bool criterion6(std::string& detail) {
  const auto start = clock_type::now();
  const Dataset ds = synth_dataset(
      {Modulation::Bpsk, Modulation::Qpsk, Modulation::Gfsk, Modulation::AmDsb}, {18}, 16,
      32, 0xC6);  // 64 frames, high SNR

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 16;
  cfg.initial_lr = 0.003;
  cfg.net.span_m = 4;
  cfg.net.hidden = 16;
  cfg.net.clusters = 8;
  cfg.seed = 6;
  const TrainResult result = train(ds, ds, cfg);

  const double train_acc = evaluate(ds, result.params).accuracy;
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "train accuracy " << train_acc << " (best epoch " << result.best_epoch << ") in "
     << elapsed << " s";
  detail = os.str();
  return train_acc >= 0.99 && elapsed < 300.0;
}

bool criterion7(std::string& detail) {
  const auto start = clock_type::now();
  std::vector<int> snrs;
  for (int s = 0; s <= 18; s += 2) snrs.push_back(s);
  const Dataset ds = synth_dataset({Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16,
                                    Modulation::Gfsk, Modulation::AmDsb},
                                   snrs, 200, 48, 0xC7);
  const auto [train_set, val_set] = split_stratified(ds, 0.8, 7);

  TrainConfig cfg;  // default configuration
  cfg.seed = 7;
  const TrainResult result = train(train_set, val_set, cfg);
  const EvalReport rep = evaluate(val_set, result.params);

  std::ostringstream os;
  os << "val accuracy " << rep.accuracy << " after " << result.log.size() << " epochs in "
     << seconds_since(start) << " s; per-SNR:";
  bool monotone = true;
  double prev = -1.0;
  for (const auto& [snr, acc] : rep.per_snr_accuracy) {
    os << " " << snr << "dB=" << acc;
    if (prev >= 0.0 && acc < prev - 0.05) monotone = false;
    prev = acc;
  }
  detail = os.str();
  return rep.accuracy >= 0.90 && monotone;
}

bool criterion8(std::string& detail) {
  TrainConfig cfg;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
  if (!close(lr_at(0, cfg), 0.001) || !close(lr_at(10, cfg), 0.0008) ||
      !close(lr_at(20, cfg), 0.00064)) {
    detail = "schedule mismatch";
    return false;
  }

  std::vector<std::string> names;
  for (int c = 0; c < 11; ++c) names.push_back("C" + std::to_string(c));
  Dataset shell(names, 2);
  const Series zero({0.0, 0.0});
  for (int c = 0; c < 11; ++c)
    for (int snr = -20; snr <= 18; snr += 2)
      for (int k = 0; k < 1000; ++k) shell.add({IQFrame(zero, zero), c, snr});
  const auto [train_set, test_set] = split_stratified(shell, 0.8, 2016);
  std::ostringstream os;
  os << "lr 0.001/0.0008/0.00064 at epochs 0/10/20; split 220000 -> "
     << train_set.size() << "/" << test_set.size();
  detail = os.str();
  return train_set.size() == 176000 && test_set.size() == 44000;
}

bool criterion9(std::string& detail) {
  const std::size_t n = 8192;
  double naive_total = 0.0, fast_total = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng(mix_seed(0xC9, static_cast<std::uint64_t>(trial)));
    const Series s = random_series(rng, n, false);

    auto t0 = clock_type::now();
    const VisGraph naive = vg_naive(s);
    auto t1 = clock_type::now();
    const VisGraph fast = vg_fast(s);
    auto t2 = clock_type::now();
    if (!(naive == fast)) {
      detail = "fast/naive mismatch at n=8192";
      return false;
    }
    naive_total += std::chrono::duration<double>(t1 - t0).count();
    fast_total += std::chrono::duration<double>(t2 - t1).count();
  }
  const double speedup = naive_total / fast_total;
  std::ostringstream os;
  os << "naive " << naive_total / 5 << " s, fast " << fast_total / 5 << " s, speedup "
     << speedup << "x";
  detail = os.str();
  return speedup >= 10.0;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "vg_fast equals vg_naive on 1000 random series (lengths 2-256, < 30 s)",
       criterion1},
      {2, "HVG within VG within LPVG(1); LPVG(0) == VG; affine invariance", criterion2},
      {3, "AVG output is symmetric, zero-diagonal, non-negative, banded", criterion3},
      {4, "op and full-pipeline gradients match finite differences (< 1e-4)", criterion4},
      {5, "branch_forward permutation invariance (< 1e-9 over 100 permutations)",
       criterion5},
      {6, "overfit oracle: 64 frames to >= 99% train accuracy within 200 epochs",
       criterion6},
      {7, "desk-scale learning: >= 90% validation accuracy within 30 epochs", criterion7},
      {8, "lr schedule values and 176000/44000 stratified split", criterion8},
      {9, "vg_fast at least 10x faster than vg_naive at n = 8192", criterion9},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title
              << " -- " << detail << "\n"
              << std::flush;
  }
  std::cout << "[INFO] criterion 10: paper-scale accuracy targets (62.93% / 64.58% on the "
               "RML sets) are out of desk-scale scope; criteria 1-9 gate this build. "
               "Supplying converted full datasets enables a non-gating extended run via "
               "the train/eval commands.\n";
  return failures == 0 ? 0 : 1;
}
