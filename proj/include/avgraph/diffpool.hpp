#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "avgraph/avg.hpp"
#include "avgraph/adam.hpp"
#include "avgraph/checkpoint.hpp"
#include "avgraph/matrix.hpp"
#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"
#include "avgraph/tape.hpp"

namespace avgraph {

/// Architecture and training-behavior switches for the full network.
struct NetConfig {
  int span_m = 11;      // conv kernel length cap; band width is span_m - 1
  int hidden = 64;      // GCN feature width h
  int clusters = 32;    // pooled node count c
  int classes = 11;     // output logits M
  bool share_weights = false;  // one bank + branch for both channels
  bool conv_bias = true;
  bool aux_loss = false;  // DiffPool link-prediction + assignment-entropy terms
  double aux_link_weight = 1.0;
  double aux_entropy_weight = 1.0;
};

/// One channel's pooling pipeline: embedding stack, cluster-assignment stack,
/// post-pool stack. Stored as plain weight matrices (bias-free GCN layers).
struct BranchParams {
  std::vector<Matrix> embed;  // [in -> h, h -> h]
  std::vector<Matrix> pool;   // [in -> h, h -> c]
  std::vector<Matrix> post;   // [h -> h]
};

/// Full trainable parameter collection for AVGNet.
struct AvgNetParams {
  NetConfig config;
  ConvBank bank_i, bank_q;
  BranchParams branch_i, branch_q;
  Matrix head_w;  // 2h x M
  Matrix head_b;  // 1 x M

  const ConvBank& bank_for_i() const { return bank_i; }
  const ConvBank& bank_for_q() const { return config.share_weights ? bank_i : bank_q; }
  const BranchParams& branch_for_i() const { return branch_i; }
  const BranchParams& branch_for_q() const {
    return config.share_weights ? branch_i : branch_q;
  }
};

namespace detail {

inline Matrix init_weight(std::size_t in, std::size_t out, Rng& rng) {
  Matrix w(in, out);
  const double bound = std::sqrt(1.0 / static_cast<double>(in));
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
  return w;
}

inline BranchParams init_branch(const NetConfig& cfg, Rng& rng) {
  const auto h = static_cast<std::size_t>(cfg.hidden);
  const auto c = static_cast<std::size_t>(cfg.clusters);
  BranchParams b;
  b.embed.push_back(init_weight(2, h, rng));
  b.embed.push_back(init_weight(h, h, rng));
  b.pool.push_back(init_weight(2, h, rng));
  b.pool.push_back(init_weight(h, c, rng));
  b.post.push_back(init_weight(h, h, rng));
  return b;
}

}  // namespace detail

inline AvgNetParams make_avgnet(const NetConfig& cfg, std::uint64_t seed) {
  if (cfg.span_m < 2) throw std::invalid_argument("make_avgnet: span m must be >= 2");
  if (cfg.hidden < 1 || cfg.clusters < 1 || cfg.classes < 2)
    throw std::invalid_argument("make_avgnet: bad architecture sizes");

  Rng rng(mix_seed(seed, 0x4e'45'54ULL));
  ConvBank bank_i = init_bank(cfg.span_m, mix_seed(seed, 1), cfg.conv_bias);
  ConvBank bank_q = init_bank(cfg.span_m, mix_seed(seed, 2), cfg.conv_bias);
  BranchParams branch_i = detail::init_branch(cfg, rng);
  BranchParams branch_q = detail::init_branch(cfg, rng);
  Matrix head_w = detail::init_weight(2 * static_cast<std::size_t>(cfg.hidden),
                                      static_cast<std::size_t>(cfg.classes), rng);
  Matrix head_b(1, static_cast<std::size_t>(cfg.classes));
  return AvgNetParams{cfg,
                      std::move(bank_i),
                      std::move(bank_q),
                      std::move(branch_i),
                      std::move(branch_q),
                      std::move(head_w),
                      std::move(head_b)};
}

// Canonical parameter order: banks, branches, head. Checkpoints, gradients
// and the optimizer all follow this order; with shared weights the _q entries
// simply do not exist.
inline std::vector<ParamRef> param_refs(AvgNetParams& p) {
  std::vector<ParamRef> refs;
  auto add_bank = [&](const char* prefix, ConvBank& bank) {
    for (int s = 2; s <= bank.span(); ++s) {
      const std::string base = std::string(prefix) + "/conv" + std::to_string(s);
      refs.push_back({base + "/w", &bank.weight(s)});
      refs.push_back({base + "/b", &bank.bias(s)});
    }
  };
  auto add_branch = [&](const char* prefix, BranchParams& b) {
    for (std::size_t k = 0; k < b.embed.size(); ++k)
      refs.push_back({std::string(prefix) + "/embed" + std::to_string(k) + "/W", &b.embed[k]});
    for (std::size_t k = 0; k < b.pool.size(); ++k)
      refs.push_back({std::string(prefix) + "/pool" + std::to_string(k) + "/W", &b.pool[k]});
    for (std::size_t k = 0; k < b.post.size(); ++k)
      refs.push_back({std::string(prefix) + "/post" + std::to_string(k) + "/W", &b.post[k]});
  };

  add_bank("bank_i", p.bank_i);
  if (!p.config.share_weights) add_bank("bank_q", p.bank_q);
  add_branch("branch_i", p.branch_i);
  if (!p.config.share_weights) add_branch("branch_q", p.branch_q);
  refs.push_back({"head/W", &p.head_w});
  refs.push_back({"head/b", &p.head_b});
  return refs;
}

// ---- tape-level building blocks ----

/// Symmetric normalization with self-loops: D^{-1/2} (A + I) D^{-1/2}, where
/// D holds the weighted degrees of A + I. Composed from primitive tape ops so
/// gradients flow through the degrees as well as the entries.
inline Val tape_normalize_adjacency(Tape& t, Val a) {
  const Matrix& A = t.value(a);
  if (A.rows() != A.cols()) shape_fail("normalize_adjacency", A);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = i + 1; j < A.cols(); ++j)
      if (std::abs(A(i, j) - A(j, i)) > 1e-9)
        throw std::invalid_argument(
            "normalize_adjacency: asymmetry beyond 1e-9 at (" + std::to_string(i) + "," +
            std::to_string(j) + "): " + std::to_string(A(i, j)) + " vs " +
            std::to_string(A(j, i)));

  Val with_loops = t.add_identity(a);
  Val degrees = t.row_sums(with_loops);
  Val inv_sqrt = t.rsqrt(degrees);                              // n x 1
  Val outer = t.matmul(inv_sqrt, t.transpose(inv_sqrt));        // n x n
  return t.elem_mul(outer, with_loops);
}

/// One dense GCN layer: ReLU(Ahat X W), optionally linear for logits layers.
inline Val tape_gcn_layer(Tape& t, Val ahat, Val x, Val w, bool activate = true) {
  Val h = t.matmul(t.matmul(ahat, x), w);
  return activate ? t.relu(h) : h;
}

/// Tape handles for one branch's weight matrices.
struct BranchVals {
  std::vector<Val> embed, pool, post;
};

inline BranchVals bind_branch(Tape& t, const BranchParams& b) {
  BranchVals v;
  for (const auto& w : b.embed) v.embed.push_back(t.leaf(w));
  for (const auto& w : b.pool) v.pool.push_back(t.leaf(w));
  for (const auto& w : b.post) v.post.push_back(t.leaf(w));
  return v;
}

struct PoolResult {
  Val a_pooled;  // c x c
  Val x_pooled;  // c x h
  Val assign;    // n x c, rows sum to 1
};

// DiffPool stage: embeddings Z from the embed stack, soft assignment S from
// the pool stack (last layer linear, then row softmax), then the coarsened
// features S^T Z and adjacency S^T A S.
inline PoolResult tape_diffpool(Tape& t, Val a, Val x, const BranchVals& vals) {
  Val ahat = tape_normalize_adjacency(t, a);
  Val z = x;
  for (const Val& w : vals.embed) z = tape_gcn_layer(t, ahat, z, w, true);
  Val s_logits = x;
  for (std::size_t k = 0; k < vals.pool.size(); ++k)
    s_logits = tape_gcn_layer(t, ahat, s_logits, vals.pool[k], k + 1 < vals.pool.size());
  Val assign = t.row_softmax(s_logits);
  Val assign_t = t.transpose(assign);
  Val x_pooled = t.matmul(assign_t, z);
  // S^T A S is symmetric in exact arithmetic; averaging with the transpose
  // removes the floating-point drift before the next normalization
  Val coarse = t.matmul(t.matmul(assign_t, a), assign);
  Val a_pooled = t.scale(t.add(coarse, t.transpose(coarse)), 0.5);
  return {a_pooled, x_pooled, assign};
}

struct BranchForward {
  Val features;  // 1 x h readout
  Val assign;    // n x c
};

inline BranchForward tape_branch_forward(Tape& t, Val a, Val x, const BranchVals& vals) {
  PoolResult pooled = tape_diffpool(t, a, x, vals);
  Val ahat = tape_normalize_adjacency(t, pooled.a_pooled);
  Val h = pooled.x_pooled;
  for (const Val& w : vals.post) h = tape_gcn_layer(t, ahat, h, w, true);
  return {t.mean_rows(h), pooled.assign};
}

/// Tape handles for every network parameter; with shared weights the Q-side
/// handles alias the I-side ones, so fan-out sums their gradients.
struct NetVals {
  BranchVals branch_i, branch_q;
  Val head_w, head_b;
};

inline NetVals bind_net(Tape& t, const AvgNetParams& p) {
  NetVals v;
  v.branch_i = bind_branch(t, p.branch_i);
  v.branch_q = p.config.share_weights ? v.branch_i : bind_branch(t, p.branch_q);
  v.head_w = t.leaf(p.head_w);
  v.head_b = t.leaf(p.head_b);
  return v;
}

/// Node feature matrix: row j carries [I_j, Q_j] for both branches.
inline Matrix node_features(const IQFrame& frame) {
  Matrix x(frame.length(), 2);
  for (std::size_t j = 0; j < frame.length(); ++j) {
    x(j, 0) = frame.i_channel()[j];
    x(j, 1) = frame.q_channel()[j];
  }
  return x;
}

struct SampleForward {
  Val logits;              // 1 x M
  Val a_i, a_q;            // densified AVG adjacency leaves
  Val assign_i, assign_q;  // pool assignments (aux losses)
  BandedMatrix band_i, band_q;
};

// Full per-sample forward: both channels through their banks, both branch
// pipelines over the shared node features, concatenation, linear head.
inline SampleForward tape_avgnet_sample(Tape& t, const IQFrame& frame,
                                        const AvgNetParams& p, const NetVals& vals) {
  BandedMatrix band_i = avg_forward(frame.i_channel(), p.bank_for_i());
  BandedMatrix band_q = avg_forward(frame.q_channel(), p.bank_for_q());
  Val a_i = t.leaf(band_i.densify());
  Val a_q = t.leaf(band_q.densify());
  Val x = t.leaf(node_features(frame));

  BranchForward bi = tape_branch_forward(t, a_i, x, vals.branch_i);
  BranchForward bq = tape_branch_forward(t, a_q, x, vals.branch_q);
  Val joint = t.concat_cols(bi.features, bq.features);
  Val logits = t.add_bias(t.matmul(joint, vals.head_w), vals.head_b);
  return {logits, a_i, a_q, bi.assign, bq.assign, std::move(band_i), std::move(band_q)};
}

// DiffPool auxiliary objectives (off by default): link prediction
// ||A - S S^T||_F^2 / n^2 and mean assignment-row entropy.
inline Val tape_aux_losses(Tape& t, Val a, Val assign, const NetConfig& cfg) {
  const auto n = static_cast<double>(t.value(a).rows());
  Val recon = t.matmul(assign, t.transpose(assign));
  Val diff = t.sub(a, recon);
  Val link = t.scale(t.sum_all(t.elem_mul(diff, diff)), cfg.aux_link_weight / (n * n));

  Matrix eps(t.value(assign).rows(), t.value(assign).cols());
  eps.fill(1e-12);
  Val safe = t.add(assign, t.leaf(std::move(eps)));
  Val ent = t.scale(t.sum_all(t.elem_mul(assign, t.elem_log(safe))),
                    -cfg.aux_entropy_weight / n);
  return t.add(link, ent);
}

/// Scalar training loss for one sample (cross entropy plus optional aux terms).
inline Val tape_sample_loss(Tape& t, const SampleForward& fw, int label,
                            const NetConfig& cfg) {
  Val loss = t.softmax_cross_entropy(fw.logits, {label});
  if (cfg.aux_loss) {
    loss = t.add(loss, tape_aux_losses(t, fw.a_i, fw.assign_i, cfg));
    loss = t.add(loss, tape_aux_losses(t, fw.a_q, fw.assign_q, cfg));
  }
  return loss;
}

// One sample's loss plus its gradient contribution for every parameter,
// accumulated into `grads` in param_refs order. The dense tape covers the
// GNN half; the banded AVG backward picks up where the adjacency leaves stop.
inline double sample_loss_and_gradients(const IQFrame& frame, int label,
                                        const AvgNetParams& params,
                                        std::vector<Matrix>& grads) {
  Tape t;
  NetVals vals = bind_net(t, params);
  SampleForward fw = tape_avgnet_sample(t, frame, params, vals);
  Val loss = tape_sample_loss(t, fw, label, params.config);
  t.backward(loss);

  const int m = params.config.span_m;
  ConvBankGrads bank_grads_i =
      avg_backward(frame.i_channel(), params.bank_for_i(),
                   band_from_dense(t.grad(fw.a_i), m));
  ConvBankGrads bank_grads_q =
      avg_backward(frame.q_channel(), params.bank_for_q(),
                   band_from_dense(t.grad(fw.a_q), m));

  std::size_t idx = 0;
  auto put = [&](const Matrix& g) {
    if (idx >= grads.size())
      throw std::logic_error("sample_loss_and_gradients: gradient list too short");
    if (g.size() != 0) add_into(grads[idx], g);
    ++idx;
  };
  auto put_bank = [&](const ConvBankGrads& g) {
    for (int s = 2; s <= m; ++s) {
      put(g.weights[s - 2]);
      put(g.biases[s - 2]);
    }
  };
  auto put_bank_pair = [&](const ConvBankGrads& a, const ConvBankGrads& b) {
    for (int s = 2; s <= m; ++s) {
      Matrix w = a.weights[s - 2];
      add_into(w, b.weights[s - 2]);
      put(w);
      Matrix bias = a.biases[s - 2];
      add_into(bias, b.biases[s - 2]);
      put(bias);
    }
  };
  auto put_branch = [&](const BranchVals& bv) {
    for (const Val& v : bv.embed) put(t.grad(v));
    for (const Val& v : bv.pool) put(t.grad(v));
    for (const Val& v : bv.post) put(t.grad(v));
  };

  if (params.config.share_weights) {
    put_bank_pair(bank_grads_i, bank_grads_q);  // both channels drive one bank
    put_branch(vals.branch_i);
  } else {
    put_bank(bank_grads_i);
    put_bank(bank_grads_q);
    put_branch(vals.branch_i);
    put_branch(vals.branch_q);
  }
  put(t.grad(vals.head_w));
  put(t.grad(vals.head_b));
  if (idx != grads.size())
    throw std::logic_error("sample_loss_and_gradients: gradient list mismatch");

  return t.value(loss)(0, 0);
}

// ---- eager wrappers (scratch tape per call) ----

inline Matrix normalize_adjacency(const Matrix& a) {
  Tape t;
  return t.value(tape_normalize_adjacency(t, t.leaf(a)));
}

inline Matrix gcn_layer(const Matrix& ahat, const Matrix& x, const Matrix& w) {
  Tape t;
  return t.value(tape_gcn_layer(t, t.leaf(ahat), t.leaf(x), t.leaf(w), true));
}

inline std::pair<Matrix, Matrix> diffpool_layer(const Matrix& a, const Matrix& x,
                                                const BranchParams& branch) {
  Tape t;
  PoolResult r = tape_diffpool(t, t.leaf(a), t.leaf(x), bind_branch(t, branch));
  return {t.value(r.a_pooled), t.value(r.x_pooled)};
}

inline Matrix branch_forward(const Matrix& a_dense, const Matrix& features,
                             const BranchParams& branch) {
  Tape t;
  BranchForward r =
      tape_branch_forward(t, t.leaf(a_dense), t.leaf(features), bind_branch(t, branch));
  return t.value(r.features);
}

inline Matrix avgnet_forward(const IQFrame& frame, const AvgNetParams& params) {
  Tape t;
  NetVals vals = bind_net(t, params);
  return t.value(tape_avgnet_sample(t, frame, params, vals).logits);
}

/// Serialized parameter footprint in bytes (f32 on disk).
inline std::size_t param_bytes(AvgNetParams& params) {
  std::size_t n = 0;
  for (const auto& ref : param_refs(params)) n += ref.value->size() * 4;
  return n;
}

// ---- checkpoint reconstruction ----

// The architecture is fully recoverable from record names and shapes: kernel
// count gives m, weight shapes give h/c/M, a missing bank_q marks shared
// weights.
inline AvgNetParams avgnet_from_checkpoint(const CheckpointRecords& rec) {
  auto need = [&](const std::string& name) -> const Matrix& {
    const NamedMatrix* p = rec.find(name);
    if (!p)
      throw FormatError(FormatError::Kind::BadRecord,
                        "checkpoint missing parameter \"" + name + "\"");
    return p->value;
  };

  NetConfig cfg;
  cfg.share_weights = rec.find("bank_q/conv2/w") == nullptr;

  int m = 1;
  while (rec.find("bank_i/conv" + std::to_string(m + 1) + "/w")) ++m;
  if (m < 2)
    throw FormatError(FormatError::Kind::BadRecord, "checkpoint has no conv kernels");
  cfg.span_m = m;
  cfg.hidden = static_cast<int>(need("branch_i/embed0/W").cols());
  cfg.clusters = static_cast<int>(need("branch_i/pool1/W").cols());
  cfg.classes = static_cast<int>(need("head/W").cols());

  AvgNetParams params = make_avgnet(cfg, 0);
  ParamStore store(param_refs(params));
  load_checkpoint(store, rec);
  return params;
}

inline AvgNetParams avgnet_from_checkpoint(const std::filesystem::path& path) {
  return avgnet_from_checkpoint(read_checkpoint(path));
}

}  // namespace avgraph
