#include "motif/encoder.h"

#include <algorithm>
#include <cmath>

#include "motif/chunking.h"
#include "motif/errors.h"
#include "motif/rng.h"

namespace motif {
namespace {

constexpr double kNormEps = 1e-5;
constexpr size_t kInferenceBatch = 256;

Dense make_dense(int in, int out) { return {Mat::Zero(in, out), Mat::Zero(1, out)}; }
Norm make_norm(int dim) { return {Mat::Ones(1, dim), Mat::Zero(1, dim)}; }

void dense_forward(const Mat& x, const Dense& d, Mat& y) {
  y.noalias() = x * d.weight;
  y.rowwise() += d.bias.row(0);
}

/// Accumulates weight/bias gradients and returns dL/dx.
Mat dense_backward(const Mat& x, const Mat& dy, const Dense& d, Dense& g) {
  g.weight.noalias() += x.transpose() * dy;
  g.bias += dy.colwise().sum();
  return dy * d.weight.transpose();
}

void norm_forward(const Mat& x, const Norm& n, Mat& xhat, Vec& rstd, Mat& y) {
  const Vec mean = x.rowwise().mean();
  xhat = x.colwise() - mean;
  rstd = (xhat.array().square().rowwise().mean() + kNormEps).rsqrt();
  xhat.array().colwise() *= rstd.array();
  y = xhat.array().rowwise() * n.gain.row(0).array();
  y.rowwise() += n.shift.row(0);
}

Mat norm_backward(const Mat& xhat, const Vec& rstd, const Mat& dy, const Norm& n, Norm& g) {
  g.gain += (dy.array() * xhat.array()).colwise().sum().matrix();
  g.shift += dy.colwise().sum();
  Mat dxhat = dy.array().rowwise() * n.gain.row(0).array();
  const Vec mean_d = dxhat.rowwise().mean();
  const Vec mean_dx = (dxhat.array() * xhat.array()).rowwise().mean();
  Mat dx = dxhat.colwise() - mean_d;
  dx.array() -= xhat.array().colwise() * mean_dx.array();
  dx.array().colwise() *= rstd.array();
  return dx;
}

Mat sinusoidal_positions(int steps, int dim) {
  Mat pe(steps, dim);
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      pe(t, i) = (i % 2 == 0) ? std::sin(t * freq) : std::cos(t * freq);
    }
  }
  return pe;
}

}  // namespace

const char* pooling_name(Pooling p) { return p == Pooling::Mean ? "mean" : "max"; }

Pooling pooling_from_name(const std::string& name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "max") return Pooling::Max;
  throw ConfigError("encoder.pooling must be 'mean' or 'max', got '" + name + "'");
}

void EncoderConfig::validate() const {
  if (n_layers < 0) throw ConfigError("encoder.n_layers must be nonnegative");
  if (model_dim <= 0 || n_heads <= 0 || ffn_dim <= 0) throw ConfigError("encoder widths must be positive");
  if (model_dim % n_heads != 0) throw ConfigError("encoder.model_dim must be divisible by encoder.n_heads");
  if (embed_dim < 2) throw ConfigError("encoder.embed_dim must be at least 2");
  if (steps_per_bar <= 0) throw ConfigError("encoder.steps_per_bar must be positive");
}

void ExpanderConfig::validate() const {
  for (int h : hidden_dims) {
    if (h <= 0) throw ConfigError("expander.hidden_dims entries must be positive");
  }
  if (out_dim < 2) throw ConfigError("expander.out_dim must be at least 2");
}

bool is_transformer_block_param(const std::string& name) { return name.rfind("encoder.blocks.", 0) == 0; }

ModelWeights init_weights(const EncoderConfig& enc, const ExpanderConfig& exp, uint64_t seed) {
  enc.validate();
  exp.validate();
  ModelWeights w;
  const int dm = enc.model_dim;
  w.encoder.input = make_dense(PianoRoll::kPitches, dm);
  for (int l = 0; l < enc.n_layers; ++l) {
    EncoderBlock b;
    b.attn_norm = make_norm(dm);
    b.query = make_dense(dm, dm);
    b.key = make_dense(dm, dm);
    b.value = make_dense(dm, dm);
    b.attn_out = make_dense(dm, dm);
    b.ffn_norm = make_norm(dm);
    b.ffn_in = make_dense(dm, enc.ffn_dim);
    b.ffn_out = make_dense(enc.ffn_dim, dm);
    w.encoder.blocks.push_back(std::move(b));
  }
  w.encoder.final_norm = make_norm(dm);
  w.encoder.output = make_dense(dm, enc.embed_dim);
  int in = enc.embed_dim;
  for (int h : exp.hidden_dims) {
    w.expander.layers.push_back(make_dense(in, h));
    in = h;
  }
  w.expander.layers.push_back(make_dense(in, exp.out_dim));

  Rng rng = derive_stream(seed, "init");
  for_each_param(w, [&](const std::string& name, Mat& m) {
    if (!name.ends_with(".weight")) return;
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = uniform_real(rng, -limit, limit);
    }
  });
  return w;
}

ModelWeights zeros_like(const ModelWeights& w) {
  ModelWeights z = w;
  for_each_param(z, [](const std::string&, Mat& m) { m.setZero(); });
  return z;
}

size_t parameter_count(const ModelWeights& w) {
  size_t n = 0;
  for_each_param(w, [&](const std::string&, const Mat& m) { n += static_cast<size_t>(m.size()); });
  return n;
}

Model::Model(EncoderConfig enc, ExpanderConfig exp, uint64_t seed)
    : Model(enc, exp, init_weights(enc, exp, seed)) {}

Model::Model(EncoderConfig enc, ExpanderConfig exp, ModelWeights weights)
    : enc_(std::move(enc)), exp_(std::move(exp)), weights_(std::move(weights)) {
  enc_.validate();
  exp_.validate();
  positions_ = sinusoidal_positions(enc_.steps_per_bar, enc_.model_dim);
}

Mat Model::encode_forward(const std::vector<const PianoRollChunk*>& batch, EncoderTape* tape) const {
  const int S = enc_.steps_per_bar;
  const int dm = enc_.model_dim;
  const int heads = enc_.n_heads;
  const int dh = dm / heads;
  const int B = static_cast<int>(batch.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto& W = weights_.encoder;

  std::vector<std::pair<int, int>> active;
  Mat h(static_cast<Eigen::Index>(B) * S, dm);
  for (int b = 0; b < B; ++b) {
    const PianoRollChunk& chunk = *batch[b];
    if (chunk.steps_per_bar != S) {
      throw ConfigError("chunk " + chunk.origin_id + " has " + std::to_string(chunk.steps_per_bar) +
                        " steps per bar but the encoder expects " + std::to_string(S));
    }
    validate_chunk(chunk);
    h.middleRows(static_cast<Eigen::Index>(b) * S, S) = positions_;
    const PianoRoll roll = rasterize(chunk);
    for (int p = 0; p < PianoRoll::kPitches; ++p) {
      for (int t = 0; t < S; ++t) {
        if (roll.at(p, t)) active.emplace_back(b * S + t, p);
      }
    }
  }
  h.rowwise() += W.input.bias.row(0);
  for (const auto& [row, pitch] : active) h.row(row) += W.input.weight.row(pitch);

  if (tape) {
    tape->batch = B;
    tape->active = std::move(active);
    tape->blocks.assign(W.blocks.size(), {});
  }

  Mat xhat, normed, q, k, v, context, attn, hidden, ffn;
  Vec rstd;
  for (size_t l = 0; l < W.blocks.size(); ++l) {
    const EncoderBlock& blk = W.blocks[l];
    BlockTape* bt = tape ? &tape->blocks[l] : nullptr;
    if (bt) bt->input = h;

    norm_forward(h, blk.attn_norm, xhat, rstd, normed);
    dense_forward(normed, blk.query, q);
    dense_forward(normed, blk.key, k);
    dense_forward(normed, blk.value, v);
    context.resize(h.rows(), dm);
    if (bt) bt->probs.resize(static_cast<size_t>(B) * heads);
    for (int b = 0; b < B; ++b) {
      for (int hd = 0; hd < heads; ++hd) {
        const auto qb = q.block(static_cast<Eigen::Index>(b) * S, hd * dh, S, dh);
        const auto kb = k.block(static_cast<Eigen::Index>(b) * S, hd * dh, S, dh);
        const auto vb = v.block(static_cast<Eigen::Index>(b) * S, hd * dh, S, dh);
        Mat scores = (qb * kb.transpose()) * scale;
        const Vec row_max = scores.rowwise().maxCoeff();
        scores = (scores.colwise() - row_max).array().exp();
        const Vec row_sum = scores.rowwise().sum();
        scores.array().colwise() /= row_sum.array();
        context.block(static_cast<Eigen::Index>(b) * S, hd * dh, S, dh).noalias() = scores * vb;
        if (bt) bt->probs[static_cast<size_t>(b) * heads + hd] = std::move(scores);
      }
    }
    dense_forward(context, blk.attn_out, attn);
    if (bt) {
      bt->attn_xhat = xhat;
      bt->attn_rstd = rstd;
      bt->normed_attn = normed;
      bt->q = q;
      bt->k = k;
      bt->v = v;
      bt->context = context;
    }
    h += attn;
    if (bt) bt->mid = h;

    norm_forward(h, blk.ffn_norm, xhat, rstd, normed);
    dense_forward(normed, blk.ffn_in, hidden);
    if (bt) {
      bt->ffn_xhat = xhat;
      bt->ffn_rstd = rstd;
      bt->normed_ffn = normed;
      bt->hidden_pre = hidden;
    }
    hidden = hidden.cwiseMax(0.0);
    dense_forward(hidden, blk.ffn_out, ffn);
    h += ffn;
  }

  Mat per_step;
  norm_forward(h, W.final_norm, xhat, rstd, normed);
  dense_forward(normed, W.output, per_step);

  const int d = enc_.embed_dim;
  Mat z(B, d);
  if (tape && enc_.pooling == Pooling::Max) tape->argmax.assign(B, std::vector<int>(d, 0));
  for (int b = 0; b < B; ++b) {
    const auto steps = per_step.middleRows(static_cast<Eigen::Index>(b) * S, S);
    if (enc_.pooling == Pooling::Mean) {
      z.row(b) = steps.colwise().mean();
    } else {
      for (int j = 0; j < d; ++j) {
        Eigen::Index arg = 0;
        z(b, j) = steps.col(j).maxCoeff(&arg);
        if (tape) tape->argmax[b][j] = static_cast<int>(arg);
      }
    }
  }

  if (tape) {
    tape->final_in = std::move(h);
    tape->final_xhat = std::move(xhat);
    tape->final_rstd = std::move(rstd);
    tape->final_normed = std::move(normed);
    tape->per_step = std::move(per_step);
  }
  return z;
}

void Model::encode_backward(const EncoderTape& tape, const Mat& dz, ModelWeights& grads) const {
  const int S = enc_.steps_per_bar;
  const int dm = enc_.model_dim;
  const int heads = enc_.n_heads;
  const int dh = dm / heads;
  const int B = tape.batch;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto& W = weights_.encoder;
  auto& G = grads.encoder;

  Mat d_step = Mat::Zero(static_cast<Eigen::Index>(B) * S, enc_.embed_dim);
  for (int b = 0; b < B; ++b) {
    if (enc_.pooling == Pooling::Mean) {
      d_step.middleRows(static_cast<Eigen::Index>(b) * S, S).rowwise() = dz.row(b) / S;
    } else {
      for (int j = 0; j < enc_.embed_dim; ++j) d_step(static_cast<Eigen::Index>(b) * S + tape.argmax[b][j], j) = dz(b, j);
    }
  }

  Mat d_normed = dense_backward(tape.final_normed, d_step, W.output, G.output);
  Mat dh_stream = norm_backward(tape.final_xhat, tape.final_rstd, d_normed, W.final_norm, G.final_norm);

  for (size_t li = W.blocks.size(); li-- > 0;) {
    const EncoderBlock& blk = W.blocks[li];
    EncoderBlock& gb = G.blocks[li];
    const BlockTape& bt = tape.blocks[li];

    // feed-forward sublayer
    const Mat hidden = bt.hidden_pre.cwiseMax(0.0);
    Mat d_hidden = dense_backward(hidden, dh_stream, blk.ffn_out, gb.ffn_out);
    d_hidden.array() *= (bt.hidden_pre.array() > 0.0).cast<double>();
    Mat d_norm_ffn = dense_backward(bt.normed_ffn, d_hidden, blk.ffn_in, gb.ffn_in);
    dh_stream += norm_backward(bt.ffn_xhat, bt.ffn_rstd, d_norm_ffn, blk.ffn_norm, gb.ffn_norm);

    // attention sublayer
    const Mat d_context = dense_backward(bt.context, dh_stream, blk.attn_out, gb.attn_out);
    Mat dq(bt.q.rows(), dm), dk(bt.k.rows(), dm), dv(bt.v.rows(), dm);
    for (int b = 0; b < B; ++b) {
      for (int hd = 0; hd < heads; ++hd) {
        const Eigen::Index r0 = static_cast<Eigen::Index>(b) * S;
        const Mat& P = bt.probs[static_cast<size_t>(b) * heads + hd];
        const auto dO = d_context.block(r0, hd * dh, S, dh);
        const auto qb = bt.q.block(r0, hd * dh, S, dh);
        const auto kb = bt.k.block(r0, hd * dh, S, dh);
        const auto vb = bt.v.block(r0, hd * dh, S, dh);
        const Mat dP = dO * vb.transpose();
        dv.block(r0, hd * dh, S, dh).noalias() = P.transpose() * dO;
        const Vec inner = (dP.array() * P.array()).rowwise().sum();
        Mat dS = P.array() * (dP.colwise() - inner).array();
        dS *= scale;
        dq.block(r0, hd * dh, S, dh).noalias() = dS * kb;
        dk.block(r0, hd * dh, S, dh).noalias() = dS.transpose() * qb;
      }
    }
    Mat d_norm_attn = dense_backward(bt.normed_attn, dq, blk.query, gb.query);
    d_norm_attn += dense_backward(bt.normed_attn, dk, blk.key, gb.key);
    d_norm_attn += dense_backward(bt.normed_attn, dv, blk.value, gb.value);
    dh_stream += norm_backward(bt.attn_xhat, bt.attn_rstd, d_norm_attn, blk.attn_norm, gb.attn_norm);
  }

  G.input.bias += dh_stream.colwise().sum();
  for (const auto& [row, pitch] : tape.active) G.input.weight.row(pitch) += dh_stream.row(row);
}

Mat Model::expand_forward(const Mat& z, ExpanderTape* tape) const {
  if (z.cols() != enc_.embed_dim) {
    throw ConfigError("expander expects embeddings of length " + std::to_string(enc_.embed_dim) + ", got " +
                      std::to_string(z.cols()));
  }
  const auto& layers = weights_.expander.layers;
  if (tape) {
    tape->inputs.clear();
    tape->pre_active.clear();
  }
  Mat x = z;
  Mat y;
  for (size_t i = 0; i < layers.size(); ++i) {
    if (tape) tape->inputs.push_back(x);
    dense_forward(x, layers[i], y);
    if (i + 1 < layers.size()) {
      if (tape) tape->pre_active.push_back(y);
      x = y.cwiseMax(0.0);
    }
  }
  return y;
}

Mat Model::expand_backward(const ExpanderTape& tape, const Mat& dzp, ModelWeights& grads) const {
  const auto& layers = weights_.expander.layers;
  Mat d = dzp;
  for (size_t i = layers.size(); i-- > 0;) {
    if (i + 1 < layers.size()) d.array() *= (tape.pre_active[i].array() > 0.0).cast<double>();
    d = dense_backward(tape.inputs[i], d, layers[i], grads.expander.layers[i]);
  }
  return d;
}

Mat Model::encode(const std::vector<PianoRollChunk>& chunks) const {
  Mat out(static_cast<Eigen::Index>(chunks.size()), enc_.embed_dim);
  for (size_t start = 0; start < chunks.size(); start += kInferenceBatch) {
    const size_t end = std::min(chunks.size(), start + kInferenceBatch);
    std::vector<const PianoRollChunk*> batch;
    for (size_t i = start; i < end; ++i) batch.push_back(&chunks[i]);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) =
        encode_forward(batch, nullptr);
  }
  return out;
}

Vec Model::encode(const PianoRollChunk& chunk) const { return encode_forward({&chunk}, nullptr).row(0).transpose(); }

Mat Model::expand(const Mat& z) const { return expand_forward(z, nullptr); }

}  // namespace motif
