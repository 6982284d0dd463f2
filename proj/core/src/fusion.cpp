#include "rsvp/fusion.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rsvp/errors.hpp"
#include "rsvp/rng.hpp"

namespace rsvp {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_attention(const AttentionParams& p, int d, const char* where) {
  auto square = [&](const Tensor2D& m) { return m.rows == d && m.cols == d; };
  if (!square(p.W_q) || !square(p.W_k) || !square(p.W_v) || !square(p.W_o) ||
      static_cast<int>(p.b_q.size()) != d || static_cast<int>(p.b_k.size()) != d ||
      static_cast<int>(p.b_v.size()) != d || static_cast<int>(p.b_o.size()) != d)
    throw ShapeError(std::string(where) + ": attention params not " +
                     std::to_string(d) + "-dimensional");
}

void check_feed_forward(const FeedForwardParams& p, int d, const char* where) {
  if (p.W1.rows != d || p.W1.cols != p.W2.rows || p.W2.cols != d ||
      static_cast<int>(p.b1.size()) != p.W1.cols ||
      static_cast<int>(p.b2.size()) != d)
    throw ShapeError(std::string(where) + ": feed-forward params inconsistent");
}

struct AttnCache {
  Tensor2D q_in, ctx, Q, K, V, A, Z;
};

Tensor2D attn_forward(const Tensor2D& q_in, const Tensor2D& ctx,
                      const AttentionParams& p, AttnCache* cache) {
  int d = p.dim();
  if (q_in.cols != d || ctx.cols != d)
    throw ShapeError("attention: input dim " + std::to_string(q_in.cols) +
                     "/" + std::to_string(ctx.cols) + " vs params " +
                     std::to_string(d));
  Tensor2D Q = add_row_bias(matmul(q_in, p.W_q), p.b_q);
  Tensor2D K = add_row_bias(matmul(ctx, p.W_k), p.b_k);
  Tensor2D V = add_row_bias(matmul(ctx, p.W_v), p.b_v);
  Tensor2D S = scale(matmul(Q, transpose(K)), 1.0 / std::sqrt(double(d)));
  Tensor2D A = softmax_rows(S);
  Tensor2D Z = matmul(A, V);
  Tensor2D out = add_row_bias(matmul(Z, p.W_o), p.b_o);
  if (cache) *cache = AttnCache{q_in, ctx, std::move(Q), std::move(K),
                                std::move(V), std::move(A), std::move(Z)};
  return out;
}

void accumulate(std::vector<double>& acc, const std::vector<double>& v) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

void attn_backward(const AttnCache& c, const AttentionParams& p,
                   const Tensor2D& d_out, AttentionParams& g,
                   Tensor2D& d_q_in, Tensor2D& d_ctx) {
  int d = p.dim();
  double inv_sqrt_d = 1.0 / std::sqrt(double(d));

  Tensor2D dZ = matmul(d_out, transpose(p.W_o));
  g.W_o = add(g.W_o, matmul(transpose(c.Z), d_out));
  accumulate(g.b_o, colsum(d_out));

  Tensor2D dA = matmul(dZ, transpose(c.V));
  Tensor2D dV = matmul(transpose(c.A), dZ);

  // Softmax Jacobian per row: dS_ij = A_ij * (dA_ij - sum_k A_ik dA_ik).
  Tensor2D dS(c.A.rows, c.A.cols);
  for (int i = 0; i < c.A.rows; ++i) {
    double dot = 0.0;
    for (int j = 0; j < c.A.cols; ++j) dot += c.A(i, j) * dA(i, j);
    for (int j = 0; j < c.A.cols; ++j)
      dS(i, j) = c.A(i, j) * (dA(i, j) - dot);
  }

  Tensor2D dQ = scale(matmul(dS, c.K), inv_sqrt_d);
  Tensor2D dK = scale(matmul(transpose(dS), c.Q), inv_sqrt_d);

  d_q_in = matmul(dQ, transpose(p.W_q));
  g.W_q = add(g.W_q, matmul(transpose(c.q_in), dQ));
  accumulate(g.b_q, colsum(dQ));

  d_ctx = add(matmul(dK, transpose(p.W_k)), matmul(dV, transpose(p.W_v)));
  g.W_k = add(g.W_k, matmul(transpose(c.ctx), dK));
  accumulate(g.b_k, colsum(dK));
  g.W_v = add(g.W_v, matmul(transpose(c.ctx), dV));
  accumulate(g.b_v, colsum(dV));
}

struct FfCache {
  Tensor2D X, H1, G;
};

Tensor2D ff_forward(const Tensor2D& X, const FeedForwardParams& p,
                    FfCache* cache) {
  if (X.cols != p.W1.rows)
    throw ShapeError("feed_forward: input dim " + std::to_string(X.cols) +
                     " vs params " + std::to_string(p.W1.rows));
  Tensor2D H1 = add_row_bias(matmul(X, p.W1), p.b1);
  Tensor2D G = H1;
  for (double& v : G.data) v = gelu(v);
  Tensor2D out = add_row_bias(matmul(G, p.W2), p.b2);
  if (cache) *cache = FfCache{X, std::move(H1), std::move(G)};
  return out;
}

Tensor2D ff_backward(const FfCache& c, const FeedForwardParams& p,
                     const Tensor2D& d_out, FeedForwardParams& g) {
  Tensor2D dG = matmul(d_out, transpose(p.W2));
  g.W2 = add(g.W2, matmul(transpose(c.G), d_out));
  accumulate(g.b2, colsum(d_out));
  Tensor2D dH1 = dG;
  for (size_t i = 0; i < dH1.data.size(); ++i)
    dH1.data[i] *= gelu_derivative(c.H1.data[i]);
  g.W1 = add(g.W1, matmul(transpose(c.X), dH1));
  accumulate(g.b1, colsum(dH1));
  return matmul(dH1, transpose(p.W1));
}

struct HybridCache {
  AttnCache self1, cross, self2;
  FfCache ff;
  Tensor2D hybrid;
};

Tensor2D hybrid_forward(const Tensor2D& V_img, const Tensor2D& E_prompt,
                        const FuseParams& p, HybridCache* cache) {
  if (V_img.cols != E_prompt.cols)
    throw ShapeError("hybrid_fuse: image dim " + std::to_string(V_img.cols) +
                     " vs prompt dim " + std::to_string(E_prompt.cols));
  HybridCache local;
  HybridCache* c = cache ? cache : &local;
  Tensor2D V_sa = attn_forward(V_img, V_img, p.self1, &c->self1);
  Tensor2D E_ff = ff_forward(E_prompt, p.ff, &c->ff);
  Tensor2D H_ca = attn_forward(E_ff, V_sa, p.cross, &c->cross);
  Tensor2D sum = add(H_ca, E_ff);
  Tensor2D out = attn_forward(sum, sum, p.self2, &c->self2);
  c->hybrid = out;
  return out;
}

// d(sum of squares)/d(out) = 2 * out, scaled by the upstream factor.
Tensor2D sum_sq_grad(const Tensor2D& out, double upstream) {
  return scale(out, 2.0 * upstream);
}

double sum_sq(const Tensor2D& t) {
  double s = 0.0;
  for (double v : t.data) s += v * v;
  return s;
}

void hybrid_backward(const HybridCache& c, const FuseParams& p,
                     const Tensor2D& d_hybrid, FuseParams& g,
                     Tensor2D& d_V_img, Tensor2D& d_E_prompt) {
  Tensor2D d_sum_q, d_sum_ctx;
  attn_backward(c.self2, p.self2, d_hybrid, g.self2, d_sum_q, d_sum_ctx);
  Tensor2D d_sum = add(d_sum_q, d_sum_ctx);

  Tensor2D d_H_ca = d_sum;
  Tensor2D d_E_ff = d_sum;  // residual branch of the addition

  Tensor2D d_cross_q, d_V_sa;
  attn_backward(c.cross, p.cross, d_H_ca, g.cross, d_cross_q, d_V_sa);
  d_E_ff = add(d_E_ff, d_cross_q);

  d_E_prompt = ff_backward(c.ff, p.ff, d_E_ff, g.ff);

  Tensor2D d_img_q, d_img_ctx;
  attn_backward(c.self1, p.self1, d_V_sa, g.self1, d_img_q, d_img_ctx);
  d_V_img = add(d_img_q, d_img_ctx);
}

struct SaeCache {
  Tensor2D patches;  // P x (patch*patch)
  Tensor2D E0;
  AttnCache attn;
  FfCache ff;
};

Tensor2D patchify(const BinaryMask& mask, int patch) {
  if (mask.width <= 0 || mask.height <= 0 || patch <= 0)
    throw std::invalid_argument("sae_encode: empty raster or bad patch size");
  if (mask.values.size() !=
      static_cast<size_t>(mask.width) * static_cast<size_t>(mask.height))
    throw std::invalid_argument("sae_encode: mask size mismatch");
  int px = (mask.width + patch - 1) / patch;
  int py = (mask.height + patch - 1) / patch;
  Tensor2D out(px * py, patch * patch);
  for (int gy = 0; gy < py; ++gy) {
    for (int gx = 0; gx < px; ++gx) {
      int row = gy * px + gx;
      for (int dy = 0; dy < patch; ++dy) {
        for (int dx = 0; dx < patch; ++dx) {
          int x = gx * patch + dx;
          int y = gy * patch + dy;
          double v = 0.0;  // zero padding beyond the raster edge
          if (x < mask.width && y < mask.height)
            v = mask.at(x, y) ? 1.0 : 0.0;
          out(row, dy * patch + dx) = v;
        }
      }
    }
  }
  return out;
}

Tensor2D sae_forward(const BinaryMask& mask, const SaeParams& p, int patch,
                     SaeCache* cache) {
  Tensor2D M = patchify(mask, patch);
  if (M.cols != p.W_embed.rows)
    throw ShapeError("sae_encode: patch size " + std::to_string(M.cols) +
                     " vs embedding rows " + std::to_string(p.W_embed.rows));
  Tensor2D E0 = add_row_bias(matmul(M, p.W_embed), p.b_embed);
  SaeCache local;
  SaeCache* c = cache ? cache : &local;
  Tensor2D A1 = attn_forward(E0, E0, p.attn, &c->attn);
  Tensor2D out = ff_forward(A1, p.ff, &c->ff);
  c->patches = std::move(M);
  c->E0 = std::move(E0);
  return out;
}

void sae_backward(const SaeCache& c, const SaeParams& p,
                  const Tensor2D& d_out, SaeParams& g) {
  Tensor2D dA1 = ff_backward(c.ff, p.ff, d_out, g.ff);
  Tensor2D d_q, d_ctx;
  attn_backward(c.attn, p.attn, dA1, g.attn, d_q, d_ctx);
  Tensor2D dE0 = add(d_q, d_ctx);
  g.W_embed = add(g.W_embed, matmul(transpose(c.patches), dE0));
  accumulate(g.b_embed, colsum(dE0));
}

void visit_attention(AttentionParams& p, const std::function<void(double&)>& fn) {
  for (auto* t : {&p.W_q, &p.W_k, &p.W_v, &p.W_o})
    for (double& v : t->data) fn(v);
  for (auto* b : {&p.b_q, &p.b_k, &p.b_v, &p.b_o})
    for (double& v : *b) fn(v);
}

void visit_feed_forward(FeedForwardParams& p,
                        const std::function<void(double&)>& fn) {
  for (double& v : p.W1.data) fn(v);
  for (double& v : p.b1) fn(v);
  for (double& v : p.W2.data) fn(v);
  for (double& v : p.b2) fn(v);
}

}  // namespace

void validate(const KernelConfig& cfg) {
  if (cfg.d_v <= 0 || cfg.d_l <= 0 || cfg.n_views <= 0 || cfg.patch <= 0 ||
      cfg.precision <= 0.0)
    throw std::invalid_argument("kernel config fields must be positive");
}

BinaryMask::BinaryMask(int w, int h, uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0)
    throw std::invalid_argument("mask dimensions must be positive");
  values.assign(static_cast<size_t>(w) * h, fill);
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
  double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

Tensor2D softmax_rows(const Tensor2D& logits) {
  Tensor2D out(logits.rows, logits.cols);
  for (int i = 0; i < logits.rows; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < logits.cols; ++j) m = std::max(m, logits(i, j));
    double denom = 0.0;
    for (int j = 0; j < logits.cols; ++j) {
      out(i, j) = std::exp(logits(i, j) - m);
      denom += out(i, j);
    }
    for (int j = 0; j < logits.cols; ++j) out(i, j) /= denom;
  }
  return out;
}

Tensor2D concat_views(const std::vector<Tensor2D>& views) {
  if (views.empty()) throw ShapeError("concat_views: need at least one view");
  return vstack(views);
}

Tensor2D sae_encode(const BinaryMask& mask, const SaeParams& p,
                    const KernelConfig& cfg) {
  validate(cfg);
  return sae_forward(mask, p, cfg.patch, nullptr);
}

std::vector<uint32_t> tokenize_stub(const std::string& text, uint32_t vocab) {
  if (vocab == 0) throw std::invalid_argument("vocab size must be >= 1");
  std::vector<uint32_t> ids;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      ids.push_back(static_cast<uint32_t>(Rng::hash_id(token) % vocab));
      token.clear();
    }
  };
  for (char ch : text) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u))
      token.push_back(static_cast<char>(std::tolower(u)));
    else if (std::isspace(u))
      flush();
    // punctuation is dropped entirely
  }
  flush();
  return ids;
}

Tensor2D embed_tokens(const std::vector<uint32_t>& ids,
                      const Tensor2D& embedding) {
  Tensor2D out(static_cast<int>(ids.size()), embedding.cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= static_cast<uint32_t>(embedding.rows))
      throw ShapeError("embed_tokens: id " + std::to_string(ids[i]) +
                       " outside vocab of " + std::to_string(embedding.rows));
    for (int j = 0; j < embedding.cols; ++j)
      out(static_cast<int>(i), j) = embedding(static_cast<int>(ids[i]), j);
  }
  return out;
}

Tensor2D self_attention(const Tensor2D& X, const AttentionParams& p) {
  check_attention(p, p.dim(), "self_attention");
  return attn_forward(X, X, p, nullptr);
}

Tensor2D feed_forward(const Tensor2D& X, const FeedForwardParams& p) {
  check_feed_forward(p, X.cols, "feed_forward");
  return ff_forward(X, p, nullptr);
}

Tensor2D cross_attention(const Tensor2D& queries, const Tensor2D& context,
                         const AttentionParams& p) {
  check_attention(p, p.dim(), "cross_attention");
  if (queries.cols != context.cols)
    throw ShapeError("cross_attention: query dim " +
                     std::to_string(queries.cols) + " vs context dim " +
                     std::to_string(context.cols));
  return attn_forward(queries, context, p, nullptr);
}

Tensor2D hybrid_fuse(const Tensor2D& V_img, const Tensor2D& E_prompt,
                     const FuseParams& p) {
  return hybrid_forward(V_img, E_prompt, p, nullptr);
}

Tensor2D project_vl(const Tensor2D& H, const ProjParams& p) {
  if (H.cols != p.W.rows)
    throw ShapeError("project_vl: input dim " + std::to_string(H.cols) +
                     " vs projection rows " + std::to_string(p.W.rows));
  return add_row_bias(matmul(H, p.W), p.b);
}

Tensor2D assemble_llm_input(const Tensor2D& VP_proj,
                            const Tensor2D& L_instruct) {
  if (L_instruct.rows == 0) return VP_proj;
  if (VP_proj.cols != L_instruct.cols)
    throw ShapeError("assemble_llm_input: dim " + std::to_string(VP_proj.cols) +
                     " vs " + std::to_string(L_instruct.cols));
  return vstack({VP_proj, L_instruct});
}

namespace {

AttentionParams init_attention(int d, Rng& rng) {
  AttentionParams p;
  double w_scale = 1.0 / std::sqrt(double(d));
  auto mat = [&] {
    Tensor2D t(d, d);
    for (double& v : t.data) v = rng.gaussian(0.0, w_scale);
    return t;
  };
  auto vec = [&] {
    std::vector<double> b(static_cast<size_t>(d));
    for (double& v : b) v = rng.gaussian(0.0, 0.02);
    return b;
  };
  p.W_q = mat(); p.W_k = mat(); p.W_v = mat(); p.W_o = mat();
  p.b_q = vec(); p.b_k = vec(); p.b_v = vec(); p.b_o = vec();
  return p;
}

FeedForwardParams init_feed_forward(int d, int hidden, Rng& rng) {
  FeedForwardParams p;
  p.W1 = Tensor2D(d, hidden);
  for (double& v : p.W1.data) v = rng.gaussian(0.0, 1.0 / std::sqrt(double(d)));
  p.b1.assign(static_cast<size_t>(hidden), 0.0);
  for (double& v : p.b1) v = rng.gaussian(0.0, 0.02);
  p.W2 = Tensor2D(hidden, d);
  for (double& v : p.W2.data)
    v = rng.gaussian(0.0, 1.0 / std::sqrt(double(hidden)));
  p.b2.assign(static_cast<size_t>(d), 0.0);
  for (double& v : p.b2) v = rng.gaussian(0.0, 0.02);
  return p;
}

}  // namespace

FusionParams init_fusion_params(const KernelConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  FusionParams p;
  int d = cfg.d_v;
  int pp = cfg.patch * cfg.patch;
  p.sae.W_embed = Tensor2D(pp, d);
  for (double& v : p.sae.W_embed.data)
    v = rng.gaussian(0.0, 1.0 / std::sqrt(double(pp)));
  p.sae.b_embed.assign(static_cast<size_t>(d), 0.0);
  for (double& v : p.sae.b_embed) v = rng.gaussian(0.0, 0.02);
  p.sae.attn = init_attention(d, rng);
  p.sae.ff = init_feed_forward(d, 2 * d, rng);
  p.fuse.self1 = init_attention(d, rng);
  p.fuse.ff = init_feed_forward(d, 2 * d, rng);
  p.fuse.cross = init_attention(d, rng);
  p.fuse.self2 = init_attention(d, rng);
  p.proj.W = Tensor2D(d, cfg.d_l);
  for (double& v : p.proj.W.data)
    v = rng.gaussian(0.0, 1.0 / std::sqrt(double(d)));
  p.proj.b.assign(static_cast<size_t>(cfg.d_l), 0.0);
  for (double& v : p.proj.b) v = rng.gaussian(0.0, 0.02);
  return p;
}

void for_each_param(FusionParams& p, const std::function<void(double&)>& fn) {
  for (double& v : p.sae.W_embed.data) fn(v);
  for (double& v : p.sae.b_embed) fn(v);
  visit_attention(p.sae.attn, fn);
  visit_feed_forward(p.sae.ff, fn);
  visit_attention(p.fuse.self1, fn);
  visit_feed_forward(p.fuse.ff, fn);
  visit_attention(p.fuse.cross, fn);
  visit_attention(p.fuse.self2, fn);
  for (double& v : p.proj.W.data) fn(v);
  for (double& v : p.proj.b) fn(v);
}

size_t param_count(const FusionParams& p) {
  size_t n = 0;
  FusionParams copy = p;
  for_each_param(copy, [&](double&) { ++n; });
  return n;
}

std::vector<double> param_vector(const FusionParams& p) {
  std::vector<double> out;
  FusionParams copy = p;
  for_each_param(copy, [&](double& v) { out.push_back(v); });
  return out;
}

void set_param_vector(FusionParams& p, const std::vector<double>& v) {
  size_t i = 0;
  for_each_param(p, [&](double& x) {
    if (i >= v.size()) throw ShapeError("set_param_vector: vector too short");
    x = v[i++];
  });
  if (i != v.size()) throw ShapeError("set_param_vector: vector too long");
}

FusionParams zeros_like(const FusionParams& p) {
  FusionParams z = p;
  for_each_param(z, [](double& v) { v = 0.0; });
  return z;
}

double fuse_loss(const Tensor2D& V_img, const Tensor2D& E_prompt,
                 const FusionParams& p, LossStage stage) {
  Tensor2D hyb = hybrid_forward(V_img, E_prompt, p.fuse, nullptr);
  if (stage == LossStage::hybrid) return sum_sq(hyb);
  return sum_sq(project_vl(hyb, p.proj));
}

FusionGradients fuse_backward(const Tensor2D& V_img, const Tensor2D& E_prompt,
                              const FusionParams& p, LossStage stage,
                              double upstream) {
  FusionGradients g;
  g.params = zeros_like(p);
  HybridCache cache;
  Tensor2D hyb = hybrid_forward(V_img, E_prompt, p.fuse, &cache);

  Tensor2D d_hybrid;
  if (stage == LossStage::hybrid) {
    g.loss = sum_sq(hyb);
    d_hybrid = sum_sq_grad(hyb, upstream);
  } else {
    Tensor2D proj_out = project_vl(hyb, p.proj);
    g.loss = sum_sq(proj_out);
    Tensor2D d_proj = sum_sq_grad(proj_out, upstream);
    g.params.proj.W = matmul(transpose(hyb), d_proj);
    g.params.proj.b = colsum(d_proj);
    d_hybrid = matmul(d_proj, transpose(p.proj.W));
  }

  hybrid_backward(cache, p.fuse, d_hybrid, g.params.fuse, g.d_V_img,
                  g.d_E_prompt);
  return g;
}

double chain_loss(const std::vector<Tensor2D>& views, const BinaryMask& mask,
                  const FusionParams& p, const KernelConfig& cfg,
                  LossStage stage) {
  Tensor2D V_img = concat_views(views);
  Tensor2D E_prompt = sae_encode(mask, p.sae, cfg);
  return fuse_loss(V_img, E_prompt, p, stage);
}

FusionGradients chain_backward(const std::vector<Tensor2D>& views,
                               const BinaryMask& mask, const FusionParams& p,
                               const KernelConfig& cfg, LossStage stage,
                               double upstream) {
  validate(cfg);
  Tensor2D V_img = concat_views(views);
  SaeCache sae_cache;
  Tensor2D E_prompt = sae_forward(mask, p.sae, cfg.patch, &sae_cache);
  FusionGradients g = fuse_backward(V_img, E_prompt, p, stage, upstream);
  sae_backward(sae_cache, p.sae, g.d_E_prompt, g.params.sae);
  return g;
}

namespace {

Tensor2D random_tensor(int rows, int cols, Rng& rng, double scl = 1.0) {
  Tensor2D t(rows, cols);
  for (double& v : t.data) v = rng.gaussian(0.0, scl);
  return t;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_below(static_cast<uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

Tensor2D permute_rows(const Tensor2D& t, const std::vector<int>& perm) {
  Tensor2D out(t.rows, t.cols);
  for (int i = 0; i < t.rows; ++i)
    for (int j = 0; j < t.cols; ++j) out(i, j) = t(perm[i], j);
  return out;
}

// Central finite differences over every parameter against the analytic
// gradients; returns the max relative error with the |a-f|/max(1,|a|,|f|)
// convention.
double fd_max_rel_err(const Tensor2D& V_img, const Tensor2D& E_prompt,
                      const FusionParams& params, LossStage stage, double h) {
  FusionGradients g = fuse_backward(V_img, E_prompt, params, stage, 1.0);
  std::vector<double> analytic = param_vector(g.params);
  std::vector<double> base = param_vector(params);
  FusionParams work = params;
  double worst = 0.0;
  for (size_t i = 0; i < base.size(); ++i) {
    std::vector<double> v = base;
    v[i] = base[i] + h;
    set_param_vector(work, v);
    double up = fuse_loss(V_img, E_prompt, work, stage);
    v[i] = base[i] - h;
    set_param_vector(work, v);
    double down = fuse_loss(V_img, E_prompt, work, stage);
    double fd = (up - down) / (2.0 * h);
    double err = std::abs(analytic[i] - fd) /
                 std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
    worst = std::max(worst, err);
  }
  set_param_vector(work, base);
  return worst;
}

double fd_max_rel_err_chain(const std::vector<Tensor2D>& views,
                            const BinaryMask& mask, const FusionParams& params,
                            const KernelConfig& cfg, LossStage stage,
                            double h) {
  FusionGradients g = chain_backward(views, mask, params, cfg, stage, 1.0);
  std::vector<double> analytic = param_vector(g.params);
  std::vector<double> base = param_vector(params);
  FusionParams work = params;
  double worst = 0.0;
  for (size_t i = 0; i < base.size(); ++i) {
    std::vector<double> v = base;
    v[i] = base[i] + h;
    set_param_vector(work, v);
    double up = chain_loss(views, mask, work, cfg, stage);
    v[i] = base[i] - h;
    set_param_vector(work, v);
    double down = chain_loss(views, mask, work, cfg, stage);
    double fd = (up - down) / (2.0 * h);
    double err = std::abs(analytic[i] - fd) /
                 std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

KernelCheckReport kernel_check(const KernelConfig& cfg, int cases,
                               int fd_seeds) {
  validate(cfg);
  auto t0 = std::chrono::steady_clock::now();
  KernelCheckReport rep;
  rep.cases = cases;
  rep.fd_seeds = fd_seeds;
  rep.shape_ok = true;

  Rng rng(cfg.seed ^ 0x6b65726e636b6bull);
  for (int c = 0; c < cases; ++c) {
    int d = cfg.d_v;
    int n = 1 + static_cast<int>(rng.uniform_below(6));
    int m = 1 + static_cast<int>(rng.uniform_below(6));
    KernelConfig local = cfg;
    local.seed = cfg.seed + static_cast<uint64_t>(c) * 7919 + 1;
    FusionParams params = init_fusion_params(local);

    Tensor2D X = random_tensor(n, d, rng);
    Tensor2D C = random_tensor(m, d, rng);

    // Softmax row sums on the self-attention logits of this case.
    Tensor2D Q = add_row_bias(matmul(X, params.fuse.self1.W_q),
                              params.fuse.self1.b_q);
    Tensor2D K = add_row_bias(matmul(X, params.fuse.self1.W_k),
                              params.fuse.self1.b_k);
    Tensor2D A = softmax_rows(
        scale(matmul(Q, transpose(K)), 1.0 / std::sqrt(double(d))));
    for (int i = 0; i < A.rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < A.cols; ++j) s += A(i, j);
      rep.max_softmax_row_err =
          std::max(rep.max_softmax_row_err, std::abs(s - 1.0));
    }

    // Self-attention permutation equivariance.
    auto perm = random_permutation(n, rng);
    Tensor2D lhs = permute_rows(self_attention(X, params.fuse.self1), perm);
    Tensor2D rhs = self_attention(permute_rows(X, perm), params.fuse.self1);
    rep.max_self_perm_err =
        std::max(rep.max_self_perm_err, max_abs_diff(lhs, rhs));

    // Cross-attention context-permutation invariance.
    auto cperm = random_permutation(m, rng);
    Tensor2D base_ca = cross_attention(X, C, params.fuse.cross);
    Tensor2D perm_ca =
        cross_attention(X, permute_rows(C, cperm), params.fuse.cross);
    rep.max_cross_perm_err =
        std::max(rep.max_cross_perm_err, max_abs_diff(base_ca, perm_ca));

    // Hybrid shape contract.
    Tensor2D hyb = hybrid_fuse(C, X, params.fuse);
    if (hyb.rows != X.rows || hyb.cols != d) rep.shape_ok = false;
  }

  const double h = 1e-5;
  for (int s = 0; s < fd_seeds; ++s) {
    KernelConfig local = cfg;
    local.d_v = 8;
    local.d_l = cfg.d_l;
    local.patch = 2;
    local.seed = cfg.seed + 1000 + static_cast<uint64_t>(s);
    FusionParams params = init_fusion_params(local);
    Rng data_rng(local.seed ^ 0xfd5eedull);
    Tensor2D V_img = random_tensor(4, 8, data_rng, 0.5);
    Tensor2D E_prompt = random_tensor(3, 8, data_rng, 0.5);
    for (LossStage stage : {LossStage::hybrid, LossStage::projected}) {
      rep.max_fd_rel_err = std::max(
          rep.max_fd_rel_err, fd_max_rel_err(V_img, E_prompt, params, stage, h));
    }
    BinaryMask mask(4, 4);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        mask.set(x, y, data_rng.uniform() < 0.5 ? 0 : 1);
    std::vector<Tensor2D> views = {random_tensor(2, 8, data_rng, 0.5),
                                   random_tensor(2, 8, data_rng, 0.5)};
    for (LossStage stage : {LossStage::hybrid, LossStage::projected}) {
      rep.max_fd_rel_err =
          std::max(rep.max_fd_rel_err,
                   fd_max_rel_err_chain(views, mask, params, local, stage, h));
    }
  }

  rep.pass = rep.shape_ok && rep.max_softmax_row_err < cfg.precision &&
             rep.max_self_perm_err < cfg.precision &&
             rep.max_cross_perm_err < cfg.precision &&
             rep.max_fd_rel_err < 1e-4;
  rep.elapsed_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  return rep;
}

}  // namespace rsvp
