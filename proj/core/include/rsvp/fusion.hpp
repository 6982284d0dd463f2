#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsvp/tensor.hpp"

namespace rsvp {

// Single-head attention block: plain linear Q/K/V plus an output projection.
// Row convention: Q = X*W_q + b_q, one sequence element per row.
struct AttentionParams {
  Tensor2D W_q, W_k, W_v, W_o;            // d x d
  std::vector<double> b_q, b_k, b_v, b_o;  // d
  int dim() const { return W_q.rows; }
};

// Two affine maps with a smooth elementwise nonlinearity between.
struct FeedForwardParams {
  Tensor2D W1;             // d x hidden
  std::vector<double> b1;  // hidden
  Tensor2D W2;             // hidden x d
  std::vector<double> b2;  // d
};

// Spatial-aware encoder over a binary prompt raster: patch flatten ->
// linear embed -> self-attention -> feed-forward.
struct SaeParams {
  Tensor2D W_embed;             // (patch*patch) x d_v
  std::vector<double> b_embed;  // d_v
  AttentionParams attn;
  FeedForwardParams ff;
};

// The hybrid mutual-understanding block. The cross stage takes its queries
// from the prompt stream: the residual sum downstream forces the cross
// output to share the prompt sequence length.
struct FuseParams {
  AttentionParams self1;  // image self-attention
  FeedForwardParams ff;   // prompt feed-forward
  AttentionParams cross;  // queries = prompt stream, context = image stream
  AttentionParams self2;  // hybrid self-attention
};

struct ProjParams {
  Tensor2D W;             // d_v x d_l
  std::vector<double> b;  // d_l
};

struct FusionParams {
  SaeParams sae;
  FuseParams fuse;
  ProjParams proj;
};

struct KernelConfig {
  int d_v = 8;
  int d_l = 16;
  int n_views = 2;
  int patch = 2;
  uint64_t seed = 0;
  double precision = 1e-12;  // tolerance used by the invariant checks
};
void validate(const KernelConfig& cfg);

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> values;  // row-major, nonzero = inside

  BinaryMask() = default;
  BinaryMask(int w, int h, uint8_t fill = 0);
  uint8_t at(int x, int y) const {
    return values[static_cast<size_t>(y) * width + x];
  }
  void set(int x, int y, uint8_t v) {
    values[static_cast<size_t>(y) * width + x] = v;
  }
};

// Deterministic initialization from cfg.seed; biases small, weights
// gaussian scaled by 1/sqrt(fan-in). Feed-forward hidden dim = 2*d.
FusionParams init_fusion_params(const KernelConfig& cfg);

// Fixed-order traversal over every scalar parameter; the order backs the
// finite-difference harness and param_vector/set_param_vector.
void for_each_param(FusionParams& p, const std::function<void(double&)>& fn);
size_t param_count(const FusionParams& p);
std::vector<double> param_vector(const FusionParams& p);
void set_param_vector(FusionParams& p, const std::vector<double>& v);
FusionParams zeros_like(const FusionParams& p);

double gelu(double x);
double gelu_derivative(double x);
Tensor2D softmax_rows(const Tensor2D& logits);

// Forward operations.
Tensor2D concat_views(const std::vector<Tensor2D>& views);
Tensor2D sae_encode(const BinaryMask& mask, const SaeParams& p,
                    const KernelConfig& cfg);
std::vector<uint32_t> tokenize_stub(const std::string& text, uint32_t vocab);
Tensor2D embed_tokens(const std::vector<uint32_t>& ids,
                      const Tensor2D& embedding);
Tensor2D self_attention(const Tensor2D& X, const AttentionParams& p);
Tensor2D feed_forward(const Tensor2D& X, const FeedForwardParams& p);
Tensor2D cross_attention(const Tensor2D& queries, const Tensor2D& context,
                         const AttentionParams& p);
Tensor2D hybrid_fuse(const Tensor2D& V_img, const Tensor2D& E_prompt,
                     const FuseParams& p);
Tensor2D project_vl(const Tensor2D& H, const ProjParams& p);
Tensor2D assemble_llm_input(const Tensor2D& VP_proj,
                            const Tensor2D& L_instruct);

// The scalar reduction the gradient harness differentiates: sum of squares
// of the hybrid output, or of its projection when stage = projected.
enum class LossStage { hybrid, projected };

double fuse_loss(const Tensor2D& V_img, const Tensor2D& E_prompt,
                 const FusionParams& p, LossStage stage);

struct FusionGradients {
  FusionParams params;  // same shapes as the inputs, gradient values
  Tensor2D d_V_img;
  Tensor2D d_E_prompt;
  double loss = 0.0;
};

// Analytic gradients of fuse_loss scaled by `upstream`. Parameter blocks the
// chosen stage never touches (sae always; proj under LossStage::hybrid) come
// back zero.
FusionGradients fuse_backward(const Tensor2D& V_img, const Tensor2D& E_prompt,
                              const FusionParams& p, LossStage stage,
                              double upstream = 1.0);

// Same loss with E_prompt produced by the SAE and V_img by concat_views, so
// every parameter block (including the SAE) carries a live gradient.
double chain_loss(const std::vector<Tensor2D>& views, const BinaryMask& mask,
                  const FusionParams& p, const KernelConfig& cfg,
                  LossStage stage);
FusionGradients chain_backward(const std::vector<Tensor2D>& views,
                               const BinaryMask& mask, const FusionParams& p,
                               const KernelConfig& cfg, LossStage stage,
                               double upstream = 1.0);

struct KernelCheckReport {
  bool pass = false;
  int cases = 0;
  int fd_seeds = 0;
  double max_softmax_row_err = 0.0;
  double max_self_perm_err = 0.0;
  double max_cross_perm_err = 0.0;
  double max_fd_rel_err = 0.0;
  bool shape_ok = false;
  double elapsed_s = 0.0;
};

// Runs the invariant suite: softmax row sums, permutation equivariance /
// invariance, hybrid shape contract, and finite-difference gradient checks
// over both loss stages (fuse_backward and the SAE chain).
KernelCheckReport kernel_check(const KernelConfig& cfg, int cases = 100,
                               int fd_seeds = 5);

}  // namespace rsvp
