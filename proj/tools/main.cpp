#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Visual-prompt corpus toolkit"};
  app.require_subcommand(1);

  rsvp::cli::ConvertArgs convert_args;
  uint64_t seed_opt = 0;
  double alpha_opt = 0.0;
  int patch_opt = 0;
  auto* convert = app.add_subcommand(
      "convert", "Build a triple corpus from a source manifest");
  convert->add_option("manifest", convert_args.manifest, "Manifest JSON path")
      ->required();
  convert->add_option("--out", convert_args.output,
                      "Override the manifest output path");
  auto* conv_seed = convert->add_option("--seed", seed_opt, "Global seed");
  auto* conv_alpha =
      convert->add_option("--alpha", alpha_opt, "Box noise scale override");
  auto* conv_patch = convert->add_option("--patch-px", patch_opt,
                                         "Point-sampling cell size override");
  convert->add_flag("--strict", convert_args.strict,
                    "Treat warnings as errors");

  rsvp::cli::RenderArgs render_args;
  auto* render =
      app.add_subcommand("render", "Rasterize mark overlays for a corpus");
  render->add_option("triples", render_args.triples, "Triples JSONL path")
      ->required();
  render->add_option("--images", render_args.images_dir, "Image root directory")
      ->required();
  render->add_option("--out", render_args.out_dir, "Output directory")
      ->required();
  render->add_option("--stroke", render_args.stroke_width, "Stroke width (px)");
  render->add_option("--label-scale", render_args.label_scale,
                     "Digit glyph scale");
  render->add_option("--point-radius", render_args.point_radius,
                     "Point disc radius (px)");
  render->add_flag("--strict", render_args.strict, "Treat warnings as errors");

  rsvp::cli::AnnotateArgs annotate_args;
  auto* annotate = app.add_subcommand(
      "annotate", "Build annotation requests and dispatch them");
  annotate->add_option("triples", annotate_args.triples, "Triples JSONL path")
      ->required();
  annotate
      ->add_option("--images", annotate_args.images_dir, "Image root directory")
      ->required();
  annotate->add_option("--out", annotate_args.output, "Results JSONL path")
      ->required();
  annotate->add_option("--provider", annotate_args.provider,
                       "Annotation provider: mock|http");
  annotate->add_option("--template", annotate_args.template_name,
                       "Template: brief|detailed|relationship");
  annotate->add_option("--threads", annotate_args.threads,
                       "Max in-flight requests");
  annotate->add_flag("--strict", annotate_args.strict,
                     "Abort on per-item errors");

  rsvp::cli::EvalArgs eval_args;
  std::string metrics_csv;
  auto* eval = app.add_subcommand("eval", "Score predictions against a corpus");
  eval->add_option("--pred", eval_args.pred, "Predictions JSONL ({id, text})")
      ->required();
  eval->add_option("--gt", eval_args.gt, "Ground-truth JSONL ({id, text})")
      ->required();
  eval->add_option("--metrics", metrics_csv,
                   "Comma-separated metric list (bleu-1..4, rouge-l, rouge-1, "
                   "cider, ss, s_iou, accuracy, accuracy-semantic)")
      ->required();
  eval->add_option("--embeddings", eval_args.embeddings,
                   "Embedding table (token v1 .. vD per line)");
  eval->add_option("--tau", eval_args.tau, "Semantic match threshold");
  eval->add_flag("--strict", eval_args.strict, "Fail on unmatched ids");

  rsvp::cli::KernelArgs kernel_args;
  auto* kernel = app.add_subcommand(
      "kernel-check", "Run the fusion-kernel invariant and gradient suite");
  kernel->add_option("--seed", kernel_args.seed, "Seed");
  kernel->add_option("--d-v", kernel_args.d_v, "Feature dim");
  kernel->add_option("--d-l", kernel_args.d_l, "Language dim");
  kernel->add_option("--patch", kernel_args.patch, "SAE patch size");
  kernel->add_option("--cases", kernel_args.cases, "Property-check cases");
  kernel->add_option("--fd-seeds", kernel_args.fd_seeds,
                     "Finite-difference seeds");
  kernel->add_flag("--inject-fault", kernel_args.inject_fault,
                   "Corrupt a parameter to prove the check can fail");

  CLI11_PARSE(app, argc, argv);

  if (convert->parsed()) {
    if (conv_seed->count()) convert_args.seed = seed_opt;
    if (conv_alpha->count()) convert_args.alpha = alpha_opt;
    if (conv_patch->count()) convert_args.patch_px = patch_opt;
    return rsvp::cli::cmd_convert(convert_args, std::cout, std::cerr);
  }
  if (render->parsed())
    return rsvp::cli::cmd_render(render_args, std::cout, std::cerr);
  if (annotate->parsed())
    return rsvp::cli::cmd_annotate(annotate_args, std::cout, std::cerr);
  if (eval->parsed()) {
    std::stringstream ss(metrics_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) eval_args.metrics.push_back(item);
    return rsvp::cli::cmd_eval(eval_args, std::cout, std::cerr);
  }
  if (kernel->parsed())
    return rsvp::cli::cmd_kernel_check(kernel_args, std::cout, std::cerr);
  return 2;
}
