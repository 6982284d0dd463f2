#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rsvp/annotate.hpp"
#include "rsvp/errors.hpp"
#include "rsvp/fusion.hpp"
#include "rsvp/ingest.hpp"
#include "rsvp/metrics.hpp"
#include "rsvp/render.hpp"
#include "rsvp/rng.hpp"
#include "rsvp/triple_io.hpp"

namespace fs = std::filesystem;

namespace rsvp::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
}

void emit_warnings(const std::vector<std::string>& warnings,
                   std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::string sanitize_id(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '.' && c != '-' && c != '_') c = '_';
  }
  return out;
}

int finish(bool strict, size_t problem_count) {
  return (strict && problem_count > 0) ? 1 : 0;
}

}  // namespace

int cmd_convert(const ConvertArgs& args, std::ostream& out, std::ostream& err) {
  try {
    CorpusManifest manifest = parse_manifest(read_file(args.manifest));
    if (args.seed) manifest.seed = *args.seed;
    if (!args.output.empty()) manifest.output = args.output;
    for (auto& entry : manifest.entries) {
      if (args.alpha) entry.alpha = *args.alpha;
      if (args.patch_px) entry.patch_px = *args.patch_px;
    }
    std::string base_dir = fs::path(args.manifest).parent_path().string();
    if (base_dir.empty()) base_dir = ".";
    BuildResult result = build_corpus(manifest, base_dir);
    emit_warnings(result.warnings, err);

    std::map<std::string, int> by_task, by_modality;
    for (const auto& t : result.triples) {
      ++by_task[to_string(t.task)];
      ++by_modality[to_string(t.modality)];
    }
    nlohmann::ordered_json summary;
    summary["command"] = "convert";
    summary["output"] = manifest.output;
    summary["seed"] = manifest.seed;
    summary["triples"] = result.triples.size();
    summary["by_task"] = by_task;
    summary["by_modality"] = by_modality;
    summary["warnings"] = result.warnings.size();
    out << summary.dump(2) << '\n';
    return finish(args.strict, result.warnings.size());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_render(const RenderArgs& args, std::ostream& out, std::ostream& err) {
  try {
    auto triples = read_triples_file(args.triples);
    RenderStyle style = default_style();
    style.stroke_width = args.stroke_width;
    style.label_scale = args.label_scale;
    style.point_radius = args.point_radius;
    validate(style);
    fs::create_directories(args.out_dir);

    size_t rendered = 0;
    std::vector<std::string> item_errors;
    std::vector<std::string> warnings;
    for (const auto& t : triples) {
      std::string src = (fs::path(args.images_dir) / t.image_path).string();
      try {
        auto png = read_file_bytes(src);
        auto bytes = render_triple(t, png, style, &warnings);
        std::string dst =
            (fs::path(args.out_dir) / (sanitize_id(t.id) + ".png")).string();
        std::ofstream f(dst, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + dst);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        ++rendered;
      } catch (const std::exception& e) {
        item_errors.push_back(t.id + ": " + e.what());
      }
    }
    emit_warnings(warnings, err);
    for (const auto& e : item_errors) err << "error: " << e << '\n';

    nlohmann::ordered_json summary;
    summary["command"] = "render";
    summary["out_dir"] = args.out_dir;
    summary["rendered"] = rendered;
    summary["errors"] = item_errors.size();
    summary["warnings"] = warnings.size();
    out << summary.dump(2) << '\n';
    return finish(args.strict, item_errors.size() + warnings.size());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_annotate(const AnnotateArgs& args, std::ostream& out,
                 std::ostream& err) {
  try {
    AnnotationTask task;
    if (args.template_name == "brief")
      task = AnnotationTask::brief_caption;
    else if (args.template_name == "detailed")
      task = AnnotationTask::detailed_caption;
    else if (args.template_name == "relationship")
      task = AnnotationTask::relationship_analysis;
    else {
      err << "error: unknown template '" << args.template_name
          << "' (expected brief|detailed|relationship)\n";
      return 2;
    }

    std::unique_ptr<Provider> provider;
    if (args.provider == "mock") {
      provider = std::make_unique<MockProvider>();
    } else if (args.provider == "http") {
      provider = std::make_unique<HttpProvider>(http_config_from_env());
    } else {
      err << "error: unknown provider '" << args.provider
          << "' (expected mock|http)\n";
      return 2;
    }

    auto triples = read_triples_file(args.triples);
    AnnotationTemplate tpl = AnnotationTemplate::defaults_for(task);
    RenderStyle style = default_style();

    std::vector<AnnotationRequest> requests;
    std::map<std::string, std::string> prompts_by_id;
    std::vector<std::string> item_errors;
    for (const auto& t : triples) {
      try {
        std::string src = (fs::path(args.images_dir) / t.image_path).string();
        auto png = read_file_bytes(src);
        AnnotationRequest req =
            build_request(t, png, tpl, style, categories_from_answer(t));
        prompts_by_id[req.triple_id] = req.prompt_text;
        requests.push_back(std::move(req));
      } catch (const std::exception& e) {
        item_errors.push_back(t.id + ": " + e.what());
      }
    }
    for (const auto& e : item_errors) err << "error: " << e << '\n';
    if (args.strict && !item_errors.empty()) return 1;

    auto results = annotate_all(requests, *provider, args.threads);

    std::ofstream f(args.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + args.output);
    for (const auto& r : results) {
      nlohmann::ordered_json j;
      j["triple_id"] = r.triple_id;
      j["text"] = r.text;
      j["provider"] = r.provider;
      j["latency_ms"] = r.latency_ms;
      j["prompt"] = prompts_by_id.at(r.triple_id);
      f << j.dump() << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + args.output);

    nlohmann::ordered_json summary;
    summary["command"] = "annotate";
    summary["output"] = args.output;
    summary["provider"] = args.provider;
    summary["annotated"] = results.size();
    summary["errors"] = item_errors.size();
    out << summary.dump(2) << '\n';
    return finish(args.strict, item_errors.size());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kKnown = {
      "bleu-1", "bleu-2", "bleu-3",  "bleu-4",  "rouge-l",
      "rouge-1", "cider", "ss", "s_iou", "accuracy", "accuracy-semantic"};
  try {
    if (args.metrics.empty()) {
      err << "error: no metrics requested\n";
      return 2;
    }
    for (const auto& m : args.metrics) {
      if (std::find(kKnown.begin(), kKnown.end(), m) == kKnown.end()) {
        err << "error: unknown metric '" << m << "'\n";
        return 2;
      }
    }
    bool needs_embeddings = false;
    for (const auto& m : args.metrics)
      if (m == "ss" || m == "s_iou" || m == "accuracy-semantic")
        needs_embeddings = true;
    EmbeddingTable table;
    if (needs_embeddings) {
      if (args.embeddings.empty()) {
        err << "error: ss/s_iou/accuracy-semantic need --embeddings\n";
        return 2;
      }
      std::vector<std::string> warn;
      table = load_embeddings_file(args.embeddings, &warn);
      emit_warnings(warn, err);
    }
    MetricConfig cfg;
    cfg.tau = args.tau;
    validate(cfg);

    auto preds = read_id_text_jsonl(args.pred);
    auto gts = read_id_text_jsonl(args.gt);
    std::map<std::string, std::string> pred_by_id;
    for (auto& [id, text] : preds) pred_by_id[id] = text;

    std::vector<std::string> ids;
    std::vector<std::string> p_texts, g_texts;
    size_t missing = 0;
    for (const auto& [id, text] : gts) {
      auto it = pred_by_id.find(id);
      if (it == pred_by_id.end()) {
        err << "warning: no prediction for id '" << id << "'\n";
        ++missing;
        continue;
      }
      ids.push_back(id);
      p_texts.push_back(it->second);
      g_texts.push_back(text);
    }
    if (args.strict && missing > 0) return 1;
    if (ids.empty()) {
      err << "error: no overlapping ids between pred and gt\n";
      return 1;
    }

    std::vector<ScoreReport> reports;
    for (const auto& m : args.metrics) {
      std::vector<double> scores(ids.size());
      if (m.rfind("bleu-", 0) == 0) {
        int n = m[5] - '0';
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = bleu_n(p_texts[i], {g_texts[i]}, n, cfg);
      } else if (m == "rouge-l") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = rouge_l(p_texts[i], g_texts[i], cfg);
      } else if (m == "rouge-1") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = rouge_1(p_texts[i], g_texts[i], cfg);
      } else if (m == "cider") {
        std::vector<std::vector<std::string>> refs;
        refs.reserve(ids.size());
        for (const auto& g : g_texts) refs.push_back({g});
        scores = cider(p_texts, refs, cfg).per_item;
      } else if (m == "ss") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = ss(p_texts[i], g_texts[i], table, cfg);
      } else if (m == "s_iou") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = s_iou(p_texts[i], g_texts[i], table, cfg);
      } else if (m == "accuracy") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] = accuracy({p_texts[i]}, {g_texts[i]}, cfg);
      } else if (m == "accuracy-semantic") {
        for (size_t i = 0; i < ids.size(); ++i)
          scores[i] =
              accuracy_semantic({p_texts[i]}, {g_texts[i]}, table, cfg);
      }
      reports.push_back(make_report(m, ids, std::move(scores)));
    }

    nlohmann::ordered_json j;
    j["command"] = "eval";
    j["n"] = ids.size();
    j["tau"] = cfg.tau;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    j["reports"] = std::move(arr);
    out << j.dump(2) << '\n';
    err << format_report_table(reports);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_kernel_check(const KernelArgs& args, std::ostream& out,
                     std::ostream& err) {
  try {
    KernelConfig cfg;
    cfg.seed = args.seed;
    cfg.d_v = args.d_v;
    cfg.d_l = args.d_l;
    cfg.patch = args.patch;
    validate(cfg);

    KernelCheckReport rep = kernel_check(cfg, args.cases, args.fd_seeds);

    // Fault injection: corrupt one parameter after taking the analytic
    // gradients, then re-derive the finite differences. The mismatch must be
    // flagged, proving the harness can actually fail.
    if (args.inject_fault) {
      KernelConfig local = cfg;
      local.d_v = 8;
      local.patch = 2;
      FusionParams params = init_fusion_params(local);
      Rng rng(local.seed ^ 0xfa011ull);
      Tensor2D V_img(4, 8), E_prompt(3, 8);
      for (double& v : V_img.data) v = rng.gaussian(0.0, 0.5);
      for (double& v : E_prompt.data) v = rng.gaussian(0.0, 0.5);
      FusionGradients analytic =
          fuse_backward(V_img, E_prompt, params, LossStage::hybrid);
      std::vector<double> base = param_vector(params);
      std::vector<double> grads = param_vector(analytic.params);
      // Corrupt the largest-gradient parameter so the break is visible.
      size_t worst_i = 0;
      for (size_t i = 0; i < grads.size(); ++i)
        if (std::abs(grads[i]) > std::abs(grads[worst_i])) worst_i = i;
      FusionParams corrupted = params;
      std::vector<double> cbase = base;
      cbase[worst_i] += 0.25;
      set_param_vector(corrupted, cbase);
      FusionGradients broken =
          fuse_backward(V_img, E_prompt, corrupted, LossStage::hybrid);
      std::vector<double> bgrads = param_vector(broken.params);
      const double h = 1e-5;
      std::vector<double> probe = base;
      probe[worst_i] = base[worst_i] + h;
      set_param_vector(params, probe);
      double up = fuse_loss(V_img, E_prompt, params, LossStage::hybrid);
      probe[worst_i] = base[worst_i] - h;
      set_param_vector(params, probe);
      double down = fuse_loss(V_img, E_prompt, params, LossStage::hybrid);
      double fd = (up - down) / (2.0 * h);
      double rel = std::abs(bgrads[worst_i] - fd) /
                   std::max({1.0, std::abs(bgrads[worst_i]), std::abs(fd)});
      rep.max_fd_rel_err = std::max(rep.max_fd_rel_err, rel);
      if (rel >= 1e-4) rep.pass = false;
      err << "fault injection: corrupted parameter " << worst_i
          << ", fd mismatch " << rel << '\n';
    }

    nlohmann::ordered_json j;
    j["command"] = "kernel-check";
    j["seed"] = args.seed;
    j["cases"] = rep.cases;
    j["fd_seeds"] = rep.fd_seeds;
    j["max_softmax_row_err"] = rep.max_softmax_row_err;
    j["max_self_perm_err"] = rep.max_self_perm_err;
    j["max_cross_perm_err"] = rep.max_cross_perm_err;
    j["max_fd_rel_err"] = rep.max_fd_rel_err;
    j["shape_ok"] = rep.shape_ok;
    j["elapsed_s"] = rep.elapsed_s;
    j["pass"] = rep.pass;
    out << j.dump(2) << '\n';
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rsvp::cli
