#include "rsvp/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rsvp/errors.hpp"
#include "rsvp/png_io.hpp"
#include "rsvp/triple_io.hpp"

namespace fs = std::filesystem;

namespace rsvp {
namespace {

nlohmann::json parse_json(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what(), e.byte);
  }
}

std::string id_as_string(const nlohmann::json& j, const char* path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<int64_t>());
  throw SchemaError(path, "expected a string or integer id");
}

BBox bbox_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4)
    throw SchemaError(path, "expected [x, y, w, h]");
  for (const auto& v : j)
    if (!v.is_number()) throw SchemaError(path, "expected numbers");
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>()};
}

// Clamps an instance box into the image, warning when it had to change.
BBox clamp_with_warning(const BBox& b, int w, int h, const std::string& where,
                        std::vector<std::string>* warnings) {
  ClampResult r = clamp_box(b, w, h);
  if (warnings && !(r.box == b)) {
    std::ostringstream msg;
    msg << where << ": box [" << b.x << ", " << b.y << ", " << b.w << ", "
        << b.h << "] clamped to image " << w << "x" << h;
    if (r.degenerate) msg << " (no overlap; reduced to a 1x1 stub)";
    warnings->push_back(msg.str());
  }
  return r.box;
}

std::vector<int> mark_ids_of(const std::vector<VisualPrompt>& prompts) {
  std::vector<int> ids;
  ids.reserve(prompts.size());
  for (const auto& p : prompts) ids.push_back(p.mark_id);
  return ids;
}

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

std::string resolve(const std::string& base, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base) / p).string();
}

}  // namespace

std::vector<AnnotationRecord> parse_canonical_detection(
    const std::string& json_text, std::vector<std::string>* warnings) {
  nlohmann::json j = parse_json(json_text, "canonical detection");
  if (!j.is_object() || !j.contains("images") || !j["images"].is_array())
    throw SchemaError("images", "missing or not an array");
  std::vector<AnnotationRecord> out;
  size_t i = 0;
  for (const auto& img : j["images"]) {
    std::string path = "images[" + std::to_string(i++) + "]";
    if (!img.is_object()) throw SchemaError(path, "expected an object");
    AnnotationRecord rec;
    if (!img.contains("id")) throw SchemaError(path + ".id", "missing");
    rec.id = id_as_string(img["id"], (path + ".id").c_str());
    if (!img.contains("file") || !img["file"].is_string())
      throw SchemaError(path + ".file", "missing or not a string");
    rec.image_path = img["file"].get<std::string>();
    if (!img.contains("width") || !img.contains("height") ||
        !img["width"].is_number_integer() || !img["height"].is_number_integer())
      throw SchemaError(path + ".width/height", "missing or not integers");
    rec.width = img["width"].get<int>();
    rec.height = img["height"].get<int>();
    if (rec.width <= 0 || rec.height <= 0)
      throw SchemaError(path + ".width/height", "must be positive");
    if (!img.contains("instances") || !img["instances"].is_array())
      throw SchemaError(path + ".instances", "missing or not an array");
    size_t k = 0;
    for (const auto& inst : img["instances"]) {
      std::string ipath = path + ".instances[" + std::to_string(k++) + "]";
      if (!inst.is_object() || !inst.contains("category") ||
          !inst["category"].is_string())
        throw SchemaError(ipath + ".category", "missing or not a string");
      if (!inst.contains("bbox"))
        throw SchemaError(ipath + ".bbox", "missing");
      BBox raw = bbox_from_json(inst["bbox"], ipath + ".bbox");
      AnnotationRecord::Instance out_inst;
      out_inst.category = inst["category"].get<std::string>();
      out_inst.box = clamp_with_warning(raw, rec.width, rec.height,
                                        rec.id + "/" + ipath, warnings);
      rec.instances.push_back(std::move(out_inst));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AnnotationRecord> parse_coco_detection(
    const std::string& json_text, std::vector<std::string>* warnings) {
  nlohmann::json j = parse_json(json_text, "coco detection");
  for (const char* key : {"images", "annotations", "categories"})
    if (!j.is_object() || !j.contains(key) || !j[key].is_array())
      throw SchemaError(key, "missing or not an array");

  std::map<int64_t, std::string> categories;
  size_t i = 0;
  for (const auto& c : j["categories"]) {
    std::string path = "categories[" + std::to_string(i++) + "]";
    if (!c.is_object() || !c.contains("id") || !c["id"].is_number_integer() ||
        !c.contains("name") || !c["name"].is_string())
      throw SchemaError(path, "expected {id: int, name: string}");
    categories[c["id"].get<int64_t>()] = c["name"].get<std::string>();
  }

  std::map<int64_t, AnnotationRecord> by_image;
  std::vector<int64_t> order;
  i = 0;
  for (const auto& img : j["images"]) {
    std::string path = "images[" + std::to_string(i++) + "]";
    if (!img.is_object() || !img.contains("id") ||
        !img["id"].is_number_integer())
      throw SchemaError(path + ".id", "missing or not an integer");
    int64_t id = img["id"].get<int64_t>();
    AnnotationRecord rec;
    rec.id = std::to_string(id);
    if (!img.contains("file_name") || !img["file_name"].is_string())
      throw SchemaError(path + ".file_name", "missing or not a string");
    rec.image_path = img["file_name"].get<std::string>();
    if (!img.contains("width") || !img.contains("height") ||
        !img["width"].is_number_integer() || !img["height"].is_number_integer())
      throw SchemaError(path + ".width/height", "missing or not integers");
    rec.width = img["width"].get<int>();
    rec.height = img["height"].get<int>();
    if (rec.width <= 0 || rec.height <= 0)
      throw SchemaError(path + ".width/height", "must be positive");
    if (!by_image.emplace(id, std::move(rec)).second)
      throw SchemaError(path + ".id", "duplicate image id");
    order.push_back(id);
  }

  i = 0;
  for (const auto& ann : j["annotations"]) {
    std::string path = "annotations[" + std::to_string(i++) + "]";
    if (!ann.is_object() || !ann.contains("image_id") ||
        !ann["image_id"].is_number_integer())
      throw SchemaError(path + ".image_id", "missing or not an integer");
    auto it = by_image.find(ann["image_id"].get<int64_t>());
    if (it == by_image.end())
      throw SchemaError(path + ".image_id", "unknown image id");
    if (!ann.contains("category_id") || !ann["category_id"].is_number_integer())
      throw SchemaError(path + ".category_id", "missing or not an integer");
    auto cat = categories.find(ann["category_id"].get<int64_t>());
    if (cat == categories.end())
      throw SchemaError(path + ".category_id", "unknown category id");
    if (!ann.contains("bbox")) throw SchemaError(path + ".bbox", "missing");
    BBox raw = bbox_from_json(ann["bbox"], path + ".bbox");
    AnnotationRecord::Instance inst;
    inst.category = cat->second;
    inst.box = clamp_with_warning(raw, it->second.width, it->second.height,
                                  it->second.id + "/" + path, warnings);
    it->second.instances.push_back(std::move(inst));
  }

  std::vector<AnnotationRecord> out;
  out.reserve(order.size());
  for (int64_t id : order) out.push_back(std::move(by_image.at(id)));
  return out;
}

SegmentationMap parse_segmentation(const std::vector<uint8_t>& raster_png,
                                   const std::string& legend_json) {
  nlohmann::json j = parse_json(legend_json, "legend");
  if (!j.is_object() || !j.contains("classes") || !j["classes"].is_object())
    throw SchemaError("classes", "missing or not an object");
  SegmentationMap seg;
  if (j.contains("ignore_id")) {
    if (!j["ignore_id"].is_number_integer())
      throw SchemaError("ignore_id", "expected an integer");
    seg.ignore_id = j["ignore_id"].get<int>();
  }
  for (const auto& [key, value] : j["classes"].items()) {
    int id = 0;
    try {
      size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw SchemaError("classes." + key, "key is not an integer id");
    }
    if (!value.is_string())
      throw SchemaError("classes." + key, "name must be a string");
    seg.legend[id] = value.get<std::string>();
  }

  Image img = decode_png(raster_png);
  seg.width = img.width();
  seg.height = img.height();
  seg.class_ids.resize(static_cast<size_t>(seg.width) * seg.height);
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      Rgb px = img.at(x, y);
      if (px.g != px.r || px.b != px.r)
        throw ParseError("segmentation raster is not single-channel at (" +
                         std::to_string(x) + ", " + std::to_string(y) + ")");
      int id = px.r;
      if (id != seg.ignore_id && !seg.legend.count(id))
        throw LegendError("class id " + std::to_string(id) + " at (" +
                          std::to_string(x) + ", " + std::to_string(y) +
                          ") missing from legend");
      seg.class_ids[static_cast<size_t>(y) * seg.width + x] = id;
    }
  }
  return seg;
}

std::vector<ImageLevelItem> parse_image_level(const std::string& json_text) {
  nlohmann::json j = parse_json(json_text, "image-level source");
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
    throw SchemaError("items", "missing or not an array");
  std::vector<ImageLevelItem> out;
  size_t i = 0;
  for (const auto& item : j["items"]) {
    std::string path = "items[" + std::to_string(i++) + "]";
    if (!item.is_object()) throw SchemaError(path, "expected an object");
    ImageLevelItem it;
    if (!item.contains("id")) throw SchemaError(path + ".id", "missing");
    it.id = id_as_string(item["id"], (path + ".id").c_str());
    if (!item.contains("file") || !item["file"].is_string())
      throw SchemaError(path + ".file", "missing or not a string");
    it.file = item["file"].get<std::string>();
    if (!item.contains("width") || !item.contains("height") ||
        !item["width"].is_number_integer() ||
        !item["height"].is_number_integer())
      throw SchemaError(path + ".width/height", "missing or not integers");
    it.width = item["width"].get<int>();
    it.height = item["height"].get<int>();
    if (!item.contains("text") || !item["text"].is_string())
      throw SchemaError(path + ".text", "missing or not a string");
    it.text = item["text"].get<std::string>();
    out.push_back(std::move(it));
  }
  return out;
}

Triple build_box_triple(const AnnotationRecord& rec,
                        const TemplateSet& templates, const AugmentConfig& cfg,
                        Modality modality, Rng& rng) {
  if (rec.instances.empty())
    throw std::invalid_argument("record '" + rec.id + "' has no instances");
  Triple t;
  t.id = rec.id + ":box";
  t.image_path = rec.image_path;
  t.width = rec.width;
  t.height = rec.height;
  t.modality = modality;
  t.task = TaskKind::referring_object_classification;

  std::string tpl = select_instruction(t.task, templates, rng,
                                       PromptFlavor::region);
  std::ostringstream answer;
  int mark = 1;
  for (const auto& inst : rec.instances) {
    BBox noisy = augment_box(inst.box, cfg, rng, rec.width, rec.height);
    t.prompts.push_back(make_box_prompt(mark, noisy));
    if (mark > 1) answer << '\n';
    answer << "<Region " << mark << ">: " << inst.category;
    ++mark;
  }
  t.question = render_instruction(tpl, mark_ids_of(t.prompts));
  t.answer = answer.str();
  validate_triple(t);
  return t;
}

std::vector<Triple> build_box_triples(
    const std::vector<AnnotationRecord>& records, const TemplateSet& templates,
    const AugmentConfig& cfg, Modality modality, uint64_t seed,
    std::vector<std::string>* warnings) {
  std::vector<Triple> out;
  for (const auto& rec : records) {
    if (rec.instances.empty()) {
      if (warnings)
        warnings->push_back("record '" + rec.id +
                            "' has no instances; skipped");
      continue;
    }
    Rng rng = Rng::derive(seed, rec.id + ":box");
    out.push_back(build_box_triple(rec, templates, cfg, modality, rng));
  }
  return out;
}

std::vector<Triple> build_point_triples(
    const SegmentationMap& seg, const std::string& id,
    const std::string& image_path, const TemplateSet& templates, int patch_px,
    Modality modality, Rng& rng, std::vector<std::string>* warnings) {
  std::string tpl =
      select_instruction(TaskKind::referring_object_classification, templates,
                         rng, PromptFlavor::point);
  std::vector<LabeledPoint> points = sample_patch_points(seg, patch_px, rng);
  if (points.empty()) {
    if (warnings)
      warnings->push_back("map '" + id +
                          "': every sampled point hit ignore_id; skipped");
    return {};
  }
  Triple t;
  t.id = id + ":points";
  t.image_path = image_path;
  t.width = seg.width;
  t.height = seg.height;
  t.modality = modality;
  t.task = TaskKind::referring_object_classification;
  std::ostringstream answer;
  int mark = 1;
  for (const auto& lp : points) {
    t.prompts.push_back(make_point_prompt(mark, lp.point));
    if (mark > 1) answer << '\n';
    answer << "<Mark " << mark << ">: " << lp.category;
    ++mark;
  }
  t.question = render_instruction(tpl, mark_ids_of(t.prompts));
  t.answer = answer.str();
  validate_triple(t);
  return {t};
}

Triple build_image_level_triple(const std::string& id,
                                const std::string& image_path, int width,
                                int height, Modality modality, TaskKind task,
                                const std::string& text,
                                const TemplateSet& templates, Rng& rng) {
  if (!is_image_level_task(task))
    throw std::invalid_argument("task '" + std::string(to_string(task)) +
                                "' is not image-level");
  if (text.empty()) throw std::invalid_argument("empty image-level text");
  Triple t;
  t.id = id + ":" + to_string(task);
  t.image_path = image_path;
  t.width = width;
  t.height = height;
  t.modality = modality;
  t.task = task;
  t.prompts.push_back(full_image_box(width, height));
  std::string tpl = select_instruction(task, templates, rng);
  t.question = render_instruction(tpl, mark_ids_of(t.prompts));
  t.answer = text;
  validate_triple(t);
  return t;
}

const std::vector<std::string>& registered_adapters() {
  static const std::vector<std::string> kAdapters = {
      "canonical", "coco", "segmentation", "image_level"};
  return kAdapters;
}

CorpusManifest parse_manifest(const std::string& json_text) {
  nlohmann::json j = parse_json(json_text, "manifest");
  if (!j.is_object()) throw SchemaError("$", "manifest must be an object");
  CorpusManifest m;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer())
      throw SchemaError("seed", "expected an integer");
    m.seed = j["seed"].get<uint64_t>();
  }
  if (!j.contains("output") || !j["output"].is_string())
    throw SchemaError("output", "missing or not a string");
  m.output = j["output"].get<std::string>();
  if (!j.contains("entries") || !j["entries"].is_array())
    throw SchemaError("entries", "missing or not an array");
  size_t i = 0;
  for (const auto& e : j["entries"]) {
    std::string path = "entries[" + std::to_string(i++) + "]";
    if (!e.is_object()) throw SchemaError(path, "expected an object");
    ManifestEntry entry;
    if (!e.contains("source") || !e["source"].is_string())
      throw SchemaError(path + ".source", "missing or not a string");
    entry.source = e["source"].get<std::string>();
    if (!e.contains("adapter") || !e["adapter"].is_string())
      throw SchemaError(path + ".adapter", "missing or not a string");
    entry.adapter = e["adapter"].get<std::string>();
    const auto& known = registered_adapters();
    if (std::find(known.begin(), known.end(), entry.adapter) == known.end())
      throw SchemaError(path + ".adapter",
                        "unknown adapter '" + entry.adapter + "'");
    if (!e.contains("modality") || !e["modality"].is_string())
      throw SchemaError(path + ".modality", "missing or not a string");
    entry.modality = modality_from_string(e["modality"].get<std::string>());
    if (e.contains("task")) {
      if (!e["task"].is_string())
        throw SchemaError(path + ".task", "expected a string");
      entry.task = task_kind_from_string(e["task"].get<std::string>());
    }
    if (entry.adapter == "segmentation") {
      if (!e.contains("legend") || !e["legend"].is_string())
        throw SchemaError(path + ".legend",
                          "segmentation entries need a legend path");
      entry.legend = e["legend"].get<std::string>();
    }
    if (e.contains("alpha")) {
      if (!e["alpha"].is_number())
        throw SchemaError(path + ".alpha", "expected a number");
      entry.alpha = e["alpha"].get<double>();
      if (entry.alpha < 0.0)
        throw SchemaError(path + ".alpha", "must be non-negative");
    }
    if (e.contains("patch_px")) {
      if (!e["patch_px"].is_number_integer())
        throw SchemaError(path + ".patch_px", "expected an integer");
      entry.patch_px = e["patch_px"].get<int>();
      if (entry.patch_px < 1)
        throw SchemaError(path + ".patch_px", "must be >= 1");
    }
    if (entry.adapter == "image_level" && !is_image_level_task(entry.task))
      throw SchemaError(path + ".task", "image_level entries need an "
                                        "image-level task");
    m.entries.push_back(std::move(entry));
  }
  return m;
}

BuildResult build_corpus(const CorpusManifest& manifest,
                         const std::string& base_dir, bool write_output) {
  BuildResult result;
  TemplateSet templates = TemplateSet::defaults();
  for (const auto& entry : manifest.entries) {
    std::string source = resolve(base_dir, entry.source);
    if (entry.adapter == "canonical" || entry.adapter == "coco") {
      auto records = entry.adapter == "canonical"
                         ? parse_canonical_detection(read_file(source),
                                                     &result.warnings)
                         : parse_coco_detection(read_file(source),
                                                &result.warnings);
      AugmentConfig cfg;
      cfg.alpha = entry.alpha;
      auto triples = build_box_triples(records, templates, cfg, entry.modality,
                                       manifest.seed, &result.warnings);
      for (auto& t : triples) result.triples.push_back(std::move(t));
    } else if (entry.adapter == "segmentation") {
      std::string legend = resolve(base_dir, entry.legend);
      SegmentationMap seg =
          parse_segmentation(read_file_bytes(source), read_file(legend));
      std::string id = fs::path(entry.source).stem().string();
      Rng rng = Rng::derive(manifest.seed, id + ":points");
      auto triples =
          build_point_triples(seg, id, entry.source, templates, entry.patch_px,
                              entry.modality, rng, &result.warnings);
      for (auto& t : triples) result.triples.push_back(std::move(t));
    } else if (entry.adapter == "image_level") {
      for (const auto& item : parse_image_level(read_file(source))) {
        Rng rng = Rng::derive(manifest.seed,
                              item.id + ":" + to_string(entry.task));
        result.triples.push_back(build_image_level_triple(
            item.id, item.file, item.width, item.height, entry.modality,
            entry.task, item.text, templates, rng));
      }
    }
  }
  if (write_output) {
    std::string out_path = resolve(base_dir, manifest.output);
    write_triples_file(out_path, result.triples);
  }
  return result;
}

}  // namespace rsvp
