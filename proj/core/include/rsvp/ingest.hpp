#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvp/prompt_synth.hpp"
#include "rsvp/templates.hpp"
#include "rsvp/triple.hpp"

namespace rsvp {

// Canonical detection JSON:
//   {"images":[{"id","file","width","height",
//               "instances":[{"category","bbox":[x,y,w,h]}]}]}
// Out-of-bounds boxes are clamped with a note in `warnings`.
std::vector<AnnotationRecord> parse_canonical_detection(
    const std::string& json_text, std::vector<std::string>* warnings = nullptr);

// COCO-style instance JSON ({"images","annotations","categories"}), mapped
// onto the same records. Boxes are clamped like the canonical path.
std::vector<AnnotationRecord> parse_coco_detection(
    const std::string& json_text, std::vector<std::string>* warnings = nullptr);

// Raster: a grayscale (or gray-as-RGB) PNG of class ids. Legend JSON:
// {"ignore_id": int, "classes": {"<id>": "<name>", ...}}. Every id present
// in the raster must be in the legend or equal ignore_id.
SegmentationMap parse_segmentation(const std::vector<uint8_t>& raster_png,
                                   const std::string& legend_json);

struct ImageLevelItem {
  std::string id;
  std::string file;
  int width = 0;
  int height = 0;
  std::string text;
};

// {"items":[{"id","file","width","height","text"}]}
std::vector<ImageLevelItem> parse_image_level(const std::string& json_text);

// One referring_object_classification triple per record: noisy ground-truth
// boxes as prompts (mark ids 1..n in instance order), a region-flavored
// instruction, and "<Region n>: category" answer lines.
Triple build_box_triple(const AnnotationRecord& rec,
                        const TemplateSet& templates, const AugmentConfig& cfg,
                        Modality modality, Rng& rng);

// List form. Per-record determinism comes from deriving each record's rng
// from (seed, triple id), so the output is independent of build order.
// Records without instances are skipped with a warning.
std::vector<Triple> build_box_triples(
    const std::vector<AnnotationRecord>& records, const TemplateSet& templates,
    const AugmentConfig& cfg, Modality modality, uint64_t seed,
    std::vector<std::string>* warnings = nullptr);

// One triple per map: one point sampled per patch_px cell, labeled by the
// class under it. Returns nothing (with a warning) when every sampled point
// lands on ignore_id.
std::vector<Triple> build_point_triples(
    const SegmentationMap& seg, const std::string& id,
    const std::string& image_path, const TemplateSet& templates, int patch_px,
    Modality modality, Rng& rng, std::vector<std::string>* warnings = nullptr);

// Image-level tasks carry the whole image as a single full-image box prompt.
Triple build_image_level_triple(const std::string& id,
                                const std::string& image_path, int width,
                                int height, Modality modality, TaskKind task,
                                const std::string& text,
                                const TemplateSet& templates, Rng& rng);

struct ManifestEntry {
  std::string source;
  std::string adapter;  // canonical | coco | segmentation | image_level
  Modality modality = Modality::optical;
  TaskKind task = TaskKind::referring_object_classification;
  std::string legend;    // segmentation only
  double alpha = 0.1;    // detection adapters
  int patch_px = 32;     // segmentation adapter
};

struct CorpusManifest {
  uint64_t seed = 0;
  std::string output;
  std::vector<ManifestEntry> entries;
};

const std::vector<std::string>& registered_adapters();
CorpusManifest parse_manifest(const std::string& json_text);

struct BuildResult {
  std::vector<Triple> triples;
  std::vector<std::string> warnings;
};

// Executes the manifest end to end. Relative source/legend/output paths
// resolve against base_dir. A fixed (manifest, seed) pair always rebuilds a
// byte-identical output file.
BuildResult build_corpus(const CorpusManifest& manifest,
                         const std::string& base_dir = ".",
                         bool write_output = true);

}  // namespace rsvp
