#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rsvp/geometry.hpp"

namespace rsvp {

enum class Modality { optical, sar, infrared, natural };

const char* to_string(Modality m);
Modality modality_from_string(const std::string& name);

enum class TaskKind {
  image_caption_brief,
  image_caption_detailed,
  scene_classification,
  referring_object_classification,
  region_caption_brief,
  region_caption_detailed,
  relationship_analysis,
  summary_caption,
};

const char* to_string(TaskKind t);
TaskKind task_kind_from_string(const std::string& name);
const std::vector<TaskKind>& all_task_kinds();

bool is_image_level_task(TaskKind t);

// One image / visual-prompt / text sample, the corpus unit.
struct Triple {
  std::string id;
  std::string image_path;
  int width = 0;
  int height = 0;
  Modality modality = Modality::optical;
  TaskKind task = TaskKind::referring_object_classification;
  std::vector<VisualPrompt> prompts;
  std::string question;
  std::string answer;
};

bool operator==(const Triple& a, const Triple& b);

// Mark ids referenced as "<Mark n>" or "<Region n>" in a text.
std::set<int> referenced_marks(const std::string& text);

// Checks every Triple invariant: non-empty prompts, distinct mark ids >= 1,
// payloads matching their kind, positive image size, full-image payload equal
// to the image rect, and all referenced marks present. Throws
// std::invalid_argument with the violated condition.
void validate_triple(const Triple& t);

// Ground-truth detection annotations for one image.
struct AnnotationRecord {
  struct Instance {
    std::string category;
    BBox box;
  };
  std::string id;
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<Instance> instances;
};

// Per-pixel class-id raster with a legend.
struct SegmentationMap {
  int width = 0;
  int height = 0;
  std::vector<int> class_ids;  // row-major, length width*height
  std::map<int, std::string> legend;
  int ignore_id = 255;

  int class_at(int x, int y) const { return class_ids[std::size_t(y) * width + x]; }
  // Throws LegendError for a non-ignore id missing from the legend.
  const std::string& class_name(int id) const;
};

}  // namespace rsvp
