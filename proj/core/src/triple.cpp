#include "rsvp/triple.hpp"

#include <regex>
#include <stdexcept>

#include "rsvp/errors.hpp"

namespace rsvp {

const char* to_string(Modality m) {
  switch (m) {
    case Modality::optical: return "optical";
    case Modality::sar: return "sar";
    case Modality::infrared: return "infrared";
    case Modality::natural: return "natural";
  }
  return "optical";
}

Modality modality_from_string(const std::string& name) {
  if (name == "optical") return Modality::optical;
  if (name == "sar") return Modality::sar;
  if (name == "infrared") return Modality::infrared;
  if (name == "natural") return Modality::natural;
  throw std::invalid_argument("unknown modality: " + name);
}

const char* to_string(TaskKind t) {
  switch (t) {
    case TaskKind::image_caption_brief: return "image_caption_brief";
    case TaskKind::image_caption_detailed: return "image_caption_detailed";
    case TaskKind::scene_classification: return "scene_classification";
    case TaskKind::referring_object_classification:
      return "referring_object_classification";
    case TaskKind::region_caption_brief: return "region_caption_brief";
    case TaskKind::region_caption_detailed: return "region_caption_detailed";
    case TaskKind::relationship_analysis: return "relationship_analysis";
    case TaskKind::summary_caption: return "summary_caption";
  }
  return "referring_object_classification";
}

const std::vector<TaskKind>& all_task_kinds() {
  static const std::vector<TaskKind> kinds = {
      TaskKind::image_caption_brief,
      TaskKind::image_caption_detailed,
      TaskKind::scene_classification,
      TaskKind::referring_object_classification,
      TaskKind::region_caption_brief,
      TaskKind::region_caption_detailed,
      TaskKind::relationship_analysis,
      TaskKind::summary_caption,
  };
  return kinds;
}

TaskKind task_kind_from_string(const std::string& name) {
  for (TaskKind t : all_task_kinds()) {
    if (name == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown task kind: " + name);
}

bool is_image_level_task(TaskKind t) {
  return t == TaskKind::image_caption_brief ||
         t == TaskKind::image_caption_detailed ||
         t == TaskKind::scene_classification ||
         t == TaskKind::summary_caption;
}

bool operator==(const Triple& a, const Triple& b) {
  return a.id == b.id && a.image_path == b.image_path && a.width == b.width &&
         a.height == b.height && a.modality == b.modality && a.task == b.task &&
         a.prompts == b.prompts && a.question == b.question &&
         a.answer == b.answer;
}

std::set<int> referenced_marks(const std::string& text) {
  static const std::regex pat(R"(<(?:Mark|Region) ([0-9]+)>)");
  std::set<int> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pat);
       it != std::sregex_iterator(); ++it) {
    out.insert(std::stoi((*it)[1].str()));
  }
  return out;
}

void validate_triple(const Triple& t) {
  if (t.id.empty()) throw std::invalid_argument("triple " + t.id + ": empty id");
  if (t.width <= 0 || t.height <= 0) {
    throw std::invalid_argument("triple " + t.id + ": non-positive image size");
  }
  if (t.prompts.empty()) {
    throw std::invalid_argument("triple " + t.id + ": no prompts");
  }
  std::set<int> marks;
  for (const VisualPrompt& p : t.prompts) {
    if (p.mark_id < 1) {
      throw std::invalid_argument("triple " + t.id + ": mark_id < 1");
    }
    if (!marks.insert(p.mark_id).second) {
      throw std::invalid_argument("triple " + t.id + ": duplicate mark_id " +
                                  std::to_string(p.mark_id));
    }
    if (!p.payload_matches_kind()) {
      throw std::invalid_argument("triple " + t.id +
                                  ": payload does not match prompt kind");
    }
    if (p.kind == PromptKind::full_image) {
      const BBox expect{0.0, 0.0, double(t.width), double(t.height)};
      if (!(p.box() == expect)) {
        throw std::invalid_argument(
            "triple " + t.id + ": full_image payload is not [0,0,width,height]");
      }
    }
    if (p.kind == PromptKind::free_form && p.free_form().vertices.empty()) {
      throw std::invalid_argument("triple " + t.id + ": empty free-form prompt");
    }
  }
  for (const std::string* text : {&t.question, &t.answer}) {
    for (int m : referenced_marks(*text)) {
      if (!marks.count(m)) {
        throw std::invalid_argument("triple " + t.id + ": text references mark " +
                                    std::to_string(m) +
                                    " but no such prompt exists");
      }
    }
  }
}

const std::string& SegmentationMap::class_name(int id) const {
  auto it = legend.find(id);
  if (it == legend.end()) {
    throw LegendError("class id " + std::to_string(id) + " missing from legend");
  }
  return it->second;
}

}  // namespace rsvp
