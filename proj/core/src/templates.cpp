#include "rsvp/templates.hpp"

#include <sstream>

#include "rsvp/errors.hpp"

namespace rsvp {
namespace {

const char* kClassifyRegions =
    "Please identify the object category of each marked region in the image.";
const char* kClassifyPoints =
    "Please identify the labels of each marked point in the image.";
const char* kBriefRegion =
    "Please provide a brief caption of each marked region in the image.";
const char* kDetailedPoint =
    "Please provide a detailed caption of each marked point in the image.";
const char* kRelationship =
    "Please analyze the relationship between all marked regions in the image.";
const char* kSummary =
    "Please provide a summarized caption based on all the marked regions in "
    "the image.";
const char* kInteraction =
    "Please analyze how the marked objects interact with each other in the "
    "given scene.";

bool mentions_point(const std::string& s) {
  return s.find("point") != std::string::npos;
}

std::string enumerate_marks(const std::vector<int>& ids, const char* word) {
  std::ostringstream out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ", ";
    out << '<' << word << ' ' << ids[i] << '>';
  }
  return out.str();
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

TemplateSet TemplateSet::defaults() {
  TemplateSet t;
  t.by_task[TaskKind::image_caption_brief] = {kBriefRegion};
  t.by_task[TaskKind::image_caption_detailed] = {kDetailedPoint};
  t.by_task[TaskKind::scene_classification] = {kClassifyRegions};
  t.by_task[TaskKind::referring_object_classification] = {kClassifyRegions,
                                                          kClassifyPoints};
  t.by_task[TaskKind::region_caption_brief] = {kBriefRegion};
  t.by_task[TaskKind::region_caption_detailed] = {kDetailedPoint};
  t.by_task[TaskKind::relationship_analysis] = {kRelationship, kInteraction};
  t.by_task[TaskKind::summary_caption] = {kSummary};
  return t;
}

const std::vector<std::string>& TemplateSet::for_task(TaskKind t) const {
  auto it = by_task.find(t);
  if (it == by_task.end() || it->second.empty())
    throw TemplateError("no templates for task '" + std::string(to_string(t)) +
                        "'");
  return it->second;
}

std::vector<std::string> TemplateSet::for_task_flavor(TaskKind t,
                                                      PromptFlavor f) const {
  const auto& all = for_task(t);
  if (f == PromptFlavor::any) return all;
  std::vector<std::string> picked;
  for (const auto& s : all) {
    bool is_point = mentions_point(s);
    if ((f == PromptFlavor::point) == is_point) picked.push_back(s);
  }
  return picked.empty() ? all : picked;
}

std::string select_instruction(TaskKind task, const TemplateSet& templates,
                               Rng& rng, PromptFlavor flavor) {
  auto pool = templates.for_task_flavor(task, flavor);
  if (pool.size() == 1) return pool.front();
  return pool[static_cast<size_t>(rng.uniform_below(pool.size()))];
}

std::string render_instruction(const std::string& tpl,
                               const std::vector<int>& mark_ids) {
  std::string out = tpl;
  replace_all(out, "{regions}", enumerate_marks(mark_ids, "Region"));
  replace_all(out, "{marks}", enumerate_marks(mark_ids, "Mark"));
  auto open = out.find('{');
  if (open != std::string::npos && out.find('}', open) != std::string::npos) {
    auto close = out.find('}', open);
    throw SlotError("unresolved placeholder '" +
                    out.substr(open, close - open + 1) + "' in template");
  }
  return out;
}

}  // namespace rsvp
