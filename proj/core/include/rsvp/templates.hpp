#pragma once

#include <map>
#include <string>
#include <vector>

#include "rsvp/rng.hpp"
#include "rsvp/triple.hpp"

namespace rsvp {

// Some instruction templates are phrased for marked points, others for marked
// regions. Builders pass the flavor matching their prompt kind; `any` keeps
// the full set.
enum class PromptFlavor { any, region, point };

// Task -> instruction strings. The default set is the seven stock
// instructions; users may add variants, optionally containing the
// placeholders "{regions}" or "{marks}" which render_instruction expands to
// an enumeration of the mark identifiers.
struct TemplateSet {
  std::map<TaskKind, std::vector<std::string>> by_task;

  static TemplateSet defaults();

  // Throws TemplateError when the task has no templates.
  const std::vector<std::string>& for_task(TaskKind t) const;
  // Flavor-filtered view; falls back to the full set when the filter would
  // leave nothing.
  std::vector<std::string> for_task_flavor(TaskKind t, PromptFlavor f) const;
};

// Uniform template choice, deterministic under the rng seed.
std::string select_instruction(TaskKind task, const TemplateSet& templates,
                               Rng& rng, PromptFlavor flavor = PromptFlavor::any);

// Expands "{regions}" to "<Region 1>, <Region 2>, ..." and "{marks}" to
// "<Mark 1>, ..." for the given mark ids. Verbatim templates pass through
// unchanged. Throws SlotError if a placeholder survives rendering.
std::string render_instruction(const std::string& tpl,
                               const std::vector<int>& mark_ids);

}  // namespace rsvp
