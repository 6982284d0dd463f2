#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsvp/render.hpp"
#include "rsvp/triple.hpp"

namespace rsvp {

enum class AnnotationTask { brief_caption, detailed_caption, relationship_analysis };
const char* to_string(AnnotationTask t);
AnnotationTask annotation_task_from_string(const std::string& name);

// Role/format prompt blocks with the slot grammar {categories}, {marks},
// {task_goal}. The defaults are reconstructions of the published intent, not
// verbatim transcriptions.
struct AnnotationTemplate {
  AnnotationTask task = AnnotationTask::brief_caption;
  std::string role_text;
  std::string format_text;

  static AnnotationTemplate defaults_for(AnnotationTask task);
};

struct AnnotationRequest {
  std::string triple_id;
  AnnotationTask task = AnnotationTask::brief_caption;
  std::vector<uint8_t> overlay_png;  // SoM-rendered image
  std::string prompt_text;
};

struct AnnotationResult {
  std::string triple_id;
  std::string text;
  std::string provider;
  int latency_ms = 0;
};

// Pulls "mark -> category" out of a classification-style answer
// ("<Region n>: category" / "<Mark n>: category" lines).
std::map<int, std::string> categories_from_answer(const Triple& t);

// Renders the overlay and substitutes the prompt slots. Every prompt mark
// needs a category; a missing one raises SlotError naming the mark_id, and
// an unresolved slot after substitution raises SlotError naming the slot.
AnnotationRequest build_request(const Triple& t,
                                const std::vector<uint8_t>& image_png,
                                const AnnotationTemplate& tpl,
                                const RenderStyle& style,
                                const std::map<int, std::string>& categories);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  // Returns the annotation text; throws ProviderError on failure.
  virtual std::string annotate_text(const AnnotationRequest& req) = 0;
};

// Deterministic pure function of the request bytes: per-mark templated
// sentences plus a content-hash reference line. No I/O.
class MockProvider : public Provider {
 public:
  std::string name() const override { return "mock"; }
  std::string annotate_text(const AnnotationRequest& req) override;
};

struct HttpProviderConfig {
  std::string endpoint;  // e.g. http://host:port/annotate
  std::string token;     // optional bearer token
  int max_attempts = 3;
  int initial_backoff_ms = 200;
};

// Reads ANNOTATE_ENDPOINT / ANNOTATE_TOKEN.
HttpProviderConfig http_config_from_env();

// POST {"image": <base64 PNG>, "prompt": <text>} expecting {"text": ...}.
// Connection failures and 5xx responses are retried with exponential
// backoff; the final ProviderError carries the attempt count.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig cfg);
  std::string name() const override { return "http"; }
  std::string annotate_text(const AnnotationRequest& req) override;

 private:
  HttpProviderConfig cfg_;
};

// Latency-measured single dispatch; empty provider text raises ProviderError.
AnnotationResult annotate(const AnnotationRequest& req, Provider& provider);

// Dispatches with at most `concurrency` requests in flight; results come
// back sorted by triple_id regardless of completion order.
std::vector<AnnotationResult> annotate_all(
    const std::vector<AnnotationRequest>& requests, Provider& provider,
    int concurrency = 1);

std::string base64_encode(const uint8_t* data, size_t len);

}  // namespace rsvp
