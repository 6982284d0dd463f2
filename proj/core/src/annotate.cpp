#include "rsvp/annotate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rsvp/errors.hpp"
#include "rsvp/rng.hpp"

namespace rsvp {
namespace {

const char* task_goal(AnnotationTask t) {
  switch (t) {
    case AnnotationTask::brief_caption:
      return "a brief one-sentence caption for each marked object";
    case AnnotationTask::detailed_caption:
      return "a detailed caption for each marked object, covering appearance, "
             "surroundings and spatial position";
    case AnnotationTask::relationship_analysis:
      return "an analysis of how the marked objects relate to and interact "
             "with each other";
  }
  return "";
}

// Which triple tasks a template may be applied to. Classification triples
// are always eligible: they are the raw source the captions get built from.
bool compatible(AnnotationTask tpl, TaskKind task) {
  if (task == TaskKind::referring_object_classification ||
      task == TaskKind::scene_classification)
    return true;
  switch (tpl) {
    case AnnotationTask::brief_caption:
      return task == TaskKind::region_caption_brief ||
             task == TaskKind::image_caption_brief;
    case AnnotationTask::detailed_caption:
      return task == TaskKind::region_caption_detailed ||
             task == TaskKind::image_caption_detailed;
    case AnnotationTask::relationship_analysis:
      return task == TaskKind::relationship_analysis ||
             task == TaskKind::summary_caption;
  }
  return false;
}

void replace_all(std::string& s, const std::string& from,
                 const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string format_num(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::string describe_prompt(const VisualPrompt& p) {
  switch (p.kind) {
    case PromptKind::box: {
      const BBox& b = p.box();
      return "box [" + format_num(b.x) + ", " + format_num(b.y) + ", " +
             format_num(b.w) + ", " + format_num(b.h) + "]";
    }
    case PromptKind::full_image:
      return "full image";
    case PromptKind::point:
      return "point (" + format_num(p.point().x) + ", " +
             format_num(p.point().y) + ")";
    case PromptKind::free_form:
      return "free-form region";
  }
  return "";
}

std::string expand_categories(const Triple& t,
                              const std::map<int, std::string>& categories) {
  std::ostringstream out;
  bool first = true;
  for (const auto& p : t.prompts) {
    auto it = categories.find(p.mark_id);
    if (it == categories.end())
      throw SlotError("no category supplied for mark " +
                      std::to_string(p.mark_id));
    if (!first) out << '\n';
    first = false;
    out << "Mark " << p.mark_id << ": " << it->second << " ("
        << describe_prompt(p) << ")";
  }
  return out.str();
}

std::string expand_marks(const Triple& t) {
  std::ostringstream out;
  bool first = true;
  for (const auto& p : t.prompts) {
    if (!first) out << ", ";
    first = false;
    out << "Mark " << p.mark_id;
  }
  return out.str();
}

void reject_unresolved(const std::string& text) {
  static const std::regex slot(R"(\{[a-z_]+\})");
  std::smatch m;
  if (std::regex_search(text, m, slot))
    throw SlotError("unresolved slot '" + m.str() + "' in template");
}

std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace

const char* to_string(AnnotationTask t) {
  switch (t) {
    case AnnotationTask::brief_caption: return "brief_caption";
    case AnnotationTask::detailed_caption: return "detailed_caption";
    case AnnotationTask::relationship_analysis: return "relationship_analysis";
  }
  return "?";
}

AnnotationTask annotation_task_from_string(const std::string& name) {
  if (name == "brief_caption") return AnnotationTask::brief_caption;
  if (name == "detailed_caption") return AnnotationTask::detailed_caption;
  if (name == "relationship_analysis")
    return AnnotationTask::relationship_analysis;
  throw std::invalid_argument("unknown annotation task '" + name + "'");
}

AnnotationTemplate AnnotationTemplate::defaults_for(AnnotationTask task) {
  AnnotationTemplate t;
  t.task = task;
  t.role_text =
      "<Role>\n"
      "You are an expert analyst of remote sensing imagery. The attached "
      "image contains objects highlighted with numeric marks. Using the "
      "ground-truth object list below, produce {task_goal}.\n"
      "</Role>";
  // {marks} is deliberately not used here so each mark id appears exactly
  // once in the rendered prompt (inside the ground-truth list).
  t.format_text =
      "<Format>\n"
      "Ground-truth objects:\n"
      "{categories}\n"
      "Refer to each object by its mark number. Answer with one line per "
      "mark, formatted as \"Mark k: <text>\". Do not invent objects that "
      "are not marked.\n"
      "</Format>";
  return t;
}

std::map<int, std::string> categories_from_answer(const Triple& t) {
  static const std::regex line(R"(<(?:Mark|Region) ([0-9]+)>: ([^\n]*))");
  std::map<int, std::string> out;
  auto begin = std::sregex_iterator(t.answer.begin(), t.answer.end(), line);
  for (auto it = begin; it != std::sregex_iterator(); ++it)
    out[std::stoi((*it)[1].str())] = (*it)[2].str();
  return out;
}

AnnotationRequest build_request(const Triple& t,
                                const std::vector<uint8_t>& image_png,
                                const AnnotationTemplate& tpl,
                                const RenderStyle& style,
                                const std::map<int, std::string>& categories) {
  validate_triple(t);
  if (!compatible(tpl.task, t.task))
    throw std::invalid_argument(
        std::string("template '") + to_string(tpl.task) +
        "' is not applicable to task '" + to_string(t.task) + "'");

  AnnotationRequest req;
  req.triple_id = t.id;
  req.task = tpl.task;
  req.overlay_png = render_triple(t, image_png, style);

  std::string text = tpl.role_text + "\n" + tpl.format_text;
  replace_all(text, "{task_goal}", task_goal(tpl.task));
  replace_all(text, "{categories}", expand_categories(t, categories));
  replace_all(text, "{marks}", expand_marks(t));
  reject_unresolved(text);
  req.prompt_text = text;
  if (req.prompt_text.empty()) throw SlotError("rendered prompt is empty");
  return req;
}

std::string MockProvider::annotate_text(const AnnotationRequest& req) {
  // Key the output by the full request content so any change to the overlay
  // or prompt shows up in the text, while equal requests collide exactly.
  uint64_t h = Rng::hash_id(req.prompt_text);
  std::string overlay(req.overlay_png.begin(), req.overlay_png.end());
  h ^= Rng::hash_id(overlay) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);

  static const std::regex line(R"(Mark ([0-9]+): ([^\n(]+))");
  std::ostringstream out;
  auto begin =
      std::sregex_iterator(req.prompt_text.begin(), req.prompt_text.end(), line);
  bool any = false;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::string category = (*it)[2].str();
    while (!category.empty() && category.back() == ' ') category.pop_back();
    out << "A " << category << " is marked as Mark " << (*it)[1].str()
        << " in the scene. ";
    any = true;
  }
  if (!any) out << "No marked objects were listed. ";
  out << "(annotation " << to_hex(h) << ")";
  return out.str();
}

HttpProviderConfig http_config_from_env() {
  HttpProviderConfig cfg;
  if (const char* e = std::getenv("ANNOTATE_ENDPOINT")) cfg.endpoint = e;
  if (const char* t = std::getenv("ANNOTATE_TOKEN")) cfg.token = t;
  return cfg;
}

HttpProvider::HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty())
    throw std::invalid_argument(
        "http provider needs an endpoint (ANNOTATE_ENDPOINT)");
  if (cfg_.max_attempts < 1)
    throw std::invalid_argument("max_attempts must be >= 1");
}

std::string HttpProvider::annotate_text(const AnnotationRequest& req) {
  // Split http://host:port/path into client base and request path.
  std::string base = cfg_.endpoint;
  std::string path = "/";
  size_t scheme = base.find("://");
  size_t slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash != std::string::npos) {
    path = base.substr(slash);
    base = base.substr(0, slash);
  }

  nlohmann::json body;
  body["image"] = base64_encode(req.overlay_png.data(), req.overlay_png.size());
  body["prompt"] = req.prompt_text;
  std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      int backoff = cfg_.initial_backoff_ms << (attempt - 2);
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    }
    httplib::Client client(base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!cfg_.token.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.token);
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server returned " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw ProviderError("annotation endpoint returned " +
                              std::to_string(res->status),
                          attempt);
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProviderError(std::string("bad response JSON: ") + e.what(),
                          attempt);
    }
    if (!parsed.is_object() || !parsed.contains("text") ||
        !parsed["text"].is_string())
      throw ProviderError("response missing \"text\"", attempt);
    return parsed["text"].get<std::string>();
  }
  throw ProviderError("annotation failed after " +
                          std::to_string(cfg_.max_attempts) + " attempts: " +
                          last_error,
                      cfg_.max_attempts);
}

AnnotationResult annotate(const AnnotationRequest& req, Provider& provider) {
  auto t0 = std::chrono::steady_clock::now();
  std::string text = provider.annotate_text(req);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  if (text.empty())
    throw ProviderError("provider returned empty annotation text", 1);
  AnnotationResult r;
  r.triple_id = req.triple_id;
  r.text = std::move(text);
  r.provider = provider.name();
  r.latency_ms = static_cast<int>(elapsed);
  return r;
}

std::vector<AnnotationResult> annotate_all(
    const std::vector<AnnotationRequest>& requests, Provider& provider,
    int concurrency) {
  if (concurrency < 1)
    throw std::invalid_argument("concurrency must be >= 1");
  std::vector<AnnotationResult> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());

  int workers = std::min<int>(concurrency, static_cast<int>(requests.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < requests.size(); ++i)
      results[i] = annotate(requests[i], provider);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (size_t i = static_cast<size_t>(w); i < requests.size();
             i += static_cast<size_t>(workers)) {
          try {
            results[i] = annotate(requests[i], provider);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::sort(results.begin(), results.end(),
            [](const AnnotationResult& a, const AnnotationResult& b) {
              return a.triple_id < b.triple_id;
            });
  return results;
}

std::string base64_encode(const uint8_t* data, size_t len) {
  static const char tbl[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= len; i += 3) {
    uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8) |
                 data[i + 2];
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back(tbl[v & 63]);
  }
  if (i + 1 == len) {
    uint32_t v = uint32_t(data[i]) << 16;
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == len) {
    uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8);
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

}  // namespace rsvp
