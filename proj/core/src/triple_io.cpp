#include "rsvp/triple_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rsvp/errors.hpp"

namespace rsvp {
namespace {

// Integral coordinates serialize as integers; everything else keeps the
// shortest round-trip double form. Keeps files stable and diffable.
nlohmann::ordered_json num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
    return static_cast<int64_t>(v);
  return v;
}

nlohmann::ordered_json prompt_to_json(const VisualPrompt& p) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  j["mark_id"] = p.mark_id;
  switch (p.kind) {
    case PromptKind::box:
    case PromptKind::full_image: {
      const BBox& b = p.box();
      j["box"] = {num(b.x), num(b.y), num(b.w), num(b.h)};
      break;
    }
    case PromptKind::point: {
      const PointPrompt& pt = p.point();
      j["point"] = {num(pt.x), num(pt.y)};
      break;
    }
    case PromptKind::free_form: {
      nlohmann::ordered_json verts = nlohmann::ordered_json::array();
      for (const auto& v : p.free_form().vertices)
        verts.push_back(nlohmann::ordered_json::array({num(v.x), num(v.y)}));
      j["vertices"] = std::move(verts);
      break;
    }
  }
  return j;
}

double get_num(const nlohmann::json& j, const char* what) {
  if (!j.is_number())
    throw SchemaError(what, "expected a number");
  return j.get<double>();
}

VisualPrompt prompt_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("prompts[]", "expected an object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("prompts[].kind", "missing or not a string");
  PromptKind kind = prompt_kind_from_string(j["kind"].get<std::string>());
  if (!j.contains("mark_id") || !j["mark_id"].is_number_integer())
    throw SchemaError("prompts[].mark_id", "missing or not an integer");
  int mark = j["mark_id"].get<int>();

  VisualPrompt p;
  p.kind = kind;
  p.mark_id = mark;
  switch (kind) {
    case PromptKind::box:
    case PromptKind::full_image: {
      if (!j.contains("box") || !j["box"].is_array() || j["box"].size() != 4)
        throw SchemaError("prompts[].box", "expected [x, y, w, h]");
      const auto& b = j["box"];
      p.payload = BBox{get_num(b[0], "prompts[].box[0]"),
                       get_num(b[1], "prompts[].box[1]"),
                       get_num(b[2], "prompts[].box[2]"),
                       get_num(b[3], "prompts[].box[3]")};
      break;
    }
    case PromptKind::point: {
      if (!j.contains("point") || !j["point"].is_array() ||
          j["point"].size() != 2)
        throw SchemaError("prompts[].point", "expected [x, y]");
      const auto& q = j["point"];
      p.payload = PointPrompt{get_num(q[0], "prompts[].point[0]"),
                              get_num(q[1], "prompts[].point[1]")};
      break;
    }
    case PromptKind::free_form: {
      if (!j.contains("vertices") || !j["vertices"].is_array())
        throw SchemaError("prompts[].vertices", "expected an array of [x, y]");
      FreeFormPrompt ff;
      for (const auto& v : j["vertices"]) {
        if (!v.is_array() || v.size() != 2)
          throw SchemaError("prompts[].vertices[]", "expected [x, y]");
        ff.vertices.push_back(
            PointPrompt{get_num(v[0], "prompts[].vertices[][0]"),
                        get_num(v[1], "prompts[].vertices[][1]")});
      }
      p.payload = std::move(ff);
      break;
    }
  }
  return p;
}

}  // namespace

nlohmann::ordered_json triple_to_json(const Triple& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["image"] = t.image_path;
  j["width"] = t.width;
  j["height"] = t.height;
  j["modality"] = to_string(t.modality);
  j["task"] = to_string(t.task);
  nlohmann::ordered_json prompts = nlohmann::ordered_json::array();
  for (const auto& p : t.prompts) prompts.push_back(prompt_to_json(p));
  j["prompts"] = std::move(prompts);
  j["question"] = t.question;
  j["answer"] = t.answer;
  return j;
}

Triple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("$", "triple must be an object");
  auto need = [&](const char* key, const char* why) -> const nlohmann::json& {
    if (!j.contains(key)) throw SchemaError(key, why);
    return j[key];
  };
  Triple t;
  const auto& id = need("id", "missing");
  if (!id.is_string()) throw SchemaError("id", "expected a string");
  t.id = id.get<std::string>();
  const auto& img = need("image", "missing");
  if (!img.is_string()) throw SchemaError("image", "expected a string");
  t.image_path = img.get<std::string>();
  const auto& w = need("width", "missing");
  const auto& h = need("height", "missing");
  if (!w.is_number_integer() || !h.is_number_integer())
    throw SchemaError("width/height", "expected integers");
  t.width = w.get<int>();
  t.height = h.get<int>();
  const auto& mod = need("modality", "missing");
  if (!mod.is_string()) throw SchemaError("modality", "expected a string");
  t.modality = modality_from_string(mod.get<std::string>());
  const auto& task = need("task", "missing");
  if (!task.is_string()) throw SchemaError("task", "expected a string");
  t.task = task_kind_from_string(task.get<std::string>());
  const auto& prompts = need("prompts", "missing");
  if (!prompts.is_array()) throw SchemaError("prompts", "expected an array");
  for (const auto& p : prompts) t.prompts.push_back(prompt_from_json(p));
  const auto& q = need("question", "missing");
  if (!q.is_string()) throw SchemaError("question", "expected a string");
  t.question = q.get<std::string>();
  const auto& a = need("answer", "missing");
  if (!a.is_string()) throw SchemaError("answer", "expected a string");
  t.answer = a.get<std::string>();
  return t;
}

std::string triple_to_line(const Triple& t) { return triple_to_json(t).dump(); }

Triple triple_from_line(const std::string& line, size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << "bad JSON";
    if (line_no) msg << " on line " << line_no;
    msg << ": " << e.what();
    throw ParseError(msg.str(), e.byte);
  }
  try {
    return triple_from_json(j);
  } catch (const SchemaError& e) {
    if (!line_no) throw;
    std::string msg = e.what();
    const std::string prefix = e.path() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw SchemaError(e.path(), msg + " (line " + std::to_string(line_no) + ")");
  }
}

void write_triples(std::ostream& out, const std::vector<Triple>& triples) {
  for (const auto& t : triples) out << triple_to_line(t) << '\n';
}

std::vector<Triple> read_triples(std::istream& in, bool validate) {
  std::vector<Triple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Triple t = triple_from_line(line, line_no);
    if (validate) validate_triple(t);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Triple> read_triples_lenient(std::istream& in,
                                         std::vector<std::string>* warnings,
                                         bool validate) {
  std::vector<Triple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Triple t = triple_from_line(line, line_no);
      if (validate) validate_triple(t);
      out.push_back(std::move(t));
    } catch (const std::exception& e) {
      if (warnings)
        warnings->push_back("skipped line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return out;
}

void write_triples_file(const std::string& path,
                        const std::vector<Triple>& triples) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_triples(f, triples);
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<Triple> read_triples_file(const std::string& path, bool validate) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_triples(f, validate);
}

}  // namespace rsvp
