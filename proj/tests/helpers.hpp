#pragma once

// Shared fixtures for the test binaries: scratch directories, small file
// helpers, the embedding fixture used by the metric oracles, and a random
// valid-triple generator for round-trip properties.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "rsvp/rng.hpp"
#include "rsvp/triple.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "rsvp-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline void write_file_bytes(const std::string& path,
                             const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::string s = read_file(path);
  return std::vector<uint8_t>(s.begin(), s.end());
}

// Four word vectors in R^4 engineered so cos(airplane, aircraft) = 0.82 and
// every other cross pair is exactly orthogonal. All vectors unit length.
inline std::string fixture_embeddings_text() {
  const double c = 0.82;
  const double s = std::sqrt(1.0 - c * c);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "airplane 1 0 0 0\n";
  out << "aircraft " << c << ' ' << s << " 0 0\n";
  out << "vehicle 0 0 1 0\n";
  out << "building 0 0 0 1\n";
  return out.str();
}

// A structurally valid triple with randomized size, prompts and task. The
// question/answer always reference mark 1, which always exists.
inline rsvp::Triple random_triple(rsvp::Rng& rng, int index) {
  using namespace rsvp;
  Triple t;
  t.id = "t" + std::to_string(index);
  t.image_path = "img_" + std::to_string(index) + ".png";
  t.width = 1 + static_cast<int>(rng.uniform_below(2000));
  t.height = 1 + static_cast<int>(rng.uniform_below(2000));
  const Modality mods[] = {Modality::optical, Modality::sar,
                           Modality::infrared, Modality::natural};
  t.modality = mods[rng.uniform_below(4)];
  t.task = all_task_kinds()[rng.uniform_below(all_task_kinds().size())];
  const int n = 1 + static_cast<int>(rng.uniform_below(5));
  for (int m = 1; m <= n; ++m) {
    switch (rng.uniform_below(4)) {
      case 0:
        t.prompts.push_back(make_box_prompt(
            m, BBox{rng.uniform() * t.width, rng.uniform() * t.height,
                    0.5 + rng.uniform() * t.width,
                    0.5 + rng.uniform() * t.height}));
        break;
      case 1:
        t.prompts.push_back(make_point_prompt(
            m, PointPrompt{rng.uniform() * t.width, rng.uniform() * t.height}));
        break;
      case 2: {
        FreeFormPrompt ff;
        const int k = 1 + static_cast<int>(rng.uniform_below(5));
        for (int i = 0; i < k; ++i)
          ff.vertices.push_back(PointPrompt{rng.uniform() * t.width,
                                            rng.uniform() * t.height});
        t.prompts.push_back(make_free_form_prompt(m, std::move(ff)));
        break;
      }
      default: {
        VisualPrompt p = full_image_box(t.width, t.height);
        p.mark_id = m;
        t.prompts.push_back(p);
        break;
      }
    }
  }
  t.question = "Please describe <Mark 1> in the image.";
  t.answer = "<Mark 1>: sample text " + std::to_string(rng.uniform_below(1000));
  return t;
}

}  // namespace testutil
