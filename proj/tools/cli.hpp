#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Command implementations behind the `rsvp` binary. Each takes an args
// struct plus explicit output streams so tests can drive them directly;
// machine-readable JSON goes to `out`, logs and warnings to `err`. The
// return value is the process exit code: 0 on success, 1 on failure, 2 on
// usage errors.
namespace rsvp::cli {

struct ConvertArgs {
  std::string manifest;
  std::string output;  // overrides the manifest output path when non-empty
  std::optional<uint64_t> seed;
  std::optional<double> alpha;     // applied to every detection entry
  std::optional<int> patch_px;     // applied to every segmentation entry
  bool strict = false;
};
int cmd_convert(const ConvertArgs& args, std::ostream& out, std::ostream& err);

struct RenderArgs {
  std::string triples;
  std::string images_dir;
  std::string out_dir;
  int stroke_width = 2;
  int label_scale = 2;
  int point_radius = 4;
  bool strict = false;
};
int cmd_render(const RenderArgs& args, std::ostream& out, std::ostream& err);

struct AnnotateArgs {
  std::string triples;
  std::string images_dir;
  std::string output;
  std::string provider = "mock";      // mock | http
  std::string template_name = "brief";  // brief | detailed | relationship
  int threads = 1;
  bool strict = false;
};
int cmd_annotate(const AnnotateArgs& args, std::ostream& out,
                 std::ostream& err);

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::vector<std::string> metrics;
  std::string embeddings;  // required by ss / s_iou / accuracy-semantic
  double tau = 0.5;
  bool strict = false;
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct KernelArgs {
  uint64_t seed = 0;
  int d_v = 8;
  int d_l = 16;
  int patch = 2;
  int cases = 100;
  int fd_seeds = 5;
  bool inject_fault = false;  // corrupt a parameter; the check must catch it
};
int cmd_kernel_check(const KernelArgs& args, std::ostream& out,
                     std::ostream& err);

}  // namespace rsvp::cli
