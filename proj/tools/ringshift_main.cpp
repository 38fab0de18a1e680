// ringshift: entropy metrics, ring distances and mean-shift segmentation of
// grayscale images from the command line.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "ringshift/entropy.hpp"
#include "ringshift/imageio.hpp"
#include "ringshift/mean_shift.hpp"

namespace fs = std::filesystem;
using namespace ringshift;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct InputOptions {
  std::optional<std::uint64_t> modulus;
};

void add_modulus_option(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--modulus", in.modulus,
                  "Expected gray-level count n; must match the file's declared depth "
                  "(re-quantization is not supported)");
}

RingImage load_checked(const std::string& path, const InputOptions& in) {
  RingImage image = load_image(path);
  if (in.modulus && *in.modulus != image.modulus().value()) {
    throw UsageError("--modulus " + std::to_string(*in.modulus) + " conflicts with " + path +
                     " (declared modulus " + std::to_string(image.modulus().value()) + ")");
  }
  return image;
}

struct OutputOptions {
  bool ascii = false;
};

void save_by_extension(const RingImage& image, const fs::path& path, const OutputOptions& out) {
  ImageFormat format = format_for_path(path);
  if (format == ImageFormat::PgmBinary && out.ascii) format = ImageFormat::PgmAscii;
  save_image(image, path, format);
}

void add_filter_options(CLI::App* cmd, MeanShiftParams& p) {
  cmd->add_option("--hs", p.hs, "Spatial bandwidth in pixels (published setting: 15)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--hr", p.hr, "Range bandwidth in gray levels (published setting: 12)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--pixel-tol", p.pixel_tol,
                  "Per-pixel convergence threshold on the joint (x, y, value) shift")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--pixel-max-iters", p.pixel_max_iters, "Cap on mode-seeking steps per pixel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::size_t distinct_levels(const RingImage& image) { return histogram(image).occupied_levels(); }

struct SegmentSummary {
  std::string label;
  SegmentationResult result;
};

void print_summary(const SegmentSummary& s) {
  const auto& last = s.result.trace.entries.back();
  std::cout << s.label << ": iterations=" << last.k
            << " final_value=" << fixed6(last.criterion_value)
            << " distinct_levels=" << distinct_levels(s.result.final_image)
            << " stopped=" << to_string(s.result.trace.stopped_reason) << "\n";
}

std::optional<PixelCoord> parse_coord(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    const long x = std::stol(text.substr(0, comma), &used);
    if (used != comma) return std::nullopt;
    const std::string ys = text.substr(comma + 1);
    const long y = std::stol(ys, &used);
    if (used != ys.size()) return std::nullopt;
    return PixelCoord{x, y};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-shift segmentation of grayscale images with entropy and Z_n ring-entropy "
               "stopping criteria"};
  app.require_subcommand(1);

  // entropy
  std::string entropy_input;
  InputOptions entropy_in;
  auto* entropy_cmd = app.add_subcommand("entropy", "Print the Shannon entropy E(A) in bits");
  entropy_cmd->add_option("image", entropy_input, "PGM or PNG image")->required();
  add_modulus_option(entropy_cmd, entropy_in);

  // distance
  std::string dist_a;
  std::string dist_b;
  std::string dist_kind = "nu-hat";
  InputOptions dist_in;
  auto* distance_cmd = app.add_subcommand(
      "distance", "Print nu = |E(A) - E(B)| or the ring distance nu-hat = E(A + (-B))");
  distance_cmd->add_option("image_a", dist_a, "First image")->required();
  distance_cmd->add_option("image_b", dist_b, "Second image")->required();
  distance_cmd->add_option("--kind", dist_kind, "nu or nu-hat")
      ->check(CLI::IsMember({"nu", "nu-hat"}))
      ->capture_default_str();
  add_modulus_option(distance_cmd, dist_in);

  // filter
  std::string filter_input;
  std::string filter_out;
  MeanShiftParams filter_params;
  InputOptions filter_in;
  OutputOptions filter_fmt;
  auto* filter_cmd = app.add_subcommand("filter", "Run a single mean-shift filtering pass");
  filter_cmd->add_option("image", filter_input, "Input image")->required();
  filter_cmd->add_option("--out", filter_out, "Output image (.pgm or .png)")->required();
  filter_cmd->add_flag("--ascii", filter_fmt.ascii, "Write .pgm output as plain P2");
  add_filter_options(filter_cmd, filter_params);
  add_modulus_option(filter_cmd, filter_in);

  // segment
  std::string seg_input;
  std::string seg_out;
  std::string seg_trace;
  std::string seg_criterion = "new";
  std::optional<double> seg_epsilon;
  int seg_max_iters = 50;
  MeanShiftParams seg_params;
  InputOptions seg_in;
  OutputOptions seg_fmt;
  auto* segment_cmd =
      app.add_subcommand("segment", "Iterate mean-shift filtering until the stopping rule fires");
  segment_cmd->add_option("image", seg_input, "Input image")->required();
  segment_cmd->add_option("--out", seg_out, "Segmented image (.pgm or .png)")->required();
  segment_cmd->add_option("--trace", seg_trace, "Iteration trace CSV")->required();
  segment_cmd
      ->add_option("--criterion", seg_criterion,
                   "new: ring entropy distance E(A_k + (-A_{k-1})); old: |E(A_k) - E(A_{k-1})|")
      ->check(CLI::IsMember({"old", "new"}))
      ->capture_default_str();
  segment_cmd
      ->add_option("--epsilon", seg_epsilon,
                   "Stopping threshold (published settings: 0.9 for new, 0.0175 for old)")
      ->check(CLI::NonNegativeNumber);
  segment_cmd->add_option("--max-iters", seg_max_iters, "Cap on outer filtering passes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  segment_cmd->add_flag("--ascii", seg_fmt.ascii, "Write .pgm output as plain P2");
  add_filter_options(segment_cmd, seg_params);
  add_modulus_option(segment_cmd, seg_in);

  // compare
  std::string cmp_input;
  std::string cmp_prefix;
  std::string cmp_ext = "pgm";
  double cmp_eps_new = CriterionConfig::default_epsilon(StoppingRule::RingEntropyDistance);
  double cmp_eps_old = CriterionConfig::default_epsilon(StoppingRule::EntropyDiff);
  int cmp_max_iters = 50;
  MeanShiftParams cmp_params;
  InputOptions cmp_in;
  OutputOptions cmp_fmt;
  auto* compare_cmd = app.add_subcommand(
      "compare", "Segment with both stopping rules from the same input and filter settings");
  compare_cmd->add_option("image", cmp_input, "Input image")->required();
  compare_cmd
      ->add_option("--prefix", cmp_prefix,
                   "Output prefix; writes <prefix>_{new,old}.<ext> and <prefix>_{new,old}_trace.csv")
      ->required();
  compare_cmd->add_option("--ext", cmp_ext, "Image extension for outputs")
      ->check(CLI::IsMember({"pgm", "png"}))
      ->capture_default_str();
  compare_cmd->add_option("--epsilon-new", cmp_eps_new, "Threshold for the ring entropy distance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  compare_cmd->add_option("--epsilon-old", cmp_eps_old, "Threshold for the entropy difference")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  compare_cmd->add_option("--max-iters", cmp_max_iters, "Cap on outer filtering passes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_flag("--ascii", cmp_fmt.ascii, "Write .pgm outputs as plain P2");
  add_filter_options(compare_cmd, cmp_params);
  add_modulus_option(compare_cmd, cmp_in);

  // profile
  std::string prof_input;
  std::string prof_from;
  std::string prof_to;
  std::string prof_out;
  InputOptions prof_in;
  auto* profile_cmd =
      app.add_subcommand("profile", "Write gray values along a Bresenham line as t,value CSV");
  profile_cmd->add_option("image", prof_input, "Input image")->required();
  profile_cmd->add_option("--from", prof_from, "Start pixel as x,y")->required();
  profile_cmd->add_option("--to", prof_to, "End pixel as x,y")->required();
  profile_cmd->add_option("--out", prof_out, "Output CSV")->required();
  add_modulus_option(profile_cmd, prof_in);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*entropy_cmd) {
      const RingImage image = load_checked(entropy_input, entropy_in);
      std::cout << fixed6(entropy(image).bits) << "\n";
    } else if (*distance_cmd) {
      const RingImage a = load_checked(dist_a, dist_in);
      const RingImage b = load_checked(dist_b, dist_in);
      const double value = dist_kind == "nu" ? nu(a, b) : nu_hat(a, b);
      std::cout << fixed6(value) << "\n";
    } else if (*filter_cmd) {
      const RingImage image = load_checked(filter_input, filter_in);
      save_by_extension(mean_shift_filter_pass(image, filter_params), filter_out, filter_fmt);
    } else if (*segment_cmd) {
      const RingImage image = load_checked(seg_input, seg_in);
      const StoppingRule rule =
          seg_criterion == "new" ? StoppingRule::RingEntropyDistance : StoppingRule::EntropyDiff;
      const CriterionConfig config{rule, seg_epsilon.value_or(CriterionConfig::default_epsilon(rule)),
                                   seg_max_iters};
      const SegmentationResult result = segment(image, seg_params, config);
      save_by_extension(result.final_image, seg_out, seg_fmt);
      write_trace_csv(result.trace, seg_trace);
      const auto& last = result.trace.entries.back();
      std::cout << "stopped: " << to_string(result.trace.stopped_reason) << " after " << last.k
                << " iteration" << (last.k == 1 ? "" : "s") << " (criterion value "
                << fixed6(last.criterion_value) << ")\n";
    } else if (*compare_cmd) {
      const RingImage image = load_checked(cmp_input, cmp_in);
      const SegmentSummary runs[] = {
          {"new", segment(image, cmp_params,
                          {StoppingRule::RingEntropyDistance, cmp_eps_new, cmp_max_iters})},
          {"old", segment(image, cmp_params,
                          {StoppingRule::EntropyDiff, cmp_eps_old, cmp_max_iters})},
      };
      for (const auto& run : runs) {
        save_by_extension(run.result.final_image, cmp_prefix + "_" + run.label + "." + cmp_ext,
                          cmp_fmt);
        write_trace_csv(run.result.trace, cmp_prefix + "_" + run.label + "_trace.csv");
        print_summary(run);
      }
    } else if (*profile_cmd) {
      const auto from = parse_coord(prof_from);
      const auto to = parse_coord(prof_to);
      if (!from || !to) throw UsageError("--from/--to must be given as x,y integers");
      const RingImage image = load_checked(prof_input, prof_in);
      write_profile_csv(extract_profile(image, *from, *to), prof_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
