#include "weaklabel/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "weaklabel/config.hpp"
#include "weaklabel/error.hpp"
#include "weaklabel/io.hpp"
#include "weaklabel/metrics.hpp"
#include "weaklabel/render.hpp"
#include "weaklabel/server.hpp"

namespace weaklabel {

namespace {

using nlohmann::ordered_json;

const char* class_name(int c) {
  switch (c) {
    case kBackground: return "background";
    case kIRF: return "IRF";
    case kSRF: return "SRF";
    case kPED: return "PED";
    default: return "class";
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct SlicFlags {
  int region_size = 0;
  double compactness = 0.0;
  int iterations = 0;
  CLI::Option* region_opt = nullptr;
  CLI::Option* compact_opt = nullptr;
  CLI::Option* iter_opt = nullptr;

  void add(CLI::App* cmd) {
    region_opt = cmd->add_option("--region-size", region_size, "Superpixel grid step in pixels");
    compact_opt = cmd->add_option("--compactness", compactness, "SLIC spatial weight");
    iter_opt = cmd->add_option("--iterations", iterations, "SLIC iterations");
  }
  void apply(PipelineConfig& cfg) const {
    if (region_opt && region_opt->count()) cfg.slic.region_size = region_size;
    if (compact_opt && compact_opt->count()) cfg.slic.compactness = compactness;
    if (iter_opt && iter_opt->count()) cfg.slic.iterations = iterations;
  }
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  PipelineConfig effective_config() const {
    PipelineConfig cfg = config_path_.empty() ? PipelineConfig{} : load_config_file(config_path_);
    superpixel_slic_.apply(cfg);
    genlabel_slic_.apply(cfg);
    if (t_srf_opt_->count()) cfg.sgplg.threshold_srf_irf = t_srf_irf_;
    if (t_ped_opt_->count()) cfg.sgplg.threshold_ped = t_ped_;
    if (distance_opt_->count()) {
      cfg.sgplg.distance = distance_ == "centroid" ? TrustDistance::centroid : TrustDistance::hops;
    }
    if (keep_opt_->count()) cfg.clglr.keep_fraction = keep_fraction_;
    if (gate_opt_->count()) cfg.clglr.trust_gate = trust_gate_;
    if (delta_opt_->count()) {
      if (delta_ == "static") {
        cfg.clglr.trust_mode = TrustRefinement::keep;
      } else {
        try {
          std::size_t used = 0;
          cfg.clglr.delta = std::stod(delta_, &used);
          if (used != delta_.size()) throw std::invalid_argument(delta_);
        } catch (const std::logic_error&) {
          throw ConfigError("--delta expects a number in [0,1] or \"static\", got " + delta_);
        }
        cfg.clglr.trust_mode = TrustRefinement::set_delta;
      }
    }
    cfg.validate();
    if (verbose_) err_ << "effective config:\n" << config_to_json(cfg) << "\n";
    return cfg;
  }

  int cmd_config();
  int cmd_superpixels();
  int cmd_genlabel();
  int cmd_refine();
  int cmd_metrics();
  int cmd_perturb();
  int cmd_serve();

  std::ostream& out_;
  std::ostream& err_;

  std::string config_path_;
  bool verbose_ = false;
  bool json_ = false;

  SlicFlags superpixel_slic_;
  SlicFlags genlabel_slic_;
  double t_srf_irf_ = 0.0;
  double t_ped_ = 0.0;
  std::string distance_;
  double keep_fraction_ = 0.0;
  double trust_gate_ = 0.0;
  std::string delta_;
  CLI::Option* t_srf_opt_ = nullptr;
  CLI::Option* t_ped_opt_ = nullptr;
  CLI::Option* distance_opt_ = nullptr;
  CLI::Option* keep_opt_ = nullptr;
  CLI::Option* gate_opt_ = nullptr;
  CLI::Option* delta_opt_ = nullptr;

  std::string image_path_;
  std::string points_path_;
  std::string output_path_;
  std::string overlay_path_;
  std::string trust_out_path_;
  std::string superpixel_out_path_;

  std::string label_path_;
  std::string trust_path_;
  std::string probs_path_;
  std::string errors_out_path_;
  std::string label_out_path_;

  std::vector<std::string> metric_paths_;
  int num_classes_ = kNumFluidClasses;
  bool pooled_ = false;

  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;

  std::string bind_ = "127.0.0.1:8787";
  std::string ui_dir_;
  std::string store_dir_;
  int max_width_ = 4096;
  int max_height_ = 4096;
  int timeout_ = 30;
};

int Cli::run(const std::vector<std::string>& args) {
  CLI::App app{"Point-annotation pseudo-labels, trust maps and label-noise repair for OCT fluid segmentation",
               "weaklabel"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", config_path_, "JSON config file; command-line flags override it");
  app.add_flag("--verbose", verbose_, "Echo the effective configuration to stderr");
  app.add_flag("--json", json_, "Machine-readable output on stdout");

  auto* config = app.add_subcommand("config", "Print the effective configuration");

  auto* superpixels = app.add_subcommand("superpixels", "Run SLIC and write the block-id map");
  superpixels->add_option("image", image_path_, "Input PGM")->required();
  superpixels->add_option("-o,--output", output_path_, "16-bit block-id PGM")->required();
  superpixels->add_option("--overlay", overlay_path_, "Optional boundary overlay PNG");
  superpixel_slic_.add(superpixels);

  auto* genlabel = app.add_subcommand("genlabel", "Grow pseudo-labels and a trust map from point annotations");
  genlabel->add_option("image", image_path_, "Input PGM")->required();
  genlabel->add_option("points", points_path_, "Points JSON")->required();
  genlabel->add_option("-o,--output", output_path_, "Pseudo-label PGM")->required();
  genlabel->add_option("-t,--trust", trust_out_path_, "Trust map FMAP")->required();
  genlabel->add_option("--superpixels", superpixel_out_path_, "Also write the block-id PGM");
  genlabel->add_option("--overlay", overlay_path_, "Also write a label overlay PNG");
  genlabel_slic_.add(genlabel);
  t_srf_opt_ = genlabel->add_option("--t-srf-irf", t_srf_irf_, "Similarity threshold for IRF and SRF");
  t_ped_opt_ = genlabel->add_option("--t-ped", t_ped_, "Similarity threshold for PED");
  distance_opt_ = genlabel->add_option("--trust-distance", distance_, "hops or centroid")
                      ->check(CLI::IsMember({"hops", "centroid"}));

  auto* refine = app.add_subcommand("refine", "Find and repair mislabeled pixels with confident learning");
  refine->add_option("labels", label_path_, "Pseudo-label PGM")->required();
  refine->add_option("trust", trust_path_, "Trust map FMAP")->required();
  refine->add_option("probs", probs_path_, "Model probability FMAP")->required();
  refine->add_option("--errors", errors_out_path_, "Error map PGM (0/1)")->required();
  refine->add_option("--label-out", label_out_path_, "Refined label PGM")->required();
  refine->add_option("--trust-out", trust_out_path_, "Refined trust FMAP")->required();
  keep_opt_ = refine->add_option("--keep-fraction", keep_fraction_, "Fraction of candidates kept by self-confidence");
  gate_opt_ = refine->add_option("--trust-gate", trust_gate_, "Candidates below this trust are always kept");
  delta_opt_ = refine->add_option("--delta", delta_, "Trust for flagged pixels: a number in [0,1] or \"static\"");

  auto* metrics = app.add_subcommand("metrics", "Dice and IoU of predictions against ground truth");
  metrics->add_option("maps", metric_paths_, "PRED GT [PRED GT ...]")->required();
  metrics->add_option("--num-classes", num_classes_, "Label space size");
  metrics->add_flag("--pooled", pooled_, "Pool pixel counts over all pairs instead of averaging per image");

  auto* perturb_cmd = app.add_subcommand("perturb", "Add seeded Gaussian noise to an image");
  perturb_cmd->add_option("image", image_path_, "Input PGM")->required();
  perturb_cmd->add_option("-o,--output", output_path_, "Output PGM")->required();
  perturb_cmd->add_option("--sigma", sigma_, "Noise standard deviation in intensity units")->required();
  perturb_cmd->add_option("--seed", seed_, "RNG seed")->required();

  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--bind", bind_, "HOST:PORT");
  serve->add_option("--ui-dir", ui_dir_, "Static web UI directory served at /");
  serve->add_option("--store-dir", store_dir_, "Mirror session files into this directory");
  serve->add_option("--max-width", max_width_, "Largest accepted image width");
  serve->add_option("--max-height", max_height_, "Largest accepted image height");
  serve->add_option("--timeout", timeout_, "Per-request read/write timeout in seconds");

  std::vector<const char*> argv{"weaklabel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (config->parsed()) return cmd_config();
    if (superpixels->parsed()) return cmd_superpixels();
    if (genlabel->parsed()) return cmd_genlabel();
    if (refine->parsed()) return cmd_refine();
    if (metrics->parsed()) return cmd_metrics();
    if (perturb_cmd->parsed()) return cmd_perturb();
    if (serve->parsed()) return cmd_serve();
  } catch (const DegenerateJoint& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int Cli::cmd_config() {
  out_ << config_to_json(effective_config()) << "\n";
  return kExitOk;
}

int Cli::cmd_superpixels() {
  const auto cfg = effective_config();
  const auto image = io::read_pgm(io::read_file(image_path_));
  const auto map = slic(image, cfg.slic);
  io::write_file(output_path_, io::write_superpixel_pgm(map));
  if (!overlay_path_.empty()) {
    io::write_file(overlay_path_, encode_png(render_overlay(image, &map, nullptr)));
  }
  const double mean = static_cast<double>(map.pixel_count()) / map.num_blocks();
  if (json_) {
    ordered_json j;
    j["blocks"] = map.num_blocks();
    j["width"] = map.width();
    j["height"] = map.height();
    j["mean_block_pixels"] = mean;
    out_ << j.dump() << "\n";
  } else {
    out_ << map.num_blocks() << " blocks (" << map.width() << "x" << map.height() << ", mean "
         << fixed(mean, 1) << " pixels per block)\n";
  }
  return kExitOk;
}

int Cli::cmd_genlabel() {
  const auto cfg = effective_config();
  const auto image = io::read_pgm(io::read_file(image_path_));
  const auto points = io::read_points(io::read_file(points_path_));
  const auto result = generate(image, points, cfg.sgplg, cfg.slic);
  io::write_file(output_path_, io::write_pgm(result.labels));
  io::write_file(trust_out_path_, io::write_fmap(result.trust));
  if (!superpixel_out_path_.empty()) {
    io::write_file(superpixel_out_path_, io::write_superpixel_pgm(result.superpixels));
  }
  if (!overlay_path_.empty()) {
    io::write_file(overlay_path_,
                   encode_png(render_overlay(image, &result.superpixels, &result.labels)));
  }
  const auto counts = result.labels.class_counts();
  if (json_) {
    ordered_json j;
    j["labeled_counts"] = ordered_json::object();
    for (int c = 1; c < result.labels.num_classes(); ++c) j["labeled_counts"][std::to_string(c)] = counts[c];
    j["superpixels"] = result.superpixels.num_blocks();
    out_ << j.dump() << "\n";
  } else {
    out_ << "labeled pixels:";
    for (int c = 1; c < result.labels.num_classes(); ++c) out_ << " " << class_name(c) << "=" << counts[c];
    out_ << " (" << result.superpixels.num_blocks() << " superpixels)\n";
  }
  return kExitOk;
}

int Cli::cmd_refine() {
  const auto cfg = effective_config();
  const auto probs = io::read_probmap(io::read_file(probs_path_));
  const auto labels = io::read_label_pgm(io::read_file(label_path_), probs.num_classes());
  const auto trust = io::read_trustmap(io::read_file(trust_path_));
  const auto estimate = estimate_errors(probs, labels, trust, cfg.clglr);
  const auto refined = refine_labels(labels, probs, estimate.errors);
  const auto refined_trust = refine_trust(trust, estimate.errors, cfg.clglr);
  io::write_file(errors_out_path_, io::write_pgm(estimate.errors.as_label_map()));
  io::write_file(label_out_path_, io::write_pgm(refined));
  io::write_file(trust_out_path_, io::write_fmap(refined_trust));

  const int m = estimate.joint.num_classes;
  if (json_) {
    ordered_json j;
    j["joint"] = ordered_json::array();
    for (int i = 0; i < m; ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < m; ++k) row.push_back(estimate.joint.q(i, k));
      j["joint"].push_back(row);
    }
    j["flagged_pixels"] = estimate.errors.count();
    out_ << j.dump() << "\n";
  } else {
    out_ << "joint distribution Q (rows: given label, columns: latent label)\n";
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) out_ << (k ? " " : "") << fixed(estimate.joint.q(i, k), 6);
      out_ << "\n";
    }
    out_ << "flagged pixels: " << estimate.errors.count() << "\n";
  }
  return kExitOk;
}

int Cli::cmd_metrics() {
  if (metric_paths_.size() % 2 != 0) throw ValidationError("metrics expects PRED GT pairs");
  std::vector<SegScores> per_image;
  std::optional<OverlapCounts> pooled;
  for (std::size_t k = 0; k < metric_paths_.size(); k += 2) {
    const auto pred = io::read_label_pgm(io::read_file(metric_paths_[k]), num_classes_);
    const auto gt = io::read_label_pgm(io::read_file(metric_paths_[k + 1]), num_classes_);
    const auto counts = overlap_counts(pred, gt);
    per_image.push_back(scores_from_counts(counts));
    if (pooled) {
      *pooled += counts;
    } else {
      pooled = counts;
    }
  }
  const auto s = pooled_ ? scores_from_counts(*pooled) : average_scores(per_image);
  const int m = static_cast<int>(s.dice_per_class.size());
  if (json_) {
    ordered_json j;
    j["dice_per_class"] = s.dice_per_class;
    j["iou_per_class"] = s.iou_per_class;
    j["dsc"] = s.mean_dice;
    j["miou"] = s.mean_iou;
    j["pairs"] = per_image.size();
    j["aggregation"] = pooled_ ? "pooled" : "per-image";
    out_ << j.dump() << "\n";
  } else {
    for (int c = 0; c < m; ++c) {
      out_ << "Dice " << class_name(c) << (c >= kNumFluidClasses ? std::to_string(c) : "") << ": "
           << fixed(100.0 * s.dice_per_class[c], 2) << (s.present[c] ? "" : " (absent)") << "\n";
    }
    out_ << "DSC: " << fixed(100.0 * s.mean_dice, 2) << "\n";
    for (int c = 0; c < m; ++c) {
      out_ << "IoU " << class_name(c) << (c >= kNumFluidClasses ? std::to_string(c) : "") << ": "
           << fixed(s.iou_per_class[c], 4) << "\n";
    }
    out_ << "mIoU: " << fixed(s.mean_iou, 4) << "\n";
  }
  return kExitOk;
}

int Cli::cmd_perturb() {
  (void)effective_config();
  const auto image = io::read_pgm(io::read_file(image_path_));
  io::write_file(output_path_, io::write_pgm(perturb(image, sigma_, seed_)));
  return kExitOk;
}

int Cli::cmd_serve() {
  ServerOptions opts;
  opts.defaults = effective_config();
  const auto colon = bind_.rfind(':');
  if (colon == std::string::npos) throw ConfigError("--bind expects HOST:PORT, got " + bind_);
  opts.host = bind_.substr(0, colon);
  try {
    opts.port = std::stoi(bind_.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw ConfigError("--bind port is not a number: " + bind_);
  }
  opts.ui_dir = ui_dir_;
  opts.store_dir = store_dir_;
  opts.max_width = max_width_;
  opts.max_height = max_height_;
  opts.timeout_seconds = timeout_;
  AnnotationService service(opts);
  HttpServer server(service);
  const int port = server.bind();
  out_ << "listening on http://" << opts.host << ":" << port << "\n" << std::flush;
  server.listen();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace weaklabel
