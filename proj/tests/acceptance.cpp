// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"
#include "weaklabel/cli.hpp"
#include "weaklabel/config.hpp"
#include "weaklabel/conflearn.hpp"
#include "weaklabel/error.hpp"
#include "weaklabel/io.hpp"
#include "weaklabel/metrics.hpp"
#include "weaklabel/mtmath.hpp"
#include "weaklabel/server.hpp"
#include "weaklabel/sgplg.hpp"

using namespace weaklabel;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later checks are still evaluated but only the
// first message is reported.
struct Checker {
  Outcome o;
  void expect(bool ok, const std::string& what) {
    if (!ok && o.pass) {
      o.pass = false;
      o.detail = what;
    }
  }
};

struct Fixture {
  std::string name;
  GrayImage image;
  PointAnnotationSet points;
};

// Synthetic images at most 64x64 with annotations that never put two
// classes in one block.
std::vector<Fixture> sgplg_corpus() {
  std::vector<Fixture> out;
  std::mt19937 rng(2024);
  auto add = [&](std::string name, GrayImage img) {
    const auto map = slic(img);
    for (int attempt = 0; attempt < 50; ++attempt) {
      auto pts = fixtures::random_points(rng, img.width(), img.height());
      try {
        seed_superpixel_labels(rasterize_points(pts, img.width(), img.height()), map);
        out.push_back({std::move(name), std::move(img), std::move(pts)});
        return;
      } catch (const SeedConflict&) {
      }
    }
  };
  add("stripe fixture", fixtures::noisy_stripes());
  add("stripes 39", fixtures::stripes_39());
  for (int i = 0; i < 8; ++i) {
    const int w = 32 + 4 * i, h = 64 - 3 * i;
    add("stripes " + std::to_string(i),
        fixtures::stripes(w, h, 6 + i, {30 + 10 * i, 90, 160 - 5 * i, 220}, i % 2 == 0, 4 * i, i));
  }
  for (int i = 0; i < 7; ++i) {
    add("rectangles " + std::to_string(i), fixtures::nested_rectangles(40 + 3 * i, 64 - 2 * i, 2 + i % 4, 3 * i, 10 + i));
  }
  for (int i = 0; i < 7; ++i) {
    add("ramp " + std::to_string(i), fixtures::gradient_ramp(64 - 4 * i, 30 + 4 * i, i % 2 == 1, 2 * i, 20 + i));
  }
  out.push_back({"uniform flood", fixtures::uniform(39, 39), {{{1, 1, kIRF}}, {}}});
  return out;
}

Outcome sgplg_oracle() {
  Checker c;
  const auto corpus = sgplg_corpus();
  c.expect(corpus.size() >= 20, "fixture corpus too small");
  std::size_t grown = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& f : corpus) {
    const auto out = generate(f.image, f.points);
    const auto pts = rasterize_points(f.points, f.image.width(), f.image.height());
    const auto ref = oracle::sgplg(f.image, out.superpixels.assignment(), pts, 0.6, 0.5);
    c.expect(!ref.conflict, f.name + ": oracle saw a conflict");
    c.expect(std::vector<std::uint8_t>(out.labels.data().begin(), out.labels.data().end()) == ref.labels,
             f.name + ": labels differ");
    c.expect(std::vector<float>(out.trust.data().begin(), out.trust.data().end()) == ref.trust,
             f.name + ": trust differs");
    const auto seeds = seed_superpixel_labels(pts, out.superpixels);
    grown += out.labels.pixel_count() - out.labels.class_counts()[0] >
             to_pixel_labels(seeds, out.superpixels).pixel_count() -
                 to_pixel_labels(seeds, out.superpixels).class_counts()[0];
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 5.0, "took " + std::to_string(secs) + " s");
  if (c.o.pass) {
    std::ostringstream d;
    d << corpus.size() << " fixtures, " << grown << " with growth beyond seeds, " << secs << " s";
    c.o.detail = d.str();
  }
  return c.o;
}

Outcome trust_formula() {
  Checker c;
  double worst = 0.0;
  for (int d = 0; d <= 30; ++d) {
    const double expected = std::max(1.0 - 0.1 * d / 2, 0.0);
    worst = std::max(worst, std::abs(trust_value(d) - expected));
  }
  c.expect(worst == 0.0, "max abs error " + std::to_string(worst));
  c.expect(trust_value(1) == 0.95 && trust_value(20) == 0.0 && trust_value(30) == 0.0, "endpoints");
  if (c.o.pass) c.o.detail = "d = 0..30, max abs error 0";
  return c.o;
}

Outcome cl_recovery() {
  Checker c;
  const auto truth = fixtures::quadrant_truth(32, 32);
  const auto probs = fixtures::one_hot(truth);
  const TrustMap trust(32, 32, 1.0f);
  ClgrConfig cfg;
  cfg.keep_fraction = 1.0;
  int runs = 0;
  for (int k : {1, 3, 5}) {
    for (int seed = 0; seed < 50; ++seed) {
      std::mt19937 rng(1000 * k + seed);
      const auto corrupted = fixtures::flip_patches(truth, rng, k, 5);
      const auto err = estimate_error_map(probs, corrupted.noisy, trust, cfg);
      const std::vector<std::uint8_t> bits(err.bits().begin(), err.bits().end());
      const std::string tag = "k=" + std::to_string(k) + " seed=" + std::to_string(seed);
      c.expect(bits == corrupted.flip_mask, tag + ": error map differs from flip mask");
      c.expect(refine_labels(corrupted.noisy, probs, err) == truth, tag + ": refined labels differ from truth");
      ++runs;
    }
  }
  if (c.o.pass) c.o.detail = std::to_string(runs) + " corrupted maps recovered exactly";
  return c.o;
}

Outcome joint_invariants() {
  Checker c;
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto y = fixtures::random_labels(rng, 16, 16, 4);
    const auto p = fixtures::random_probs(rng, 16, 16, 4, 0.5 * (trial % 5), &y);
    std::vector<float> u(256);
    for (auto& v : u) v = std::uniform_real_distribution<float>(0.0f, 1.0f)(rng);
    const TrustMap trust(16, 16, u);
    ClgrConfig cfg;
    cfg.keep_fraction = 0.1 * (trial % 11);
    cfg.trust_gate = 0.05 * (trial % 21);
    const auto ref = oracle::confident_learning(p, y, trust, cfg.keep_fraction, cfg.trust_gate);
    const std::string tag = "instance " + std::to_string(trial);
    if (ref.degenerate) {
      bool threw = false;
      try {
        estimate_errors(p, y, trust, cfg);
      } catch (const DegenerateJoint&) {
        threw = true;
      }
      c.expect(threw, tag + ": degenerate joint not reported");
      continue;
    }
    const auto est = estimate_errors(p, y, trust, cfg);
    const auto t = class_thresholds(p, y);
    const auto counts = y.class_counts();
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      c.expect(t.t[i].has_value() == ref.t[i].has_value(), tag + ": threshold presence");
      if (t.t[i] && ref.t[i]) c.expect(std::abs(*t.t[i] - *ref.t[i]) <= 1e-12, tag + ": threshold value");
      std::uint64_t row = 0;
      for (int j = 0; j < 4; ++j) {
        row += est.joint.c(i, j);
        total += est.joint.q(i, j);
        c.expect(est.joint.c(i, j) == ref.C[i][j], tag + ": confusion differs");
        c.expect(std::abs(est.joint.c_tilde(i, j) - ref.C_tilde[i][j]) <= 1e-9, tag + ": calibrated differs");
        c.expect(std::abs(est.joint.q(i, j) - ref.Q[i][j]) <= 1e-12, tag + ": joint differs");
      }
      c.expect(row <= counts[i], tag + ": confusion row exceeds class count");
    }
    c.expect(std::abs(total - 1.0) <= 1e-9, tag + ": joint sums to " + std::to_string(total));
    c.expect(std::vector<std::uint8_t>(est.errors.bits().begin(), est.errors.bits().end()) == ref.err,
             tag + ": error map differs");
  }
  if (c.o.pass) c.o.detail = "100 instances, 16x16, m=4";
  return c.o;
}

Outcome defaults() {
  Checker c;
  std::ostringstream out, err;
  const int code = run_cli({"--verbose", "config"}, out, err);
  c.expect(code == 0, "config command failed");
  const auto j = json::parse(out.str());
  c.expect(j["sgplg"]["threshold_srf_irf"].get<double>() == 0.6, "t_SRF/IRF");
  c.expect(j["sgplg"]["threshold_ped"].get<double>() == 0.5, "t_PED");
  c.expect(j["slic"]["region_size"].get<int>() == 13, "block size");
  c.expect(j["clglr"]["delta"].get<double>() == 1.0, "delta");
  c.expect(j["clglr"]["keep_fraction"].get<double>() == 0.8, "keep fraction");
  c.expect(j["clglr"]["trust_gate"].get<double>() == 0.8, "trust gate");
  c.expect(j["loss"]["ema_decay"].get<double>() == 0.99, "EMA decay");
  c.expect(j["loss"]["w_max"].get<double>() == 0.1, "w_max");
  c.expect(j["loss"]["alpha"].get<double>() == 1.0 && j["loss"]["beta"].get<double>() == 1.0, "alpha/beta");
  c.expect(err.str().find(out.str().substr(0, out.str().size() - 1)) != std::string::npos,
           "--verbose did not echo the effective config");
  if (c.o.pass) c.o.detail = "0.6 / 0.5 / 13 / 1 / 0.8 / 0.8 / 0.99 / 0.1 / 1 / 1";
  return c.o;
}

Outcome training_math() {
  Checker c;
  const LossWeights w;
  c.expect(ramp_weight(w.t_max, w) == 0.1, "lambda(t_max) != 0.1");
  c.expect(std::abs(ramp_weight(0, w) - 0.1 * std::exp(-5.0)) <= 1e-9, "lambda(0)");

  std::mt19937 rng(5);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> t0(256), s(256);
  for (auto& v : t0) v = n(rng);
  for (auto& v : s) v = n(rng);
  ParamVector teacher(t0);
  const ParamVector student(s);
  for (int step = 0; step < 100; ++step) teacher = ema_update(teacher, student, w.ema_decay);
  const double g = std::pow(w.ema_decay, 100);
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i) worst = std::max(worst, std::abs(teacher[i] - (g * t0[i] + (1 - g) * s[i])));
  c.expect(worst <= 1e-6, "EMA identity error " + std::to_string(worst));

  double ce_worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = fixtures::random_labels(rng, 16, 16, 4);
    const auto p = fixtures::random_probs(rng, 16, 16, 4);
    ce_worst = std::max(ce_worst, std::abs(weighted_ce(p, y, TrustMap(16, 16, 1.0f)) - cross_entropy(p, y)));
  }
  c.expect(ce_worst <= 1e-9, "weighted CE with unit trust differs by " + std::to_string(ce_worst));
  if (c.o.pass) {
    std::ostringstream d;
    d << "lambda(0) = " << ramp_weight(0, w) << ", EMA error " << worst << ", CE error " << ce_worst;
    c.o.detail = d.str();
  }
  return c.o;
}

Outcome metrics_oracle() {
  Checker c;
  std::mt19937 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = fixtures::random_labels(rng, 16, 16, 4);
    const auto g = fixtures::random_labels(rng, 16, 16, 4);
    const auto s = miou(p, g);
    const auto ref = oracle::set_metrics(p, g);
    double fg = 0.0, all = 0.0;
    int nfg = 0, nall = 0;
    for (int k = 0; k < 4; ++k) {
      c.expect(std::abs(s.dice_per_class[k] - ref.dice[k]) <= 1e-9, "dice differs");
      c.expect(std::abs(s.iou_per_class[k] - ref.iou[k]) <= 1e-9, "iou differs");
      if (!ref.present[k]) continue;
      all += ref.iou[k];
      ++nall;
      if (k > 0) {
        fg += ref.dice[k];
        ++nfg;
      }
    }
    c.expect(std::abs(s.mean_dice - (nfg ? fg / nfg : 1.0)) <= 1e-9, "mean Dice differs");
    c.expect(std::abs(s.mean_iou - (nall ? all / nall : 1.0)) <= 1e-9, "mIoU differs");
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = fixtures::random_labels(rng, 16, 16, 2);
    const auto g = fixtures::random_labels(rng, 16, 16, 2);
    const auto s = dice(p, g);
    const double d = s.dice_per_class[1];
    c.expect(std::abs(s.iou_per_class[1] - d / (2 - d)) <= 1e-12, "IoU != D/(2-D)");
  }
  if (c.o.pass) c.o.detail = "100 random 16x16 pairs plus 100 single-class masks";
  return c.o;
}

template <typename Fn>
bool rejects(Fn&& fn, corpus::Expect expect) {
  try {
    fn();
  } catch (const FormatError&) {
    return expect == corpus::Expect::format;
  } catch (const ValidationError&) {
    return expect == corpus::Expect::validation;
  } catch (...) {
    return false;
  }
  return false;
}

Outcome codecs() {
  Checker c;
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto img = corpus::random_image(rng);
    c.expect(io::read_pgm(io::write_pgm(img)) == img, "PGM round trip");
    const auto labels = fixtures::random_labels(rng, img.width(), img.height(), 4);
    c.expect(io::read_label_pgm(io::write_pgm(labels)) == labels, "label PGM round trip");

    const auto r = corpus::random_raster(rng);
    const auto bytes = io::write_fmap(r);
    const auto back = io::read_fmap(bytes);
    c.expect(back.width == r.width && back.height == r.height && back.channels == r.channels &&
                 std::memcmp(back.values.data(), r.values.data(), r.values.size() * sizeof(float)) == 0,
             "FMAP round trip");
    c.expect(io::write_fmap(back) == bytes, "FMAP re-encode");

    const auto pts = corpus::random_point_set(rng);
    const auto text = io::write_points(pts);
    c.expect(io::read_points(text) == pts, "points round trip");
    c.expect(io::write_points(io::read_points(text)) == text, "points re-encode");
  }
  std::size_t malformed = 0;
  const auto pgm = corpus::pgm_cases();
  const auto fmap = corpus::fmap_cases();
  const auto points = corpus::points_cases();
  c.expect(pgm.size() >= 10 && fmap.size() >= 10 && points.size() >= 10, "malformed corpus too small");
  for (const auto& m : pgm) {
    c.expect(rejects([&] { io::read_pgm(m.bytes); }, m.expect), "PGM accepted: " + m.name);
    ++malformed;
  }
  for (const auto& m : fmap) {
    c.expect(rejects([&] { io::read_fmap(m.bytes); }, m.expect), "FMAP accepted: " + m.name);
    ++malformed;
  }
  for (const auto& m : points) {
    c.expect(rejects([&] { io::read_points(m.bytes); }, m.expect), "points accepted: " + m.name);
    ++malformed;
  }
  if (c.o.pass) {
    c.o.detail = "1000 instances per format, " + std::to_string(malformed) + " malformed inputs rejected (" +
                 std::to_string(pgm.size()) + " PGM, " + std::to_string(fmap.size()) + " FMAP, " +
                 std::to_string(points.size()) + " points)";
  }
  return c.o;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out += ch;
  }
  return out + "'";
}

Outcome cli_server_parity() {
  Checker c;
  fixtures::TempDir dir("weaklabel_parity");
  ServerOptions opts;
  opts.port = 0;
  AnnotationService service(opts);
  HttpServer server(service);
  const int port = server.start_background();
  httplib::Client client("127.0.0.1", port);

  std::mt19937 rng(8);
  std::vector<Fixture> cases{
      {"stripe fixture", fixtures::noisy_stripes(), fixtures::noisy_stripes_points()},
      {"stripes 39", fixtures::stripes_39(), {{{6, 20, kIRF}}, {}}},
      {"rectangles", fixtures::nested_rectangles(64, 48, 4, 10, 3), {{{32, 24, kSRF}, {3, 3, kIRF}}, {}}},
      {"ramp", fixtures::gradient_ramp(60, 40, false, 6, 4), {{{10, 5, kIRF}}, {{{5, 38}, {50, 36}}}}},
      {"OCT-sized", fixtures::stripes(600, 250, 20, {40, 90, 150, 70, 200, 120}, false, 12, 3),
       {{{100, 30, kIRF}, {400, 90, kSRF}}, {{{200, 230}, {320, 228}, {380, 232}}}}},
  };
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& f = cases[k];
    const auto img_path = dir.file("img" + std::to_string(k) + ".pgm");
    const auto pts_path = dir.file("pts" + std::to_string(k) + ".json");
    const auto label_path = dir.file("label" + std::to_string(k) + ".pgm");
    const auto trust_path = dir.file("trust" + std::to_string(k) + ".fmap");
    io::write_file(img_path, io::write_pgm(f.image));
    io::write_file(pts_path, io::write_points(f.points));
    const std::string cmd = shell_quote(WEAKLABEL_TOOL) + " genlabel " + shell_quote(img_path) + " " +
                            shell_quote(pts_path) + " -o " + shell_quote(label_path) + " -t " +
                            shell_quote(trust_path) + " > /dev/null";
    c.expect(std::system(cmd.c_str()) == 0, f.name + ": CLI failed");

    auto created = client.Post("/api/sessions", io::write_pgm(f.image), "image/x-portable-graymap");
    if (!created || created->status != 201) {
      c.expect(false, f.name + ": session creation failed");
      continue;
    }
    const std::string base = "/api/sessions/" + json::parse(created->body)["session_id"].get<std::string>();
    auto put = client.Put(base + "/points", io::write_points(f.points), "application/json");
    c.expect(put && put->status == 200, f.name + ": PUT points failed");
    auto label = client.Get(base + "/label.pgm");
    auto trust = client.Get(base + "/trust.fmap");
    c.expect(label && label->status == 200 && label->body == io::read_file(label_path),
             f.name + ": label.pgm differs");
    c.expect(trust && trust->status == 200 && trust->body == io::read_file(trust_path),
             f.name + ": trust.fmap differs");
  }
  server.stop();
  if (c.o.pass) c.o.detail = std::to_string(cases.size()) + " fixtures, label.pgm and trust.fmap byte-identical";
  return c.o;
}

Outcome monotonicity() {
  Checker c;
  const auto img = fixtures::noisy_stripes();
  const auto map = slic(img);
  const auto pts = fixtures::noisy_stripes_points();
  const std::vector<double> sweep{0.3, 0.5, 0.7, 0.9, 1.0};
  std::ostringstream d;
  for (int knob = 0; knob < 2; ++knob) {
    std::vector<std::size_t> prev(kNumFluidClasses, SIZE_MAX);
    const std::vector<int> watched = knob == 0 ? std::vector<int>{kIRF, kSRF} : std::vector<int>{kPED};
    d << (knob == 0 ? "IRF/SRF" : "; PED");
    for (double t : sweep) {
      SgplgConfig cfg;
      if (knob == 0) cfg.threshold_srf_irf = t;
      else cfg.threshold_ped = t;
      const auto counts = generate(img, map, pts, cfg).labels.class_counts();
      for (int cls : watched) {
        c.expect(counts[cls] <= prev[cls], "class " + std::to_string(cls) + " grew at t=" + std::to_string(t));
        prev[cls] = counts[cls];
      }
      d << " " << t << ":";
      for (std::size_t i = 0; i < watched.size(); ++i) d << (i ? "/" : "") << counts[watched[i]];
    }
  }
  if (c.o.pass) c.o.detail = d.str();
  return c.o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"SGPLG oracle equivalence", sgplg_oracle},
      {"trust formula", trust_formula},
      {"confident-learning recovery", cl_recovery},
      {"joint-distribution invariants", joint_invariants},
      {"reference defaults", defaults},
      {"training math", training_math},
      {"metrics oracle", metrics_oracle},
      {"codec round trips", codecs},
      {"CLI/server parity", cli_server_parity},
      {"threshold monotonicity", monotonicity},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << "  (" << o.detail << ")\n" << std::flush;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
