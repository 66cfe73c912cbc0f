#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "weaklabel/config.hpp"
#include "weaklabel/error.hpp"
#include "weaklabel/io.hpp"

using namespace weaklabel;
using nlohmann::json;

TEST_CASE("defaults are the reference settings") {
  const PipelineConfig cfg;
  CHECK(cfg.sgplg.threshold_srf_irf == 0.6);
  CHECK(cfg.sgplg.threshold_ped == 0.5);
  CHECK(cfg.slic.region_size == 13);
  CHECK(cfg.clglr.delta == 1.0);
  CHECK(cfg.clglr.keep_fraction == 0.8);
  CHECK(cfg.clglr.trust_gate == 0.8);
  CHECK(cfg.loss.alpha == 1.0);
  CHECK(cfg.loss.beta == 1.0);
  CHECK(cfg.loss.ema_decay == 0.99);
  CHECK(cfg.loss.w_max == 0.1);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config_to_json round trips through merge_config") {
  PipelineConfig cfg;
  cfg.sgplg.threshold_ped = 0.75;
  cfg.sgplg.distance = TrustDistance::centroid;
  cfg.clglr.trust_mode = TrustRefinement::keep;
  cfg.slic.region_size = 9;
  const auto text = config_to_json(cfg);
  CHECK(merge_config(PipelineConfig{}, text) == cfg);
  const auto j = json::parse(text);
  CHECK(j["clglr"]["delta"] == "static");
  CHECK(j["sgplg"]["trust_distance"] == "centroid");
}

TEST_CASE("merge_config: partial patches and no-op patches") {
  const PipelineConfig base;
  CHECK(merge_config(base, "{}") == base);
  const auto p = merge_config(base, R"({"sgplg": {"threshold_srf_irf": 0.7}})");
  CHECK(p.sgplg.threshold_srf_irf == 0.7);
  CHECK(p.sgplg.threshold_ped == 0.5);
  const auto d = merge_config(base, R"({"clglr": {"delta": 0.25}})");
  CHECK(d.clglr.delta == 0.25);
  CHECK(d.clglr.trust_mode == TrustRefinement::set_delta);
}

TEST_CASE("merge_config: rejections") {
  const PipelineConfig base;
  for (const char* bad : {
           R"({"sgplg": {"threshold_srf_irf": 1.5}})",
           R"({"sgplg": {"threshold_ped": -0.2}})",
           R"({"sgplg": {"threshold_ped": "high"}})",
           R"({"sgplg": {"trust_distance": "manhattan"}})",
           R"({"slic": {"region_size": 1}})",
           R"({"slic": {"region_size": 2.5}})",
           R"({"clglr": {"keep_fraction": 2}})",
           R"({"clglr": {"delta": "dynamic"}})",
           R"({"loss": {"ema_decay": 1.0}})",
           R"({"loss": {"t_max": 0}})",
           R"({"bogus": {}})",
           R"({"slic": {"regionsize": 13}})",
           R"({"slic": 13})",
           R"([1, 2])",
           "{not json",
       }) {
    INFO(bad);
    CHECK_THROWS_AS(merge_config(base, bad), ConfigError);
  }
}

TEST_CASE("load_config_file") {
  const auto dir = std::filesystem::temp_directory_path() / "weaklabel_config_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  io::write_file(path, R"({"slic": {"region_size": 7}})");
  CHECK(load_config_file(path).slic.region_size == 7);
  CHECK_THROWS_AS(load_config_file((dir / "none.json").string()), IoError);
  std::filesystem::remove_all(dir);
}
