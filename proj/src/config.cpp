#include "weaklabel/config.hpp"

#include "json.hpp"
#include "weaklabel/error.hpp"
#include "weaklabel/io.hpp"

namespace weaklabel {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* distance_name(TrustDistance d) { return d == TrustDistance::hops ? "hops" : "centroid"; }

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(key + " is out of range");
  }
  return static_cast<int>(x);
}

template <class Fn>
void each_key(const json& section, const std::string& name, Fn&& fn) {
  if (!section.is_object()) throw ConfigError(name + " must be an object");
  for (auto it = section.begin(); it != section.end(); ++it) fn(it.key(), it.value(), name + "." + it.key());
}

[[noreturn]] void unknown(const std::string& path) { throw ConfigError("unknown config key " + path); }

}  // namespace

void PipelineConfig::validate() const {
  if (slic.region_size < 2) throw ConfigError("slic.region_size must be >= 2");
  if (slic.iterations < 1) throw ConfigError("slic.iterations must be >= 1");
  if (!(slic.compactness >= 0.0) || !std::isfinite(slic.compactness)) {
    throw ConfigError("slic.compactness must be finite and >= 0");
  }
  sgplg.validate();
  clglr.validate();
  loss.validate();
}

std::string config_to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["slic"]["region_size"] = cfg.slic.region_size;
  j["slic"]["compactness"] = cfg.slic.compactness;
  j["slic"]["iterations"] = cfg.slic.iterations;
  j["sgplg"]["threshold_srf_irf"] = cfg.sgplg.threshold_srf_irf;
  j["sgplg"]["threshold_ped"] = cfg.sgplg.threshold_ped;
  j["sgplg"]["trust_init"] = cfg.sgplg.trust_init;
  j["sgplg"]["trust_seed"] = cfg.sgplg.trust_seed;
  j["sgplg"]["decay_per_hop"] = cfg.sgplg.decay_per_hop;
  j["sgplg"]["trust_distance"] = distance_name(cfg.sgplg.distance);
  j["clglr"]["keep_fraction"] = cfg.clglr.keep_fraction;
  j["clglr"]["trust_gate"] = cfg.clglr.trust_gate;
  if (cfg.clglr.trust_mode == TrustRefinement::keep) {
    j["clglr"]["delta"] = "static";
  } else {
    j["clglr"]["delta"] = cfg.clglr.delta;
  }
  j["loss"]["alpha"] = cfg.loss.alpha;
  j["loss"]["beta"] = cfg.loss.beta;
  j["loss"]["w_max"] = cfg.loss.w_max;
  j["loss"]["t_max"] = cfg.loss.t_max;
  j["loss"]["ema_decay"] = cfg.loss.ema_decay;
  return j.dump(2);
}

PipelineConfig merge_config(const PipelineConfig& base, std::string_view patch_json) {
  json patch;
  try {
    patch = json::parse(patch_json.begin(), patch_json.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config document: ") + e.what());
  }
  if (patch.is_null()) return base;
  PipelineConfig cfg = base;
  each_key(patch, "config", [&](const std::string& section, const json& body, const std::string&) {
    if (section == "slic") {
      each_key(body, "slic", [&](const std::string& k, const json& v, const std::string& path) {
        if (k == "region_size") cfg.slic.region_size = integer(v, path);
        else if (k == "compactness") cfg.slic.compactness = number(v, path);
        else if (k == "iterations") cfg.slic.iterations = integer(v, path);
        else unknown(path);
      });
    } else if (section == "sgplg") {
      each_key(body, "sgplg", [&](const std::string& k, const json& v, const std::string& path) {
        if (k == "threshold_srf_irf") cfg.sgplg.threshold_srf_irf = number(v, path);
        else if (k == "threshold_ped") cfg.sgplg.threshold_ped = number(v, path);
        else if (k == "trust_init") cfg.sgplg.trust_init = number(v, path);
        else if (k == "trust_seed") cfg.sgplg.trust_seed = number(v, path);
        else if (k == "decay_per_hop") cfg.sgplg.decay_per_hop = number(v, path);
        else if (k == "trust_distance") {
          if (v == "hops") cfg.sgplg.distance = TrustDistance::hops;
          else if (v == "centroid") cfg.sgplg.distance = TrustDistance::centroid;
          else throw ConfigError(path + " must be \"hops\" or \"centroid\"");
        } else unknown(path);
      });
    } else if (section == "clglr") {
      each_key(body, "clglr", [&](const std::string& k, const json& v, const std::string& path) {
        if (k == "keep_fraction") cfg.clglr.keep_fraction = number(v, path);
        else if (k == "trust_gate") cfg.clglr.trust_gate = number(v, path);
        else if (k == "delta") {
          if (v == "static") {
            cfg.clglr.trust_mode = TrustRefinement::keep;
          } else {
            cfg.clglr.delta = number(v, path);
            cfg.clglr.trust_mode = TrustRefinement::set_delta;
          }
        } else unknown(path);
      });
    } else if (section == "loss") {
      each_key(body, "loss", [&](const std::string& k, const json& v, const std::string& path) {
        if (k == "alpha") cfg.loss.alpha = number(v, path);
        else if (k == "beta") cfg.loss.beta = number(v, path);
        else if (k == "w_max") cfg.loss.w_max = number(v, path);
        else if (k == "t_max") cfg.loss.t_max = number(v, path);
        else if (k == "ema_decay") cfg.loss.ema_decay = number(v, path);
        else unknown(path);
      });
    } else {
      unknown(section);
    }
  });
  cfg.validate();
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  return merge_config(PipelineConfig{}, io::read_file(path));
}

}  // namespace weaklabel
