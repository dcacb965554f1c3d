#include "turbo/weight_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace turbo {

namespace {

using nlohmann::json;

json subnet_to_json(const SubnetWeights& sw, WeightVariant v) {
  const int k = static_cast<int>(sw.elw.size());
  json out = json::object();
  if (variant_has_gw(v)) {
    json gw = json::array();
    for (int t = 0; t < k; ++t) {
      json stage = json::array();
      for (int b = 0; b < kNumBranches; ++b)
        for (int slot = 0; slot < 3; ++slot)
          if (gw_slot_present(b, slot)) stage.push_back(sw.gw[t][b][slot]);
      gw.push_back(std::move(stage));
    }
    out["gw"] = std::move(gw);
  }
  if (variant_has_plw(v)) {
    json plw = json::array();
    for (int t = 0; t < k; ++t) {
      json stage = json::array();
      for (int f = 0; f < 6; ++f)
        for (int i = 0; i < kNumStates; ++i) stage.push_back(sw.plw[t][f][i]);
      plw.push_back(std::move(stage));
    }
    out["plw"] = std::move(plw);
  }
  if (variant_has_elw(v)) {
    json elw = json::array();
    for (int t = 0; t < k; ++t) {
      json stage = json::array();
      for (int slot = 0; slot < 3; ++slot) stage.push_back(sw.elw[t][slot]);
      elw.push_back(std::move(stage));
    }
    out["elw"] = std::move(elw);
  }
  return out;
}

void subnet_from_json(const json& in, WeightVariant v, int k, SubnetWeights& sw) {
  sw.init(k, 1.0);
  if (variant_has_gw(v)) {
    const auto& gw = in.at("gw");
    if (static_cast<int>(gw.size()) != k) throw std::runtime_error("weight file: gw stage count");
    for (int t = 0; t < k; ++t) {
      const auto& stage = gw[t];
      std::size_t idx = 0;
      for (int b = 0; b < kNumBranches; ++b)
        for (int slot = 0; slot < 3; ++slot)
          if (gw_slot_present(b, slot)) {
            if (idx >= stage.size()) throw std::runtime_error("weight file: gw stage too short");
            sw.gw[t][b][slot] = stage[idx++].get<double>();
          }
      if (idx != stage.size()) throw std::runtime_error("weight file: gw stage too long");
    }
  }
  if (variant_has_plw(v)) {
    const auto& plw = in.at("plw");
    if (static_cast<int>(plw.size()) != k) throw std::runtime_error("weight file: plw stage count");
    for (int t = 0; t < k; ++t) {
      const auto& stage = plw[t];
      if (stage.size() != 6 * kNumStates) throw std::runtime_error("weight file: plw stage size");
      std::size_t idx = 0;
      for (int f = 0; f < 6; ++f)
        for (int i = 0; i < kNumStates; ++i) sw.plw[t][f][i] = stage[idx++].get<double>();
    }
  }
  if (variant_has_elw(v)) {
    const auto& elw = in.at("elw");
    if (static_cast<int>(elw.size()) != k) throw std::runtime_error("weight file: elw stage count");
    for (int t = 0; t < k; ++t) {
      const auto& stage = elw[t];
      if (stage.size() != 3) throw std::runtime_error("weight file: elw stage size");
      for (int slot = 0; slot < 3; ++slot) sw.elw[t][slot] = stage[slot].get<double>();
    }
  }
}

}  // namespace

void save_weights(std::ostream& os, const WeightSet& ws) {
  json doc;
  doc["format_version"] = kWeightFormatVersion;
  doc["k"] = ws.k;
  doc["M"] = ws.units_m;
  doc["rate"] = to_string(ws.rate);
  doc["modulation"] = to_string(ws.modulation);
  doc["variant"] = to_string(ws.variant);
  json il;
  il["kind"] = to_string(ws.interleaver.kind);
  if (ws.interleaver.seed) il["seed"] = *ws.interleaver.seed;
  doc["interleaver"] = std::move(il);
  if (ws.training) {
    json tr;
    tr["train_snr_db"] = ws.training->train_snr_db;
    tr["epochs"] = ws.training->epochs;
    tr["batch"] = ws.training->batch;
    tr["learning_rate"] = ws.training->learning_rate;
    tr["target_T"] = ws.training->target_iters;
    tr["master_seed"] = ws.training->master_seed;
    tr["optimizer"] = ws.training->optimizer;
    doc["training"] = std::move(tr);
  }
  json units = json::array();
  for (const auto& u : ws.units) {
    json ju;
    ju["sn1"] = subnet_to_json(u.sn1, ws.variant);
    ju["sn2"] = subnet_to_json(u.sn2, ws.variant);
    units.push_back(std::move(ju));
  }
  doc["units"] = std::move(units);
  os << doc.dump(1) << "\n";
}

void save_weights_file(const std::string& path, const WeightSet& ws) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open weight file for writing: " + path);
  save_weights(os, ws);
}

WeightSet load_weights(std::istream& is) {
  json doc = json::parse(is);
  const int version = doc.at("format_version").get<int>();
  if (version != kWeightFormatVersion)
    throw std::runtime_error("weight file: unsupported format_version " +
                             std::to_string(version));
  WeightSet ws;
  ws.k = doc.at("k").get<int>();
  ws.units_m = doc.at("M").get<int>();
  const std::string rate = doc.at("rate").get<std::string>();
  if (rate == "1/3")
    ws.rate = CodeRate::one_third;
  else if (rate == "1/2")
    ws.rate = CodeRate::one_half;
  else
    throw std::runtime_error("weight file: unknown rate '" + rate + "'");
  ws.modulation = modulation_from_string(doc.at("modulation").get<std::string>());
  ws.variant = variant_from_string(doc.at("variant").get<std::string>());
  const auto& il = doc.at("interleaver");
  const std::string kind = il.at("kind").get<std::string>();
  if (kind == "qpp")
    ws.interleaver.kind = InterleaverKind::qpp;
  else if (kind == "seeded_random")
    ws.interleaver.kind = InterleaverKind::seeded_random;
  else
    throw std::runtime_error("weight file: unknown interleaver kind '" + kind + "'");
  if (il.contains("seed")) ws.interleaver.seed = il.at("seed").get<std::uint64_t>();
  if (doc.contains("training")) {
    TrainingProvenance tr;
    const auto& jt = doc.at("training");
    tr.train_snr_db = jt.at("train_snr_db").get<double>();
    tr.epochs = jt.at("epochs").get<int>();
    tr.batch = jt.at("batch").get<int>();
    tr.learning_rate = jt.at("learning_rate").get<double>();
    tr.target_iters = jt.at("target_T").get<int>();
    tr.master_seed = jt.at("master_seed").get<std::uint64_t>();
    if (jt.contains("optimizer")) tr.optimizer = jt.at("optimizer").get<std::string>();
    ws.training = tr;
  }
  const auto& units = doc.at("units");
  if (static_cast<int>(units.size()) != ws.units_m)
    throw std::runtime_error("weight file: unit count does not match M");
  ws.units.resize(ws.units_m);
  for (int m = 0; m < ws.units_m; ++m) {
    subnet_from_json(units[m].at("sn1"), ws.variant, ws.k, ws.units[m].sn1);
    subnet_from_json(units[m].at("sn2"), ws.variant, ws.k, ws.units[m].sn2);
  }
  return ws;
}

WeightSet load_weights_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open weight file: " + path);
  return load_weights(is);
}

std::string describe_weights(const WeightSet& ws) {
  std::ostringstream os;
  os << "k=" << ws.k << " M=" << ws.units_m << " rate=" << to_string(ws.rate)
     << " mod=" << to_string(ws.modulation) << " variant=" << to_string(ws.variant)
     << " interleaver=" << to_string(ws.interleaver.kind);
  if (ws.interleaver.seed) os << ":" << *ws.interleaver.seed;
  return os.str();
}

}  // namespace turbo
