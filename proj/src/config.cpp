#include "motif/config.h"

#include <fstream>

#include "motif/errors.h"

namespace motif {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& section, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError(section + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config field '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + section + "." + key + "' has the wrong type");
  }
}

json roles_to_json(const std::set<TrackRole>& roles) {
  json out = json::array();
  for (auto r : roles) out.push_back(role_name(r));
  return out;
}

}  // namespace

json to_json(const EncoderConfig& c) {
  return {{"n_layers", c.n_layers},   {"model_dim", c.model_dim}, {"n_heads", c.n_heads},
          {"ffn_dim", c.ffn_dim},     {"embed_dim", c.embed_dim}, {"pooling", pooling_name(c.pooling)},
          {"steps_per_bar", c.steps_per_bar}};
}

EncoderConfig encoder_config_from_json(const json& j, EncoderConfig c) {
  reject_unknown(j, "encoder", {"n_layers", "model_dim", "n_heads", "ffn_dim", "embed_dim", "pooling", "steps_per_bar"});
  read(j, "n_layers", c.n_layers, "encoder");
  read(j, "model_dim", c.model_dim, "encoder");
  read(j, "n_heads", c.n_heads, "encoder");
  read(j, "ffn_dim", c.ffn_dim, "encoder");
  read(j, "embed_dim", c.embed_dim, "encoder");
  read(j, "steps_per_bar", c.steps_per_bar, "encoder");
  if (j.contains("pooling")) c.pooling = pooling_from_name(j.at("pooling").get<std::string>());
  c.validate();
  return c;
}

json to_json(const ExpanderConfig& c) { return {{"hidden_dims", c.hidden_dims}, {"out_dim", c.out_dim}}; }

ExpanderConfig expander_config_from_json(const json& j, ExpanderConfig c) {
  reject_unknown(j, "expander", {"hidden_dims", "out_dim"});
  read(j, "hidden_dims", c.hidden_dims, "expander");
  read(j, "out_dim", c.out_dim, "expander");
  c.validate();
  return c;
}

json to_json(const AdamWConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"eps", c.eps},
          {"weight_decay", c.weight_decay}};
}

AdamWConfig adamw_config_from_json(const json& j) {
  AdamWConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.eps = j.at("eps").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  return c;
}

void RunConfig::validate() const {
  if (ingest.steps_per_bar <= 0) throw ConfigError("ingest.steps_per_bar must be positive");
  if (ingest.steps_per_bar != encoder.steps_per_bar) {
    throw ConfigError("encoder.steps_per_bar must equal ingest.steps_per_bar");
  }
  augment.validate();
  encoder.validate();
  expander.validate();
  triplet.validate();
  vicreg.validate();
  train.validate();
  viz.dbscan.validate();
  if (eval.k_max && *eval.k_max < 1) throw ConfigError("eval.k_max must be positive");
  if (eval.random_dim < 1) throw ConfigError("eval.random_dim must be positive");
}

json to_json(const RunConfig& c) {
  json role_map = json::object();
  for (const auto& [name, role] : c.ingest.role_by_name) role_map[name] = role_name(role);
  json train = {{"stage", stage_name(c.train.stage)},
                {"method", method_name(c.train.method)},
                {"learning_rate", c.train.effective_learning_rate()},
                {"batch_size", c.train.batch_size},
                {"max_steps", c.train.max_steps},
                {"weight_decay", c.train.weight_decay},
                {"seed", c.train.seed},
                {"freeze_encoder", c.train.freeze_encoder},
                {"checkpoint_every", c.train.checkpoint_every},
                {"necl_pool", c.train.necl_pool},
                {"add_view_positives", c.train.add_view_positives}};
  json viz = {{"min_pts", c.viz.dbscan.min_pts}, {"row_normalize", c.viz.row_normalize}};
  viz["eps"] = c.viz.dbscan.eps ? json(*c.viz.dbscan.eps) : json("auto");
  json eval = {{"random_dim", c.eval.random_dim}};
  eval["k_max"] = c.eval.k_max ? json(*c.eval.k_max) : json(nullptr);
  return {{"seed", c.seed},
          {"work_dir", c.work_dir.string()},
          {"ingest", {{"steps_per_bar", c.ingest.steps_per_bar}, {"roles", roles_to_json(c.ingest.roles)}, {"role_by_name", role_map}}},
          {"augment",
           {{"transpose_range", {c.augment.transpose_min, c.augment.transpose_max}},
            {"dropout_p", c.augment.dropout_p},
            {"shift_p", c.augment.shift_p},
            {"duration_factor_range", {c.augment.duration_factor_min, c.augment.duration_factor_max}},
            {"include_p", c.augment.include_p},
            {"n_views", c.augment.n_views},
            {"seed", c.augment.seed}}},
          {"encoder", to_json(c.encoder)},
          {"expander", to_json(c.expander)},
          {"triplet", {{"margin", c.triplet.margin}}},
          {"vicreg", {{"alpha", c.vicreg.alpha}, {"beta", c.vicreg.beta}, {"gamma", c.vicreg.gamma}, {"eps", c.vicreg.eps}}},
          {"train", train},
          {"eval", eval},
          {"viz", viz}};
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  // "run" records the invoking command in snapshots and is informational only.
  reject_unknown(j, "", {"run", "seed", "work_dir", "ingest", "augment", "encoder", "expander", "triplet", "vicreg", "train", "eval", "viz"});
  read(j, "seed", c.seed, "");
  if (j.contains("work_dir")) c.work_dir = j.at("work_dir").get<std::string>();
  bool augment_seed = false, train_seed = false;

  if (j.contains("ingest")) {
    const auto& s = j.at("ingest");
    reject_unknown(s, "ingest", {"steps_per_bar", "roles", "role_by_name"});
    read(s, "steps_per_bar", c.ingest.steps_per_bar, "ingest");
    if (s.contains("roles")) {
      c.ingest.roles.clear();
      for (const auto& r : s.at("roles")) c.ingest.roles.insert(role_from_name(r.get<std::string>()));
    }
    if (s.contains("role_by_name")) {
      c.ingest.role_by_name.clear();
      for (const auto& [name, role] : s.at("role_by_name").items()) c.ingest.role_by_name[name] = role_from_name(role.get<std::string>());
    }
  }
  if (j.contains("augment")) {
    const auto& s = j.at("augment");
    reject_unknown(s, "augment", {"transpose_range", "dropout_p", "shift_p", "duration_factor_range", "include_p", "n_views", "seed"});
    if (s.contains("transpose_range")) {
      const auto r = s.at("transpose_range").get<std::vector<int>>();
      if (r.size() != 2) throw ConfigError("augment.transpose_range must have two entries");
      c.augment.transpose_min = r[0];
      c.augment.transpose_max = r[1];
    }
    if (s.contains("duration_factor_range")) {
      const auto r = s.at("duration_factor_range").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("augment.duration_factor_range must have two entries");
      c.augment.duration_factor_min = r[0];
      c.augment.duration_factor_max = r[1];
    }
    read(s, "dropout_p", c.augment.dropout_p, "augment");
    read(s, "shift_p", c.augment.shift_p, "augment");
    read(s, "include_p", c.augment.include_p, "augment");
    read(s, "n_views", c.augment.n_views, "augment");
    augment_seed = s.contains("seed");
    read(s, "seed", c.augment.seed, "augment");
  }
  if (j.contains("encoder")) {
    c.encoder = encoder_config_from_json(j.at("encoder"), c.encoder);
    c.encoder_explicit = true;
  }
  if (j.contains("expander")) {
    c.expander = expander_config_from_json(j.at("expander"), c.expander);
    c.encoder_explicit = true;
  }
  if (j.contains("triplet")) {
    reject_unknown(j.at("triplet"), "triplet", {"margin"});
    read(j.at("triplet"), "margin", c.triplet.margin, "triplet");
  }
  if (j.contains("vicreg")) {
    const auto& s = j.at("vicreg");
    reject_unknown(s, "vicreg", {"alpha", "beta", "gamma", "eps"});
    read(s, "alpha", c.vicreg.alpha, "vicreg");
    read(s, "beta", c.vicreg.beta, "vicreg");
    read(s, "gamma", c.vicreg.gamma, "vicreg");
    read(s, "eps", c.vicreg.eps, "vicreg");
  }
  if (j.contains("train")) {
    const auto& s = j.at("train");
    reject_unknown(s, "train", {"stage", "method", "learning_rate", "batch_size", "max_steps", "weight_decay", "seed",
                                "freeze_encoder", "checkpoint_every", "necl_pool", "add_view_positives"});
    if (s.contains("stage")) c.train.stage = stage_from_name(s.at("stage").get<std::string>());
    if (s.contains("method")) c.train.method = method_from_name(s.at("method").get<std::string>());
    if (s.contains("learning_rate") && !s.at("learning_rate").is_null()) c.train.learning_rate = s.at("learning_rate").get<double>();
    read(s, "batch_size", c.train.batch_size, "train");
    read(s, "max_steps", c.train.max_steps, "train");
    read(s, "weight_decay", c.train.weight_decay, "train");
    train_seed = s.contains("seed");
    read(s, "seed", c.train.seed, "train");
    read(s, "freeze_encoder", c.train.freeze_encoder, "train");
    read(s, "checkpoint_every", c.train.checkpoint_every, "train");
    read(s, "necl_pool", c.train.necl_pool, "train");
    read(s, "add_view_positives", c.train.add_view_positives, "train");
  }
  if (j.contains("eval")) {
    const auto& s = j.at("eval");
    reject_unknown(s, "eval", {"k_max", "random_dim"});
    if (s.contains("k_max") && !s.at("k_max").is_null()) c.eval.k_max = s.at("k_max").get<int>();
    read(s, "random_dim", c.eval.random_dim, "eval");
  }
  if (j.contains("viz")) {
    const auto& s = j.at("viz");
    reject_unknown(s, "viz", {"min_pts", "eps", "row_normalize"});
    read(s, "min_pts", c.viz.dbscan.min_pts, "viz");
    read(s, "row_normalize", c.viz.row_normalize, "viz");
    if (s.contains("eps")) {
      if (s.at("eps").is_string() && s.at("eps").get<std::string>() == "auto") {
        c.viz.dbscan.eps.reset();
      } else if (s.at("eps").is_number()) {
        c.viz.dbscan.eps = s.at("eps").get<double>();
      } else {
        throw ConfigError("viz.eps must be a number or \"auto\"");
      }
    }
  }
  if (j.contains("seed")) {
    if (!augment_seed) c.augment.seed = c.seed;
    if (!train_seed) c.train.seed = c.seed;
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return run_config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace motif
