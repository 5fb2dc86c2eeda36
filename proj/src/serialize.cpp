#include "qcredit/serialize.hpp"

#include "qcredit/errors.hpp"

#include <string>

namespace qcredit::serialize {

namespace {

template <typename T> T get(const Json &doc, const char *key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(std::string("missing key '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("key '") + key + "': " + e.what());
  }
}

void require_object(const Json &doc, const char *what) {
  if (!doc.is_object()) {
    throw ParseError(std::string(what) + " must be a JSON object");
  }
}

Json angle_to_json(const qsim::AngleSource &angle) {
  return std::visit(
      [](const auto &a) -> Json {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, qsim::FixedAngle>) {
          return Json{{"fixed", a.value}};
        } else if constexpr (std::is_same_v<A, qsim::EncodingSlot>) {
          return Json{{"encoding_slot", a.index}};
        } else if constexpr (std::is_same_v<A, qsim::TrainableSlot>) {
          return Json{{"trainable_slot", a.index}};
        } else {
          return Json(nullptr);
        }
      },
      angle);
}

qsim::AngleSource angle_from_json(const Json &doc) {
  if (doc.is_null()) {
    return qsim::NoAngle{};
  }
  require_object(doc, "angle");
  if (doc.size() != 1) {
    throw ParseError("angle must have exactly one of fixed, encoding_slot, trainable_slot");
  }
  if (doc.contains("fixed")) {
    return qsim::FixedAngle{get<double>(doc, "fixed")};
  }
  if (doc.contains("encoding_slot")) {
    return qsim::EncodingSlot{get<std::size_t>(doc, "encoding_slot")};
  }
  if (doc.contains("trainable_slot")) {
    return qsim::TrainableSlot{get<std::size_t>(doc, "trainable_slot")};
  }
  throw ParseError("unknown angle source '" + doc.begin().key() + "'");
}

Json mean_std(const pipeline::MeanStd &m) { return Json{{"mean", m.mean}, {"std", m.std}}; }

} // namespace

Json to_json(const qsim::ParameterizedCircuit &circuit) {
  Json gates = Json::array();
  for (const auto &g : circuit.gates) {
    gates.push_back(Json{{"kind", std::string(qsim::to_string(g.kind))}, {"targets", g.targets}, {"angle", angle_to_json(g.angle)}});
  }
  return Json{{"num_qubits", circuit.num_qubits},
              {"num_encoding_slots", circuit.num_encoding_slots},
              {"num_trainable_slots", circuit.num_trainable_slots},
              {"gates", gates}};
}

qsim::ParameterizedCircuit circuit_from_json(const Json &doc) {
  require_object(doc, "circuit");
  qsim::ParameterizedCircuit circuit;
  circuit.num_qubits = get<std::size_t>(doc, "num_qubits");
  circuit.num_encoding_slots = get<std::size_t>(doc, "num_encoding_slots");
  circuit.num_trainable_slots = get<std::size_t>(doc, "num_trainable_slots");
  const Json &gates = doc.at("gates");
  if (!gates.is_array()) {
    throw ParseError("'gates' must be an array");
  }
  for (const auto &g : gates) {
    require_object(g, "gate");
    const auto kind_name = get<std::string>(g, "kind");
    const auto kind = qsim::gate_kind_from_string(kind_name);
    if (!kind) {
      throw ParseError("unknown gate kind '" + kind_name + "'");
    }
    qsim::GateOp op;
    op.kind = *kind;
    op.targets = get<std::vector<std::size_t>>(g, "targets");
    op.angle = g.contains("angle") ? angle_from_json(g.at("angle")) : qsim::AngleSource{qsim::NoAngle{}};
    circuit.gates.push_back(std::move(op));
  }
  circuit.validate();
  return circuit;
}

// ---------------------------------------------------------------------------

Json to_json(const classical::LogisticModel &model) { return Json{{"alpha", model.alpha}, {"beta", model.beta}}; }

Json to_json(const classical::DecisionTree &tree) {
  Json nodes = Json::array();
  for (const auto &n : tree.nodes()) {
    if (n.leaf) {
      nodes.push_back(Json{{"leaf", true}, {"value", n.value}, {"samples", n.samples}});
    } else {
      nodes.push_back(Json{{"leaf", false},
                           {"value", n.value},
                           {"samples", n.samples},
                           {"feature", n.feature},
                           {"threshold", n.threshold},
                           {"left", n.left},
                           {"right", n.right}});
    }
  }
  return Json{{"nodes", nodes}};
}

Json to_json(const classical::ForestModel &model) {
  Json trees = Json::array();
  for (const auto &t : model.trees) {
    trees.push_back(to_json(t));
  }
  return Json{{"trees", trees}};
}

Json to_json(const classical::BoostedModel &model) {
  Json trees = Json::array();
  for (const auto &t : model.trees) {
    trees.push_back(to_json(t));
  }
  return Json{{"base_score", model.base_score}, {"learning_rate", model.learning_rate}, {"trees", trees}};
}

classical::LogisticModel logistic_from_json(const Json &doc) {
  require_object(doc, "logistic model");
  return {get<double>(doc, "alpha"), get<std::vector<double>>(doc, "beta")};
}

classical::DecisionTree tree_from_json(const Json &doc) {
  require_object(doc, "tree");
  std::vector<classical::TreeNode> nodes;
  const Json &items = doc.at("nodes");
  if (!items.is_array()) {
    throw ParseError("'nodes' must be an array");
  }
  for (const auto &item : items) {
    require_object(item, "tree node");
    classical::TreeNode n;
    n.leaf = get<bool>(item, "leaf");
    n.value = get<double>(item, "value");
    n.samples = get<std::size_t>(item, "samples");
    if (!n.leaf) {
      n.feature = get<std::size_t>(item, "feature");
      n.threshold = get<double>(item, "threshold");
      n.left = get<std::size_t>(item, "left");
      n.right = get<std::size_t>(item, "right");
    }
    nodes.push_back(n);
  }
  return classical::DecisionTree(std::move(nodes));
}

classical::ForestModel forest_from_json(const Json &doc) {
  require_object(doc, "forest");
  classical::ForestModel model;
  for (const auto &t : doc.at("trees")) {
    model.trees.push_back(tree_from_json(t));
  }
  return model;
}

classical::BoostedModel boosted_from_json(const Json &doc) {
  require_object(doc, "boosted model");
  classical::BoostedModel model;
  model.base_score = get<double>(doc, "base_score");
  model.learning_rate = get<double>(doc, "learning_rate");
  for (const auto &t : doc.at("trees")) {
    model.trees.push_back(tree_from_json(t));
  }
  return model;
}

// ---------------------------------------------------------------------------

Json to_json(const metrics::MetricsReport &report) {
  const auto &c = report.confusion;
  return Json{{"partition", report.partition},
              {"auc", report.auc},
              {"ks", report.ks},
              {"recall", report.recall},
              {"precision", report.precision},
              {"threshold", report.threshold},
              {"confusion", Json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}}};
}

Json to_json(const pipeline::AggregateReport &aggregate) {
  return Json{{"auc", mean_std(aggregate.auc)},
              {"ks", mean_std(aggregate.ks)},
              {"recall", mean_std(aggregate.recall)},
              {"precision", mean_std(aggregate.precision)}};
}

Json to_json(const pipeline::TrainTrace &trace) {
  Json out = Json::array();
  for (const auto &r : trace) {
    out.push_back(Json{{"epoch", r.epoch},
                       {"loss", r.loss},
                       {"train_auc", r.train_auc},
                       {"params", r.params},
                       {"grads", r.grads},
                       {"train_predictions", r.train_predictions}});
  }
  return out;
}

// ---------------------------------------------------------------------------

void merge_config(pipeline::CrossValidationConfig &config, const Json &doc) {
  require_object(doc, "config");
  for (const auto &[key, value] : doc.items()) {
    if (key == "epochs") {
      config.train.epochs = get<std::size_t>(doc, "epochs");
    } else if (key == "learning_rate") {
      config.train.learning_rate = get<double>(doc, "learning_rate");
    } else if (key == "beta1") {
      config.train.beta1 = get<double>(doc, "beta1");
    } else if (key == "beta2") {
      config.train.beta2 = get<double>(doc, "beta2");
    } else if (key == "epsilon") {
      config.train.epsilon = get<double>(doc, "epsilon");
    } else if (key == "weight_decay") {
      config.train.weight_decay = get<double>(doc, "weight_decay");
    } else if (key == "init_low") {
      config.train.init_low = get<double>(doc, "init_low");
    } else if (key == "init_high") {
      config.train.init_high = get<double>(doc, "init_high");
    } else if (key == "seed") {
      config.master_seed = get<std::uint64_t>(doc, "seed");
    } else if (key == "variant") {
      const auto name = get<std::string>(doc, "variant");
      const auto variant = ansatz::variant_from_string(name);
      if (!variant) {
        throw ParseError("unknown ansatz variant '" + name + "'");
      }
      config.ansatz.variant = *variant;
    } else if (key == "angle_scale") {
      config.ansatz.angle_scale = get<double>(doc, "angle_scale");
    } else if (key == "batch_sizes") {
      config.batch_sizes = get<std::vector<std::size_t>>(doc, "batch_sizes");
    } else if (key == "n_partitions") {
      config.n_partitions = get<std::size_t>(doc, "n_partitions");
    } else if (key == "train_fraction") {
      config.train_fraction = get<double>(doc, "train_fraction");
    } else if (key == "threshold") {
      if (value.is_string() && value.get<std::string>() == "ks") {
        config.threshold = metrics::ThresholdPolicy::ks_optimal();
      } else if (value.is_number()) {
        config.threshold = metrics::ThresholdPolicy::at(value.get<double>());
      } else {
        throw ParseError("'threshold' must be \"ks\" or a number");
      }
    } else if (key == "out_of_fold") {
      config.stacking.out_of_fold = get<bool>(doc, "out_of_fold");
    } else if (key == "folds") {
      config.stacking.folds = get<std::size_t>(doc, "folds");
    } else if (key == "jobs") {
      config.jobs = get<std::size_t>(doc, "jobs");
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
}

Json to_json(const pipeline::CrossValidationConfig &config) {
  const auto &t = config.train;
  Json threshold = config.threshold.fixed ? Json(*config.threshold.fixed) : Json("ks");
  return Json{{"epochs", t.epochs},
              {"learning_rate", t.learning_rate},
              {"beta1", t.beta1},
              {"beta2", t.beta2},
              {"epsilon", t.epsilon},
              {"weight_decay", t.weight_decay},
              {"init_low", t.init_low},
              {"init_high", t.init_high},
              {"seed", config.master_seed},
              {"variant", std::string(ansatz::to_string(config.ansatz.variant))},
              {"angle_scale", config.ansatz.angle_scale},
              {"batch_sizes", config.batch_sizes},
              {"n_partitions", config.n_partitions},
              {"train_fraction", config.train_fraction},
              {"threshold", threshold},
              {"out_of_fold", config.stacking.out_of_fold},
              {"folds", config.stacking.folds},
              {"jobs", config.jobs}};
}

} // namespace qcredit::serialize
