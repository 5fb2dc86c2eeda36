#include "oracles.hpp"
#include "qcredit/ansatz.hpp"
#include "qcredit/errors.hpp"
#include "qcredit/serialize.hpp"

#include <doctest.h>

#include <random>

using namespace qcredit;
using namespace qcredit::serialize;

TEST_CASE("circuit documents round-trip") {
  const auto sim = ansatz::build_simulation_ansatz({});
  const Json doc = to_json(sim);
  CHECK(doc["num_trainable_slots"] == 14);
  CHECK(doc["gates"][0]["kind"] == "RX");
  CHECK(doc["gates"][0]["angle"]["encoding_slot"] == 0);
  const auto back = circuit_from_json(Json::parse(doc.dump()));
  CHECK(back.gates == sim.gates);
  CHECK(back.num_encoding_slots == 3);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = oracle::random_circuit(rng, 1 + trial % 4, 10, 2);
    const auto r = circuit_from_json(Json::parse(to_json(c).dump()));
    CHECK(r.gates == c.gates);
    CHECK(r.num_trainable_slots == c.num_trainable_slots);
  }
}

TEST_CASE("malformed circuit documents") {
  CHECK_THROWS_AS(circuit_from_json(Json::array()), ParseError);
  Json doc = to_json(ansatz::build_hardware_ansatz({ansatz::Variant::Hardware}));
  Json bad_kind = doc;
  bad_kind["gates"][0]["kind"] = "H";
  CHECK_THROWS_AS(circuit_from_json(bad_kind), ParseError);
  Json missing = doc;
  missing.erase("num_qubits");
  CHECK_THROWS_AS(circuit_from_json(missing), ParseError);
  Json bad_slot = doc;
  bad_slot["gates"][0]["angle"] = Json{{"encoding_slot", 7}};
  CHECK_THROWS_AS(circuit_from_json(bad_slot), ContractError);
}

TEST_CASE("model documents round-trip with identical predictions") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  classical::LabeledData data;
  for (int i = 0; i < 60; ++i) {
    const std::vector<double> row = {g(rng), g(rng), g(rng)};
    data.features.push_back(row);
    data.labels.push_back(row[0] - row[2] + 0.5 * g(rng) > 0 ? 1 : 0);
  }
  const auto lr = classical::train_logistic(data);
  const auto lr2 = logistic_from_json(Json::parse(to_json(lr).dump()));
  CHECK(lr2.predict(data.features) == lr.predict(data.features));

  classical::ForestOptions fo;
  fo.n_trees = 7;
  const auto forest = classical::train_forest(data, fo);
  CHECK(forest_from_json(Json::parse(to_json(forest).dump())).predict(data.features) == forest.predict(data.features));

  const auto boosted = classical::train_boosted(data);
  CHECK(boosted_from_json(Json::parse(to_json(boosted).dump())).predict(data.features) ==
        boosted.predict(data.features));
}

TEST_CASE("config merge") {
  pipeline::CrossValidationConfig cfg;
  merge_config(cfg, Json::parse(R"({"epochs": 7, "learning_rate": 0.1, "seed": 5, "variant": "hardware",
                                    "batch_sizes": [1,2,3,4,5,6,7,8,9,10], "threshold": 0.4, "jobs": 2})"));
  CHECK(cfg.train.epochs == 7);
  CHECK(cfg.train.learning_rate == 0.1);
  CHECK(cfg.master_seed == 5);
  CHECK(cfg.ansatz.variant == ansatz::Variant::Hardware);
  CHECK(cfg.batch_sizes[9] == 10);
  CHECK(cfg.threshold.fixed == 0.4);
  CHECK(cfg.jobs == 2);
  merge_config(cfg, Json::parse(R"({"threshold": "ks"})"));
  CHECK_FALSE(cfg.threshold.fixed.has_value());

  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"epoch": 3})")), ParseError);
  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"epochs": "many"})")), ParseError);
  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"variant": "analog"})")), ParseError);
  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"threshold": true})")), ParseError);

  pipeline::CrossValidationConfig again;
  merge_config(again, to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
}

TEST_CASE("trace and aggregate documents") {
  pipeline::EpochRecord r;
  r.epoch = 1;
  r.loss = 0.5;
  r.train_auc = 0.75;
  r.params = {0.1, 0.2};
  r.grads = {-0.1, 0.0};
  const Json t = to_json(pipeline::TrainTrace{r});
  REQUIRE(t.is_array());
  for (const char *key : {"epoch", "loss", "train_auc", "params", "grads"}) {
    CHECK(t[0].contains(key));
  }
  const Json a = to_json(pipeline::AggregateReport{{0.8, 0.02}, {0.6, 0.1}, {0.7, 0.1}, {0.4, 0.05}});
  for (const char *key : {"auc", "ks", "recall", "precision"}) {
    CHECK(a[key].contains("mean"));
    CHECK(a[key].contains("std"));
  }
  CHECK(a["auc"]["mean"] == 0.8);
}
