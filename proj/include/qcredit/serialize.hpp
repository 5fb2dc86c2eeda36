#pragma once

// JSON documents for circuits, fitted models, reports, traces, and run
// configuration. Readers throw ParseError on malformed structure; value
// ranges are left to the owning type's validate().

#include "qcredit/classical.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/pipeline.hpp"
#include "qcredit/qsim.hpp"

#include <json.hpp>

namespace qcredit::serialize {

using Json = nlohmann::ordered_json;

Json to_json(const qsim::ParameterizedCircuit &circuit);
qsim::ParameterizedCircuit circuit_from_json(const Json &doc);

Json to_json(const classical::LogisticModel &model);
Json to_json(const classical::DecisionTree &tree);
Json to_json(const classical::ForestModel &model);
Json to_json(const classical::BoostedModel &model);
classical::LogisticModel logistic_from_json(const Json &doc);
classical::DecisionTree tree_from_json(const Json &doc);
classical::ForestModel forest_from_json(const Json &doc);
classical::BoostedModel boosted_from_json(const Json &doc);

Json to_json(const metrics::MetricsReport &report);
Json to_json(const pipeline::AggregateReport &aggregate);
Json to_json(const pipeline::TrainTrace &trace);

/// Overlays the keys present in `doc` onto `config`. Recognized keys:
/// epochs, learning_rate, beta1, beta2, epsilon, weight_decay, init_low,
/// init_high, seed, variant, angle_scale, batch_sizes, n_partitions,
/// train_fraction, threshold ("ks" or a number), out_of_fold, folds, jobs.
/// Unknown keys are rejected.
void merge_config(pipeline::CrossValidationConfig &config, const Json &doc);
Json to_json(const pipeline::CrossValidationConfig &config);

} // namespace qcredit::serialize
