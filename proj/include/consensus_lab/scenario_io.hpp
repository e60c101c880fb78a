#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/model.hpp"
#include "consensus_lab/tyranny.hpp"

namespace consensus_lab {

/// A parsed scenario file. Files with "kind": "cis" also carry the CIS
/// primitives; their `model` is the induced belief model (empty when the CIS
/// primitives are invalid).
struct Scenario {
    enum class Kind { Model, Cis };
    Kind kind = Kind::Model;
    ModelSpec model;
    std::optional<CISSpec> cis;

    /// Invariant violations of the model (or of the CIS primitives).
    std::vector<Violation> violations() const;
};

/// Throws ParseError with line/column for syntax errors and the field path
/// for schema errors (unknown keys, unknown labels, wrong types).
Scenario parse_scenario(const std::string& text, const std::string& source = "<input>");

Scenario load_scenario(const std::string& path);

/// Joint distribution over states and signal profiles implied by agent 0's
/// prior and FULL beliefs. Returns nullopt when those are not available.
std::optional<GeneratingDistribution> generating_from_first_agent(const ModelSpec& spec);

/// Serializes a model in the scenario format (beliefs as marginals, or as
/// full joints for FULL beliefs).
std::string write_model_json(const ModelSpec& spec);

}  // namespace consensus_lab
