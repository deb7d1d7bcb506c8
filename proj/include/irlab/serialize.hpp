#pragma once

#include <json.hpp>

#include "irlab/classes.hpp"
#include "irlab/guitar.hpp"
#include "irlab/mdp.hpp"

// JSON codecs for every on-disk format.  Doubles round-trip losslessly
// (shortest-representation printing).  Schemas are documented in
// docs/formats.md.

namespace irlab {

using Json = nlohmann::json;

Json to_json(const RewardTable& reward);
RewardTable reward_from_json(const Json& j);

Json to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const Json& j);

Json to_json(const NonstationaryPolicy& policy);
NonstationaryPolicy policy_from_json(const Json& j);

Json to_json(const PolicyClass& pc);
PolicyClass policy_class_from_json(const Json& j);

Json to_json(const RewardClass& rc);
RewardClass reward_class_from_json(const Json& j);

Json to_json(const ResetDistribution& rho);
ResetDistribution reset_distribution_from_json(const Json& j);

Json to_json(const DemoDataset& demos);
DemoDataset demos_from_json(const Json& j);

Json to_json(const CompletenessReport& report);

// FNV-1a of the canonical (sorted-key) dump, as fixed-width hex.
std::string config_hash(const Json& j);

// Writes text to path atomically enough for our purposes (truncate+write).
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace irlab
