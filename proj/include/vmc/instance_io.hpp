#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vmc/model.hpp"

namespace vmc {

/// Parses the canonical instance JSON:
///   { "hosts":   [{"id":0,"cpu":6,"mem":6}, ...],
///     "flavors": [{"id":0,"cpu":3,"mem":3}, ...],
///     "vms":     [{"id":0,"flavor":0,"host":0}, ...] }
/// The "host" field of each VM is the initial mapping. Unknown top-level keys
/// are ignored, so solution files written by write_mapping_json load as
/// instances too. Throws InstanceError naming the offending field.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);

/// Serializes an instance with its initial mapping.
std::string instance_to_json(const Instance& inst);

/// Serializes the instance with the VM "host" fields taken from `mu` and a
/// "summary" object describing the result relative to the initial mapping.
std::string mapping_to_json(const Mapping& mu, const ObjectiveWeights& w);

/// Instance whose initial mapping is `mu` (which must be feasible).
Instance rebase(const Mapping& mu);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace vmc
