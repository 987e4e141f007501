#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hlrp/train.hpp"

namespace hlrp {

inline constexpr char kCheckpointMagic[4] = {'H', 'L', 'R', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout (all integers little-endian):
///   "HLRP" | u32 version | u64 metadata length | metadata JSON (UTF-8)
///   | u32 parameter count | per parameter: u32 name length, name, u32 rank,
///   u64 dims[rank], f64 values[prod(dims)]
std::string serialize_checkpoint(const TrainedModel& model);
TrainedModel deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(const std::string& path);

/// Throws CheckpointError when `data_schema` has columns the checkpoint's
/// schema lacks.
void check_schema_compatible(const FeatureSchema& checkpoint_schema,
                             const FeatureSchema& data_schema);

}  // namespace hlrp
