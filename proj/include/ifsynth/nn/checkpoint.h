#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "ifsynth/nn/adam.h"
#include "ifsynth/nn/params.h"

namespace ifsynth::nn {

// Single-file archive: magic, JSON directory (parameter names + shapes,
// optimizer step counts, caller metadata), then raw little-endian float64
// payloads in directory order. Optimizer slots ride along so a resumed run
// continues the exact update sequence.
void save_checkpoint(const std::filesystem::path& path,
                     std::span<const ParamStore* const> stores,
                     std::span<const Adam* const> opts, const nlohmann::json& meta);

nlohmann::json load_checkpoint(const std::filesystem::path& path,
                               std::span<ParamStore* const> stores,
                               std::span<Adam* const> opts);

nlohmann::json read_checkpoint_meta(const std::filesystem::path& path);

}  // namespace ifsynth::nn
