#pragma once

#include "vinerisk/ensemble.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace vinerisk {

inline constexpr int kModelFormatVersion = 1;

/// JSON container with scaler, bases, meta weights and metadata. Doubles are
/// written in shortest round-trip form, so a reload predicts bit-identically.
/// kNN training matrices shared between bases are stored once.
std::string serialize_model(const EnsembleModel& model);
EnsembleModel parse_model_text(std::string_view text);

void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

/// Hex FNV-1a digest of the serialised container.
std::string model_fingerprint(std::string_view serialized);
std::string model_fingerprint(const EnsembleModel& model);

} // namespace vinerisk
