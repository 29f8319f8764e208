#pragma once

#include "vamp/tcca.hpp"

#include <filesystem>
#include <string>

namespace vamp {

/// Serialize a model to the structured text model file (format_version 1):
/// basis specs, de-correlation record, lag, k, singular values, U, V.
/// Doubles round-trip bit-exactly.
void save_model(const std::filesystem::path& file, const KoopmanModel& model);
std::string model_to_string(const KoopmanModel& model);

KoopmanModel load_model(const std::filesystem::path& file);
KoopmanModel model_from_string(const std::string& text);

} // namespace vamp
