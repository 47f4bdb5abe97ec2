#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "seqparadox/bayes_inference.hpp"
#include "seqparadox/calibration.hpp"
#include "seqparadox/trial_model.hpp"

namespace seqparadox {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Trial data as `y1,y2,x` CSV, one row per first-stage index; y2 blank when x = 0.
std::string trial_data_to_csv(const TrialData& data);
TrialData trial_data_from_csv(std::string_view text);
TrialData read_trial_data(const std::filesystem::path& path);

/// theta,psi,x,ybar1,ybar,cdf_at_theta per replicate.
std::string replicates_to_csv(std::span<const Replicate> replicates);

nlohmann::json to_json(const PosteriorSummary& s);
nlohmann::json to_json(const BiasReport& r);
nlohmann::json to_json(const BiasStudy& s);
nlohmann::json to_json(const UniformityReport& r);
nlohmann::json to_json(const SelectionShift& s);
nlohmann::json to_json(const GreedyDemo& d);

/// Writes the whole text to a sibling temp file and renames it into place, so a
/// failure never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace seqparadox
