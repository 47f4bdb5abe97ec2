#pragma once

#include <string>

#include "seqparadox/io.hpp"
#include "seqparadox/trial_model.hpp"

namespace fixture {

inline std::string table1_path() { return std::string(SEQPARADOX_DATA_DIR) + "/table1.csv"; }

inline seqparadox::TrialData table1() { return seqparadox::read_trial_data(table1_path()); }

/// n = 5, sigma = 2, psi = 1 as used for the worked example.
inline seqparadox::DesignConfig example_design(seqparadox::Investigator who) {
  return seqparadox::DesignConfig{5, 2.0, 1.0, who};
}

}  // namespace fixture
