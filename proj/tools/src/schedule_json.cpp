// Copyright 2026 The qsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsl/cli/schedule_json.hpp"

#include "qsl/errors.hpp"

namespace qsl::cli {

nlohmann::json schedule_to_json(const PulseSchedule& schedule) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index k = 0; k < schedule.amplitudes.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index s = 0; s < schedule.amplitudes.cols(); ++s) row.push_back(schedule.amplitudes(k, s));
    amps.push_back(std::move(row));
  }
  return {{"T", schedule.total_time}, {"n_slots", schedule.n_slots}, {"amplitudes", std::move(amps)}};
}

PulseSchedule schedule_from_json(const nlohmann::json& j) {
  try {
    PulseSchedule s;
    s.total_time = j.at("T").get<double>();
    s.n_slots = j.at("n_slots").get<int>();
    const auto& amps = j.at("amplitudes");
    if (!amps.is_array()) throw InvalidArgument("schedule JSON: amplitudes must be an array");
    s.amplitudes.resize(static_cast<Eigen::Index>(amps.size()), std::max(s.n_slots, 0));
    for (std::size_t k = 0; k < amps.size(); ++k) {
      const auto& row = amps[k];
      if (!row.is_array() || static_cast<int>(row.size()) != s.n_slots) {
        throw InvalidArgument("schedule JSON: control " + std::to_string(k) + " needs " +
                              std::to_string(s.n_slots) + " amplitudes");
      }
      for (int slot = 0; slot < s.n_slots; ++slot) s.amplitudes(k, slot) = row[slot].get<double>();
    }
    s.validate(static_cast<int>(amps.size()));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("schedule JSON: ") + e.what());
  }
}

}  // namespace qsl::cli
