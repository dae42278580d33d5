// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_SCHEDULE_HPP
#define ASGLD_SCHEDULE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asgld {

enum class ScheduleKind { constant, step_decay, inverse_time };

inline ScheduleKind parse_schedule_kind(std::string_view s) {
  if (s == "constant") return ScheduleKind::constant;
  if (s == "step_decay") return ScheduleKind::step_decay;
  if (s == "inverse_time") return ScheduleKind::inverse_time;
  throw std::invalid_argument("unknown schedule kind '" + std::string(s) + "'");
}

inline std::string_view schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::step_decay: return "step_decay";
    case ScheduleKind::inverse_time: return "inverse_time";
  }
  return "unknown";
}

/// Per-epoch step size rule. The defaults drop eta tenfold after 75% of the budget.
struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double base_eta = 0.01;
  double decay_factor = 10.0;
  double decay_at_fraction = 0.75;

  void validate() const {
    if (!(std::isfinite(base_eta) && base_eta > 0.0)) throw std::invalid_argument("schedule: base_eta must be > 0");
    if (!(std::isfinite(decay_factor) && decay_factor > 0.0))
      throw std::invalid_argument("schedule: decay_factor must be > 0");
    if (!(decay_at_fraction > 0.0 && decay_at_fraction <= 1.0))
      throw std::invalid_argument("schedule: decay_at_fraction must lie in (0, 1]");
  }
};

/// Step size in effect during `epoch` (1-based) of `total_epochs`.
inline double schedule_eta(const Schedule& sch, int epoch, int total_epochs) {
  if (epoch < 1 || epoch > total_epochs) throw std::out_of_range("schedule_eta: epoch outside [1, total_epochs]");
  switch (sch.kind) {
    case ScheduleKind::constant: return sch.base_eta;
    case ScheduleKind::step_decay:
      return static_cast<double>(epoch) > sch.decay_at_fraction * total_epochs ? sch.base_eta / sch.decay_factor
                                                                                : sch.base_eta;
    case ScheduleKind::inverse_time: return sch.base_eta / epoch;
  }
  return sch.base_eta;
}

}  // namespace asgld

#endif  // ASGLD_SCHEDULE_HPP
