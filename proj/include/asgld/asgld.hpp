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

#ifndef ASGLD_ASGLD_HPP
#define ASGLD_ASGLD_HPP

#include "asgld/core.hpp"
#include "asgld/dataset.hpp"
#include "asgld/optimizers.hpp"
#include "asgld/problems.hpp"
#include "asgld/schedule.hpp"
#include "asgld/harness.hpp"
#include "asgld/config.hpp"
#include "asgld/svg_plot.hpp"

#endif  // ASGLD_ASGLD_HPP
