// Copyright 2026-present the volsearch project
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

#pragma once

#include <string>

#include "volsearch/evaluator.hpp"

namespace volsearch {

/// Per-class recall and precision, the overall averages and the confusion
/// matrix as an aligned plain-text table. Absent classes show "-".
std::string format_report(const EvalReport& report);

/// JSON document with the same content; keys are stable, classes by name.
std::string report_to_json(const EvalReport& report);

}  // namespace volsearch
