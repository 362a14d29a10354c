// fairdet/fairdet.hpp
//
// Umbrella header: pulls in the whole library.
//
// Copyright 2026 The fairdet Authors
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

#ifndef FAIRDET_FAIRDET_HPP_
#define FAIRDET_FAIRDET_HPP_

#include "fairdet/error.hpp"      // IWYU pragma: export
#include "fairdet/fairness.hpp"   // IWYU pragma: export
#include "fairdet/metrics.hpp"    // IWYU pragma: export
#include "fairdet/protocol.hpp"   // IWYU pragma: export
#include "fairdet/report.hpp"     // IWYU pragma: export
#include "fairdet/scoring.hpp"    // IWYU pragma: export
#include "fairdet/simgen.hpp"     // IWYU pragma: export
#include "fairdet/stats.hpp"      // IWYU pragma: export

#endif  // FAIRDET_FAIRDET_HPP_
