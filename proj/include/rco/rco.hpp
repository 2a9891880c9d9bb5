// Copyright 2026 The RCO Authors
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

// Everything except the HTTP client, which pulls in httplib.

#pragma once

#include "rco/backend.hpp"
#include "rco/common.hpp"
#include "rco/controlmap.hpp"
#include "rco/domain.hpp"
#include "rco/episode.hpp"
#include "rco/metrics.hpp"
#include "rco/orchestrator.hpp"
#include "rco/planner.hpp"
#include "rco/prompts.hpp"
#include "rco/safety.hpp"
#include "rco/simenv.hpp"
#include "rco/verifier.hpp"
