// Copyright 2026 The AIRLS Authors. All Rights Reserved.
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

#ifndef AIRLS_AIRLS_HPP
#define AIRLS_AIRLS_HPP

#include "airls/active_set.hpp"
#include "airls/completion.hpp"
#include "airls/core.hpp"
#include "airls/data_io.hpp"
#include "airls/denoise.hpp"
#include "airls/nmf.hpp"
#include "airls/oracles.hpp"
#include "airls/proximity.hpp"
#include "airls/solver_common.hpp"
#include "airls/trace_json.hpp"

#endif  // AIRLS_AIRLS_HPP
