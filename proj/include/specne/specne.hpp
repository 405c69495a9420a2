// Copyright 2026 The specne Authors.
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

#include "specne/counterexamples.hpp"
#include "specne/demand.hpp"
#include "specne/efficiency.hpp"
#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/kernel.hpp"
#include "specne/market.hpp"
#include "specne/penalty.hpp"
#include "specne/profile.hpp"
#include "specne/repeated.hpp"
#include "specne/rng.hpp"
#include "specne/verification.hpp"
