// Copyright 2026 The corp Authors
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

#include "corp/diagrams.hpp"
#include "corp/distributions.hpp"
#include "corp/errors.hpp"
#include "corp/exact_sum.hpp"
#include "corp/functional.hpp"
#include "corp/io.hpp"
#include "corp/pav.hpp"
#include "corp/random.hpp"
#include "corp/resampling.hpp"
#include "corp/scores.hpp"
#include "corp/serialize.hpp"
#include "corp/svg.hpp"
#include "corp/synthetic.hpp"
