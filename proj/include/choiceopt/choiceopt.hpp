// Copyright 2026 The choiceopt Authors
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

#ifndef CHOICEOPT_CHOICEOPT_HPP
#define CHOICEOPT_CHOICEOPT_HPP

#include "choiceopt/error.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/feasibility.hpp"
#include "choiceopt/expcone.hpp"
#include "choiceopt/program.hpp"
#include "choiceopt/reform.hpp"
#include "choiceopt/solver.hpp"
#include "choiceopt/dualcert.hpp"
#include "choiceopt/recover.hpp"
#include "choiceopt/oracle.hpp"
#include "choiceopt/io.hpp"

#endif  // CHOICEOPT_CHOICEOPT_HPP
