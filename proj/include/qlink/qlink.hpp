// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "qlink/benchmark.hpp"
#include "qlink/circuit_matrix.hpp"
#include "qlink/circuit_text.hpp"
#include "qlink/draw.hpp"
#include "qlink/environment.hpp"
#include "qlink/error.hpp"
#include "qlink/gate.hpp"
#include "qlink/kernels.hpp"
#include "qlink/observables.hpp"
#include "qlink/pauli.hpp"
#include "qlink/qureg.hpp"
#include "qlink/random.hpp"
#include "qlink/remote.hpp"
#include "qlink/trotter.hpp"
#include "qlink/validation.hpp"
#include "qlink/variational.hpp"
#include "qlink/wire.hpp"
