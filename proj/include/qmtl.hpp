// Copyright 2026 The QMTL Authors
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

#include "qmtl/arch.hpp"
#include "qmtl/baselines.hpp"
#include "qmtl/circuit.hpp"
#include "qmtl/circuit_text.hpp"
#include "qmtl/data.hpp"
#include "qmtl/errors.hpp"
#include "qmtl/gradients.hpp"
#include "qmtl/loss_gradient.hpp"
#include "qmtl/losses.hpp"
#include "qmtl/metrics.hpp"
#include "qmtl/models.hpp"
#include "qmtl/noise.hpp"
#include "qmtl/optim.hpp"
#include "qmtl/pauli.hpp"
#include "qmtl/random.hpp"
#include "qmtl/random_circuit.hpp"
#include "qmtl/statevector.hpp"
#include "qmtl/trainer.hpp"
