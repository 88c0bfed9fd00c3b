// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phaselens/core.hpp"
#include "phaselens/experiment.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/objective.hpp"
#include "phaselens/rng.hpp"
#include "phaselens/solvers.hpp"
#include "phaselens/theory.hpp"
#include "phaselens/theory_battery.hpp"
