// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lapnet/ablate.hpp"
#include "lapnet/cells.hpp"
#include "lapnet/checkpoint.hpp"
#include "lapnet/common.hpp"
#include "lapnet/config.hpp"
#include "lapnet/data.hpp"
#include "lapnet/evaluator.hpp"
#include "lapnet/gumbel.hpp"
#include "lapnet/losses.hpp"
#include "lapnet/memory.hpp"
#include "lapnet/metrics.hpp"
#include "lapnet/optim.hpp"
#include "lapnet/sampler.hpp"
#include "lapnet/tape.hpp"
#include "lapnet/tensor.hpp"
#include "lapnet/trainer.hpp"
