// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_OUTMIN_HPP
#define OUTMIN_OUTMIN_HPP

#include "outmin/baselines.hpp"
#include "outmin/beamforming.hpp"
#include "outmin/channel.hpp"
#include "outmin/common.hpp"
#include "outmin/config.hpp"
#include "outmin/eval.hpp"
#include "outmin/objective.hpp"
#include "outmin/parallel.hpp"
#include "outmin/rng.hpp"
#include "outmin/runner.hpp"
#include "outmin/scenario.hpp"
#include "outmin/smm.hpp"
#include "outmin/solver.hpp"
#include "outmin/ssca.hpp"

#endif  // OUTMIN_OUTMIN_HPP
