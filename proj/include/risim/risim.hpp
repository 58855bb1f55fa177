// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "risim/analysis.hpp"
#include "risim/channel.hpp"
#include "risim/config.hpp"
#include "risim/csv.hpp"
#include "risim/link_adaptation.hpp"
#include "risim/ris.hpp"
#include "risim/rng.hpp"
#include "risim/scenarios.hpp"
#include "risim/scheduler.hpp"
#include "risim/sim.hpp"
