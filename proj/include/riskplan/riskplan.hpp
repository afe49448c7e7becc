#pragma once

// Umbrella header for the riskplan library: risk-aware, reward-maximizing
// path planning on occupancy-grid graphs.

#include "riskplan/commands.hpp"
#include "riskplan/core.hpp"
#include "riskplan/graph.hpp"
#include "riskplan/instance_gen.hpp"
#include "riskplan/io.hpp"
#include "riskplan/oracles.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/render.hpp"
#include "riskplan/reward.hpp"
#include "riskplan/risk.hpp"
