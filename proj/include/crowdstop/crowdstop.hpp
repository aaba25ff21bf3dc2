#pragma once

// Umbrella header: adaptive stopping rules for crowd label collection,
// reputation-weighted voting, bandit-routed gold-HIT creation, and the
// seeded simulation harness around them.

#include "crowdstop/config.hpp"
#include "crowdstop/core.hpp"
#include "crowdstop/curves.hpp"
#include "crowdstop/harness.hpp"
#include "crowdstop/results.hpp"
#include "crowdstop/rng.hpp"
#include "crowdstop/routing.hpp"
#include "crowdstop/stopping.hpp"
#include "crowdstop/weights.hpp"
#include "crowdstop/workload.hpp"
