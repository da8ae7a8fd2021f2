#pragma once

#include "dlsddpg/adam.hpp"
#include "dlsddpg/agent.hpp"
#include "dlsddpg/bounded_qn.hpp"
#include "dlsddpg/checkpoint.hpp"
#include "dlsddpg/config.hpp"
#include "dlsddpg/ddpg.hpp"
#include "dlsddpg/envs.hpp"
#include "dlsddpg/harness.hpp"
#include "dlsddpg/linalg.hpp"
#include "dlsddpg/ls_update.hpp"
#include "dlsddpg/network.hpp"
#include "dlsddpg/replay.hpp"
#include "dlsddpg/rng.hpp"
