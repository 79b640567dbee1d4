#pragma once

// Umbrella header: two-particle interference toolkit.

#include "tpi/duality.hpp"
#include "tpi/exchange.hpp"
#include "tpi/hbt.hpp"
#include "tpi/hom.hpp"
#include "tpi/internal_state.hpp"
#include "tpi/propagation.hpp"
#include "tpi/report.hpp"
#include "tpi/rng.hpp"
#include "tpi/sampling.hpp"
#include "tpi/wavepacket.hpp"
