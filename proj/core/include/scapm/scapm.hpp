#pragma once

#include "scapm/error.hpp"
#include "scapm/horizon.hpp"
#include "scapm/market_model.hpp"
#include "scapm/normal.hpp"
#include "scapm/rng.hpp"
#include "scapm/simulation.hpp"
#include "scapm/strategy.hpp"
