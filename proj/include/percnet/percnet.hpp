#pragma once

#include "percnet/corridor.hpp"
#include "percnet/geometry.hpp"
#include "percnet/lattice.hpp"
#include "percnet/load.hpp"
#include "percnet/netgen.hpp"
#include "percnet/percolation.hpp"
#include "percnet/radio.hpp"
#include "percnet/rng.hpp"
#include "percnet/routing.hpp"
#include "percnet/sim.hpp"
