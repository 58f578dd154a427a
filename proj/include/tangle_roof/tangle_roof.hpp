#pragma once

#include "tangle_roof/catalog.hpp"
#include "tangle_roof/errors.hpp"
#include "tangle_roof/invariants.hpp"
#include "tangle_roof/nullcone.hpp"
#include "tangle_roof/roofkit.hpp"
#include "tangle_roof/statekit.hpp"
