#pragma once

#include "geophase/error.hpp"
#include "geophase/linalg.hpp"
#include "geophase/torus.hpp"
#include "geophase/models.hpp"
#include "geophase/evolution.hpp"
#include "geophase/invariants.hpp"
#include "geophase/holonomy.hpp"
#include "geophase/action.hpp"
#include "geophase/ring_state.hpp"
