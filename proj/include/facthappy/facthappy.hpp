#pragma once

// Umbrella header.
#include "facthappy/analysis.hpp"
#include "facthappy/dynamics.hpp"
#include "facthappy/error.hpp"
#include "facthappy/factoradic.hpp"
#include "facthappy/natural.hpp"
#include "facthappy/towers.hpp"
