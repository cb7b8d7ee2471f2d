#pragma once

#include "triwave/analysis.hpp"
#include "triwave/cli.hpp"
#include "triwave/config.hpp"
#include "triwave/grid.hpp"
#include "triwave/model.hpp"
#include "triwave/solver.hpp"
