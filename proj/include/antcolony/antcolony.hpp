#pragma once

#include "antcolony/grid.hpp"
#include "antcolony/habitat.hpp"
#include "antcolony/pheromone.hpp"
#include "antcolony/metrics.hpp"
#include "antcolony/colony.hpp"
#include "antcolony/random.hpp"
#include "antcolony/engine.hpp"
