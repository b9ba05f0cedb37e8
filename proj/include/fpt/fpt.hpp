#pragma once

#include "fpt/error.hpp"
#include "fpt/finite_trees.hpp"
#include "fpt/gw_exact.hpp"
#include "fpt/gw_sim.hpp"
#include "fpt/io.hpp"
#include "fpt/numeric.hpp"
#include "fpt/pmf.hpp"
#include "fpt/tree.hpp"
