#pragma once

// Umbrella header for the stomp library: analysis of infinite products
// of row-stochastic matrices with positive diagonals, and the consensus
// and Markov processes they drive.

#include "stomp/accumulation.hpp"
#include "stomp/analysis.hpp"
#include "stomp/generators.hpp"
#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/processes.hpp"
#include "stomp/rng.hpp"
#include "stomp/sequence.hpp"
#include "stomp/structure.hpp"
