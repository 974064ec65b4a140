#pragma once

// Graph representation and generators
#include "connie/generators.hpp"
#include "connie/network.hpp"

// Cascade simulation
#include "connie/cascade.hpp"
#include "connie/simulate.hpp"
#include "connie/transmission.hpp"

// Inference
#include "connie/solver.hpp"
#include "connie/subproblem.hpp"

// Evaluation
#include "connie/eval.hpp"
