#pragma once

// Umbrella header for the consistat library.

#include "consistat/decomposition.hpp"
#include "consistat/detector.hpp"
#include "consistat/evaluation.hpp"
#include "consistat/generators.hpp"
#include "consistat/graph.hpp"
#include "consistat/io.hpp"
#include "consistat/prob.hpp"
#include "consistat/rng.hpp"
#include "consistat/stats.hpp"
