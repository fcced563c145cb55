#pragma once

// Umbrella header for the belief-function toolkit.

#include "bft/analysis.hpp"
#include "bft/cli.hpp"
#include "bft/decision.hpp"
#include "bft/errors.hpp"
#include "bft/frame.hpp"
#include "bft/io.hpp"
#include "bft/mass.hpp"
#include "bft/measures.hpp"
#include "bft/rules.hpp"
#include "bft/sampling.hpp"
