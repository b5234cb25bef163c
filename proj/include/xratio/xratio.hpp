#pragma once

#include "xratio/cohomology.hpp"
#include "xratio/core.hpp"
#include "xratio/degree.hpp"
#include "xratio/experiment.hpp"
#include "xratio/hypergraph.hpp"
#include "xratio/matching.hpp"
#include "xratio/prng.hpp"
