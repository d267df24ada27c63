#pragma once
// Umbrella header.

#include "netopt/evaluate.hpp"
#include "netopt/export.hpp"
#include "netopt/flow.hpp"
#include "netopt/generate.hpp"
#include "netopt/io.hpp"
#include "netopt/model.hpp"
#include "netopt/rng.hpp"
#include "netopt/solve.hpp"
#include "netopt/validate.hpp"
