#pragma once

// Umbrella header: construction of small samples of kernel range spaces via
// min-cost-matching colorings, with discrepancy and L_inf certification
// tooling around it.

#include "kds/coloring.hpp"
#include "kds/coreset.hpp"
#include "kds/discrepancy.hpp"
#include "kds/experiments.hpp"
#include "kds/generators.hpp"
#include "kds/geometry.hpp"
#include "kds/io.hpp"
#include "kds/kde.hpp"
#include "kds/kernels.hpp"
#include "kds/matching.hpp"
#include "kds/net.hpp"
#include "kds/parallel.hpp"
#include "kds/points.hpp"
#include "kds/rng.hpp"
