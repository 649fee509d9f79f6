#pragma once

#include "fgwmixup/types.hpp"
#include "fgwmixup/graph.hpp"
#include "fgwmixup/objective.hpp"
#include "fgwmixup/projection.hpp"
#include "fgwmixup/solver.hpp"
#include "fgwmixup/barycenter.hpp"
#include "fgwmixup/augment.hpp"
#include "fgwmixup/synthetic.hpp"
#include "fgwmixup/tudataset.hpp"
#include "fgwmixup/bench.hpp"
#include "fgwmixup/log.hpp"
#include "fgwmixup/parallel.hpp"
