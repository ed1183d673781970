#pragma once

#include "momglm/csv.hpp"
#include "momglm/dataset.hpp"
#include "momglm/errors.hpp"
#include "momglm/estimators.hpp"
#include "momglm/gauss_moments.hpp"
#include "momglm/links.hpp"
#include "momglm/moment_systems.hpp"
#include "momglm/rng.hpp"
#include "momglm/simlab.hpp"
#include "momglm/stein_oracle.hpp"
#include "momglm/ustat.hpp"
