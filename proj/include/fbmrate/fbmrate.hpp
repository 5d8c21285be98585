#pragma once

#include "fbmrate/errors.hpp"
#include "fbmrate/random.hpp"
#include "fbmrate/numerics.hpp"
#include "fbmrate/parallel.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/integrand.hpp"
#include "fbmrate/crossing.hpp"
#include "fbmrate/discretize.hpp"
#include "fbmrate/fraccalc.hpp"
#include "fbmrate/experiment.hpp"
