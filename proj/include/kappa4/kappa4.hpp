#pragma once

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/estimators.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/gof.hpp"
#include "kappa4/io.hpp"
#include "kappa4/likelihood.hpp"
#include "kappa4/lmoments.hpp"
#include "kappa4/numerics.hpp"
#include "kappa4/optimize.hpp"
#include "kappa4/parallel.hpp"
#include "kappa4/penalties.hpp"
#include "kappa4/plotdata.hpp"
#include "kappa4/profile.hpp"
#include "kappa4/random.hpp"
#include "kappa4/simulation.hpp"
