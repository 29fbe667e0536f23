#pragma once

// Umbrella header: the whole library.

#include "newtpot/admissibility.hpp"
#include "newtpot/errors.hpp"
#include "newtpot/gauss_legendre.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/lorentz.hpp"
#include "newtpot/parallel.hpp"
#include "newtpot/quadrature.hpp"
#include "newtpot/radial_reference.hpp"
#include "newtpot/random.hpp"
#include "newtpot/sources.hpp"
#include "newtpot/sphere_rule.hpp"
#include "newtpot/verify.hpp"
