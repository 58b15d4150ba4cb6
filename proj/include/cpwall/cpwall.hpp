#pragma once

#include "cpwall/asymptotics.hpp"
#include "cpwall/constants.hpp"
#include "cpwall/errors.hpp"
#include "cpwall/kernels.hpp"
#include "cpwall/potential.hpp"
#include "cpwall/quadrature.hpp"
#include "cpwall/units.hpp"
#include "cpwall/version.hpp"
