#pragma once

#include "dwelltime/config.hpp"
#include "dwelltime/dwell.hpp"
#include "dwelltime/errors.hpp"
#include "dwelltime/operational.hpp"
#include "dwelltime/potential.hpp"
#include "dwelltime/quantities.hpp"
#include "dwelltime/richardson.hpp"
#include "dwelltime/scattering.hpp"
#include "dwelltime/sweep.hpp"
#include "dwelltime/verify.hpp"
