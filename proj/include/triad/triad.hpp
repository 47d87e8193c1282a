#pragma once

#include "triad/calibrate.hpp"
#include "triad/config.hpp"
#include "triad/csv.hpp"
#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/lm.hpp"
#include "triad/model.hpp"
#include "triad/quantumstats.hpp"
#include "triad/response.hpp"
#include "triad/sfg.hpp"
#include "triad/spectrum.hpp"
#include "triad/timedomain.hpp"
#include "triad/transducer_graphs.hpp"
#include "triad/units.hpp"
