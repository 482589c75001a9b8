#pragma once

#include "fuelclean/clustering.hpp"
#include "fuelclean/config_io.hpp"
#include "fuelclean/csv_io.hpp"
#include "fuelclean/error.hpp"
#include "fuelclean/evaluation.hpp"
#include "fuelclean/median_filter.hpp"
#include "fuelclean/peaks.hpp"
#include "fuelclean/pipeline.hpp"
#include "fuelclean/preprocess.hpp"
#include "fuelclean/synth.hpp"
#include "fuelclean/types.hpp"
#include "fuelclean/wavelet.hpp"
