#pragma once

#include "sarcv/analysis.hpp"
#include "sarcv/errors.hpp"
#include "sarcv/estimators.hpp"
#include "sarcv/gridcore.hpp"
#include "sarcv/increments.hpp"
#include "sarcv/random.hpp"
#include "sarcv/simulator.hpp"
#include "sarcv/truncation.hpp"
