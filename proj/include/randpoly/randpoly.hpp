#pragma once

#include "randpoly/core.hpp"
#include "randpoly/ensembles.hpp"
#include "randpoly/kernel.hpp"
#include "randpoly/montecarlo.hpp"
#include "randpoly/scaling.hpp"
