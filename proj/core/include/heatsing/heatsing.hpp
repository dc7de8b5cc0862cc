#pragma once

#include "heatsing/errors.hpp"
#include "heatsing/fbm.hpp"
#include "heatsing/functionals.hpp"
#include "heatsing/heatmass.hpp"
#include "heatsing/parallel.hpp"
#include "heatsing/paths.hpp"
#include "heatsing/quadrature.hpp"
#include "heatsing/scaling.hpp"
#include "heatsing/seeding.hpp"
#include "heatsing/version.hpp"
