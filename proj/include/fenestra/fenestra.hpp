#pragma once
// Umbrella header.

#include "fenestra/analysis/campaign.hpp"
#include "fenestra/analysis/solutions.hpp"
#include "fenestra/analysis/stats.hpp"
#include "fenestra/building.hpp"
#include "fenestra/catalog.hpp"
#include "fenestra/config.hpp"
#include "fenestra/encoding.hpp"
#include "fenestra/error.hpp"
#include "fenestra/external.hpp"
#include "fenestra/fitness.hpp"
#include "fenestra/io/csv.hpp"
#include "fenestra/io/files.hpp"
#include "fenestra/optimize/benchmarks.hpp"
#include "fenestra/optimize/de.hpp"
#include "fenestra/optimize/fenestration.hpp"
#include "fenestra/optimize/ga.hpp"
#include "fenestra/optimize/hybrid.hpp"
#include "fenestra/optimize/local_search.hpp"
#include "fenestra/optimize/problem.hpp"
#include "fenestra/optimize/shade.hpp"
#include "fenestra/run.hpp"
#include "fenestra/shading_control.hpp"
#include "fenestra/solar.hpp"
#include "fenestra/thermal.hpp"
#include "fenestra/weather.hpp"
