#pragma once

// Umbrella header: towers of regular finite covers, level Laplace spectra,
// the telescoping decomposition, and the truncated spectral measure.

#include "solspec/cache.hpp"
#include "solspec/config.hpp"
#include "solspec/dense_eig.hpp"
#include "solspec/error.hpp"
#include "solspec/graph.hpp"
#include "solspec/group.hpp"
#include "solspec/intervals.hpp"
#include "solspec/lanczos.hpp"
#include "solspec/measure.hpp"
#include "solspec/rational.hpp"
#include "solspec/report.hpp"
#include "solspec/resolution.hpp"
#include "solspec/solenoid.hpp"
#include "solspec/spectral.hpp"
#include "solspec/telescope.hpp"
#include "solspec/tower.hpp"
#include "solspec/verify_report.hpp"
