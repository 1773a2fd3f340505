#pragma once

#include "halfgl/diagnostics.hpp"
#include "halfgl/domain.hpp"
#include "halfgl/energy.hpp"
#include "halfgl/errors.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/fft.hpp"
#include "halfgl/fraclap.hpp"
#include "halfgl/halfharmonic.hpp"
#include "halfgl/kernel.hpp"
#include "halfgl/parallel.hpp"
#include "halfgl/solver.hpp"
