#pragma once

#include "lstcn/errors.hpp"
#include "lstcn/fit.hpp"
#include "lstcn/influence.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/metrics.hpp"
#include "lstcn/model.hpp"
#include "lstcn/model_io.hpp"
#include "lstcn/patches.hpp"
#include "lstcn/ridge.hpp"
#include "lstcn/series.hpp"
#include "lstcn/stcn.hpp"
#include "lstcn/tuning.hpp"
