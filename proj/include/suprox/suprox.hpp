#pragma once

#include "bench.hpp"
#include "driver.hpp"
#include "errors.hpp"
#include "feasibility.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "perturbation.hpp"
#include "phantoms.hpp"
#include "projector.hpp"
#include "system_io.hpp"
