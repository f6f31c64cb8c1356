#pragma once

#include "data.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "harness.hpp"
#include "linalg.hpp"
#include "model_io.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "readout.hpp"
#include "reservoir.hpp"
#include "ring.hpp"
