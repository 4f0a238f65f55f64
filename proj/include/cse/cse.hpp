#pragma once

#include "cse/dataset.hpp"
#include "cse/embedding.hpp"
#include "cse/errors.hpp"
#include "cse/kernels.hpp"
#include "cse/parallel.hpp"
#include "cse/rng.hpp"
#include "cse/simulate.hpp"
#include "cse/survival.hpp"
#include "cse/version.hpp"
