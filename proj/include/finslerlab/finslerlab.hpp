#pragma once

#include "finslerlab/connections.hpp"
#include "finslerlab/conventions.hpp"
#include "finslerlab/curvature.hpp"
#include "finslerlab/error.hpp"
#include "finslerlab/expression.hpp"
#include "finslerlab/jets.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/parallel.hpp"
#include "finslerlab/processes.hpp"
#include "finslerlab/sampling.hpp"
#include "finslerlab/spray.hpp"
#include "finslerlab/taylor.hpp"
#include "finslerlab/tensor.hpp"
