#pragma once

#include "ubmat/bench.hpp"
#include "ubmat/dense_matrix.hpp"
#include "ubmat/errors.hpp"
#include "ubmat/estimation.hpp"
#include "ubmat/inference.hpp"
#include "ubmat/io.hpp"
#include "ubmat/mixture.hpp"
#include "ubmat/partition.hpp"
#include "ubmat/random.hpp"
#include "ubmat/report.hpp"
#include "ubmat/simulation.hpp"
#include "ubmat/ub_matrix.hpp"
