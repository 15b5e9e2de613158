#pragma once

#include "bdlle/baselines.hpp"
#include "bdlle/benchmark.hpp"
#include "bdlle/config.hpp"
#include "bdlle/datasets.hpp"
#include "bdlle/detectors.hpp"
#include "bdlle/diffusion.hpp"
#include "bdlle/errors.hpp"
#include "bdlle/eval.hpp"
#include "bdlle/geodesic.hpp"
#include "bdlle/indicator.hpp"
#include "bdlle/local_covariance.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/parallel.hpp"
#include "bdlle/point_cloud.hpp"
#include "bdlle/report_io.hpp"
#include "bdlle/rng.hpp"
#include "bdlle/theory.hpp"
