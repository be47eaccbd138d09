#pragma once

#include "lvbc/checks.hpp"
#include "lvbc/control_opt.hpp"
#include "lvbc/core.hpp"
#include "lvbc/dynamics.hpp"
#include "lvbc/elliptic.hpp"
#include "lvbc/error.hpp"
#include "lvbc/figures.hpp"
#include "lvbc/io.hpp"
#include "lvbc/pde.hpp"
#include "lvbc/thresholds.hpp"
#include "lvbc/tridiag.hpp"
#include "lvbc/waves.hpp"
