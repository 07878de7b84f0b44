#pragma once

#include "mrf_flock/control_space.hpp"
#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"
#include "mrf_flock/io.hpp"
#include "mrf_flock/metrics.hpp"
#include "mrf_flock/mrf_controller.hpp"
#include "mrf_flock/potentials.hpp"
#include "mrf_flock/simulation.hpp"
