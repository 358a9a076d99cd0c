#pragma once

// Umbrella header for the phasesync library.

#include "phasesync/diagnostics.hpp"
#include "phasesync/distances.hpp"
#include "phasesync/eigensolve.hpp"
#include "phasesync/errors.hpp"
#include "phasesync/gpm.hpp"
#include "phasesync/instance.hpp"
#include "phasesync/instance_io.hpp"
#include "phasesync/phase_vector.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/spectral_init.hpp"
#include "phasesync/sweep.hpp"
#include "phasesync/trace_io.hpp"
#include "phasesync/verify.hpp"
