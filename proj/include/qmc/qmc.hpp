#pragma once

// Umbrella header.

#include "qmc/adversary.hpp"
#include "qmc/analysis.hpp"
#include "qmc/bits.hpp"
#include "qmc/checker.hpp"
#include "qmc/code.hpp"
#include "qmc/config.hpp"
#include "qmc/errors.hpp"
#include "qmc/experiment.hpp"
#include "qmc/fingerprint.hpp"
#include "qmc/random.hpp"
#include "qmc/statevector.hpp"
