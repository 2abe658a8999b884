#pragma once

// Umbrella header: asymptotic security analysis of coherent-state CV QKD from
// arbitrary (generally asymmetric) measured preparation statistics.

#include "cvqkd/channel.hpp"
#include "cvqkd/covariance.hpp"
#include "cvqkd/entropy.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/purifier.hpp"
#include "cvqkd/scenario.hpp"
#include "cvqkd/state_builder.hpp"
#include "cvqkd/sweep.hpp"
#include "cvqkd/synthetic.hpp"
