// Umbrella header.
#pragma once

#include "ddugm/consistency.hpp"
#include "ddugm/engine.hpp"
#include "ddugm/fft.hpp"
#include "ddugm/hankel.hpp"
#include "ddugm/io.hpp"
#include "ddugm/metrics.hpp"
#include "ddugm/phantom.hpp"
#include "ddugm/remote_score.hpp"
#include "ddugm/rng.hpp"
#include "ddugm/sampler.hpp"
#include "ddugm/sampling.hpp"
#include "ddugm/schedule.hpp"
#include "ddugm/score.hpp"
#include "ddugm/tensor.hpp"
#include "ddugm/weighting.hpp"
#include "ddugm/wire.hpp"
