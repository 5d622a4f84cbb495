#pragma once

#include "corrles/ensemble.hpp"
#include "corrles/girko.hpp"
#include "corrles/harness.hpp"
#include "corrles/kernel.hpp"
#include "corrles/mde.hpp"
#include "corrles/rng.hpp"
#include "corrles/serialize.hpp"
#include "corrles/spectral.hpp"
#include "corrles/stats.hpp"
