#pragma once

#include "recomb/lf.hpp"
#include "recomb/dataset.hpp"
#include "recomb/random.hpp"
#include "recomb/scfg.hpp"
#include "recomb/cooc.hpp"
#include "recomb/metrics.hpp"
