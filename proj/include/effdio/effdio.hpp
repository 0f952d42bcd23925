#pragma once

#include "effdio/core.hpp"
#include "effdio/numtheory.hpp"
#include "effdio/psi.hpp"
#include "effdio/counting.hpp"
#include "effdio/search.hpp"
#include "effdio/constants.hpp"
#include "effdio/stats.hpp"
#include "effdio/verify.hpp"
#include "effdio/slln.hpp"
#include "effdio/report.hpp"
