#pragma once

#include "feikit/biased.hpp"
#include "feikit/bits.hpp"
#include "feikit/boolfn.hpp"
#include "feikit/coding.hpp"
#include "feikit/compose.hpp"
#include "feikit/distribution.hpp"
#include "feikit/dtree.hpp"
#include "feikit/dyadic.hpp"
#include "feikit/errors.hpp"
#include "feikit/harness.hpp"
#include "feikit/prng.hpp"
#include "feikit/speccode.hpp"
#include "feikit/spectrum.hpp"
#include "feikit/suites.hpp"
#include "feikit/truth_table.hpp"
