#pragma once

// Umbrella header: threshold-oracle Hamming distance search, the
// distance-embedding hash with its estimators, and the statistical
// indistinguishability harness.

#include "pph/bitvec.hpp"
#include "pph/embedding.hpp"
#include "pph/experiments.hpp"
#include "pph/io.hpp"
#include "pph/oracle.hpp"
#include "pph/rng.hpp"
#include "pph/sampling.hpp"
#include "pph/search.hpp"
#include "pph/security.hpp"
#include "pph/stats.hpp"
