#ifndef HSDU_HSDU_HPP
#define HSDU_HSDU_HPP

#include "hsdu/admm_abundance.hpp"
#include "hsdu/admm_endmember.hpp"
#include "hsdu/baseline.hpp"
#include "hsdu/core.hpp"
#include "hsdu/generator.hpp"
#include "hsdu/io.hpp"
#include "hsdu/metrics.hpp"
#include "hsdu/objective.hpp"
#include "hsdu/rng.hpp"
#include "hsdu/solver.hpp"

#endif
