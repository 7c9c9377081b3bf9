#pragma once

#include "ncsplit/admm.hpp"
#include "ncsplit/cycle.hpp"
#include "ncsplit/dense.hpp"
#include "ncsplit/errors.hpp"
#include "ncsplit/experiments.hpp"
#include "ncsplit/linear_operator.hpp"
#include "ncsplit/pg.hpp"
#include "ncsplit/prox.hpp"
#include "ncsplit/report_io.hpp"
#include "ncsplit/rng.hpp"
#include "ncsplit/smooth.hpp"
#include "ncsplit/spd_solve.hpp"
#include "ncsplit/spectral.hpp"
#include "ncsplit/vec.hpp"
