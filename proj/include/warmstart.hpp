#pragma once

#include "warmstart/dense.hpp"
#include "warmstart/errors.hpp"
#include "warmstart/experiment.hpp"
#include "warmstart/extrapolation.hpp"
#include "warmstart/krylov.hpp"
#include "warmstart/method.hpp"
#include "warmstart/metrics.hpp"
#include "warmstart/model_problem.hpp"
#include "warmstart/op_counter.hpp"
#include "warmstart/projection.hpp"
