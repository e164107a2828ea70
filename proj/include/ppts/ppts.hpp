#pragma once

#include "ppts/distribution.hpp"
#include "ppts/errors.hpp"
#include "ppts/quadrature.hpp"
#include "ppts/report_io.hpp"
#include "ppts/solver.hpp"
#include "ppts/support.hpp"
#include "ppts/tridiagonal.hpp"
#include "ppts/validation.hpp"
