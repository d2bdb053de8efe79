#pragma once

// Convenience umbrella: quadrature-based actions of phi-functions of
// Kronecker-sum matrices, with a-priori error control, plus exponential
// Runge-Kutta integrators built on top.

#include "phiquad/bounds.hpp"
#include "phiquad/dense.hpp"
#include "phiquad/integrators.hpp"
#include "phiquad/kron.hpp"
#include "phiquad/oracle.hpp"
#include "phiquad/phiaction.hpp"
#include "phiquad/problems.hpp"
#include "phiquad/quadrature.hpp"
#include "phiquad/roots.hpp"
#include "phiquad/util.hpp"
