#pragma once

#include "errors.hpp"
#include "linalg.hpp"
#include "qutrit_core.hpp"
#include "rtn_kernel.hpp"
#include "dephasing_evolution.hpp"
#include "entropy_uncertainty.hpp"
#include "mc_oracle.hpp"
