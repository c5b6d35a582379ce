#pragma once

#include "core.hpp"
#include "erfi.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "gup_solver.hpp"
#include "heun.hpp"
#include "oracle.hpp"
#include "ordinary_qes.hpp"
#include "thermo.hpp"
#include "wavefunction.hpp"
