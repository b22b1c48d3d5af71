#pragma once

// Library modules. The command-line layer lives in cli.hpp.

#include "core.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "graphs.hpp"
#include "functions.hpp"
#include "seminorms.hpp"
#include "spectral.hpp"
#include "linalg.hpp"
#include "extension.hpp"
#include "gp_lab.hpp"
#include "fractal_lab.hpp"
#include "conformal_lab.hpp"
