#pragma once

// Everything, in dependency order.
#include "errors.hpp"
#include "exact_linalg.hpp"
#include "superspace.hpp"
#include "power_functors.hpp"
#include "gamma_morphisms.hpp"
#include "p_complexes.hpp"
#include "troesch.hpp"
#include "resolutions.hpp"
