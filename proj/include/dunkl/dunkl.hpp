#pragma once

#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"
#include "dunkl/dunkl_operator.hpp"
#include "dunkl/means.hpp"
#include "dunkl/growth.hpp"
#include "dunkl/construct.hpp"
#include "dunkl/dynamics.hpp"
#include "dunkl/config.hpp"
