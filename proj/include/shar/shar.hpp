#pragma once

#include "shar/version.hpp"
#include "shar/error.hpp"
#include "shar/statdist.hpp"
#include "shar/basis.hpp"
#include "shar/sample.hpp"
#include "shar/lrv.hpp"
#include "shar/two_sample.hpp"
#include "shar/rng.hpp"
#include "shar/bootstrap.hpp"
#include "shar/simlab.hpp"
#include "shar/table.hpp"
