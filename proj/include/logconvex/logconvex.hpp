#pragma once

#include "logconvex/ballbodies.hpp"
#include "logconvex/bodies.hpp"
#include "logconvex/covariogram.hpp"
#include "logconvex/errors.hpp"
#include "logconvex/logconcave.hpp"
#include "logconvex/numkernel.hpp"
#include "logconvex/profile.hpp"
#include "logconvex/projbodies.hpp"
#include "logconvex/verify.hpp"
