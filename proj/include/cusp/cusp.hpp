#pragma once

#include "cusp/ball.hpp"
#include "cusp/config.hpp"
#include "cusp/dot.hpp"
#include "cusp/dynamics.hpp"
#include "cusp/errors.hpp"
#include "cusp/malnormal.hpp"
#include "cusp/quotient.hpp"
#include "cusp/rational.hpp"
#include "cusp/report.hpp"
#include "cusp/run.hpp"
#include "cusp/stallings.hpp"
#include "cusp/union_find.hpp"
#include "cusp/words.hpp"
