#pragma once

#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/ranking.hpp"
#include "rankjudge/distributions.hpp"
#include "rankjudge/outcome.hpp"
#include "rankjudge/omnibus.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/montecarlo.hpp"
#include "rankjudge/stability.hpp"
#include "rankjudge/io.hpp"
#include "rankjudge/report.hpp"
#include "rankjudge/reproduce.hpp"
