#pragma once

#include "hdtest/error.hpp"
#include "hdtest/matcore.hpp"
#include "hdtest/csv.hpp"
#include "hdtest/estimators.hpp"
#include "hdtest/modelcheck.hpp"
#include "hdtest/stats.hpp"
#include "hdtest/procedures.hpp"
#include "hdtest/datagen.hpp"
#include "hdtest/simharness.hpp"
#include "hdtest/report.hpp"
