#pragma once

#include "gwi/errors.hpp"
#include "gwi/estimators.hpp"
#include "gwi/harness.hpp"
#include "gwi/laws.hpp"
#include "gwi/model.hpp"
#include "gwi/oracle.hpp"
#include "gwi/philox.hpp"
#include "gwi/simulate.hpp"
#include "gwi/special.hpp"
#include "gwi/tail_theory.hpp"
