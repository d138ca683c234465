#pragma once

#include "causalview/error.hpp"
#include "causalview/matcore.hpp"
#include "causalview/qobjects.hpp"
#include "causalview/scenario.hpp"
#include "causalview/multiparty.hpp"
#include "causalview/nosignal.hpp"
#include "causalview/randgen.hpp"
#include "causalview/scenario_file.hpp"
