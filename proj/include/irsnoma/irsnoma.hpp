#pragma once

#include "irsnoma/analytics.hpp"
#include "irsnoma/bessel.hpp"
#include "irsnoma/channel.hpp"
#include "irsnoma/experiment.hpp"
#include "irsnoma/linalg.hpp"
#include "irsnoma/link_metrics.hpp"
#include "irsnoma/random.hpp"
#include "irsnoma/reflect.hpp"
#include "irsnoma/simulator.hpp"
