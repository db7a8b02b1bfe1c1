#pragma once

#include "mcc/calibrate.hpp"
#include "mcc/embedspace.hpp"
#include "mcc/error.hpp"
#include "mcc/graphbuild.hpp"
#include "mcc/io.hpp"
#include "mcc/metrics.hpp"
#include "mcc/multicut.hpp"
#include "mcc/partition.hpp"
#include "mcc/synthetic.hpp"
