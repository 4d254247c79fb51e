#pragma once

#include "crn/dynamics.hpp"
#include "crn/endo.hpp"
#include "crn/error.hpp"
#include "crn/graph.hpp"
#include "crn/json_out.hpp"
#include "crn/kinetics.hpp"
#include "crn/linalg.hpp"
#include "crn/netparse.hpp"
#include "crn/network.hpp"
#include "crn/rational.hpp"
#include "crn/report.hpp"
