#pragma once

#include "faultline/alt_measures.hpp"
#include "faultline/ct_measure.hpp"
#include "faultline/encoding.hpp"
#include "faultline/error.hpp"
#include "faultline/matching.hpp"
#include "faultline/partitioner.hpp"
#include "faultline/penalty.hpp"
#include "faultline/population.hpp"
#include "faultline/random.hpp"
#include "faultline/schema.hpp"
#include "faultline/stats.hpp"
#include "faultline/synthetic.hpp"
#include "faultline/team.hpp"
