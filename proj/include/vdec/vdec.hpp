#pragma once

#include "vdec/core.hpp"
#include "vdec/csv.hpp"
#include "vdec/error.hpp"
#include "vdec/experiments.hpp"
#include "vdec/histogram.hpp"
#include "vdec/report.hpp"
#include "vdec/soo.hpp"
