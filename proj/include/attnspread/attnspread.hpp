#pragma once

#include "attnspread/analysis.hpp"
#include "attnspread/error.hpp"
#include "attnspread/geometry.hpp"
#include "attnspread/grid.hpp"
#include "attnspread/io/blob.hpp"
#include "attnspread/io/csv.hpp"
#include "attnspread/io/dataset.hpp"
#include "attnspread/io/svg.hpp"
#include "attnspread/linalg.hpp"
#include "attnspread/spread.hpp"
#include "attnspread/stats.hpp"
#include "attnspread/synth.hpp"
