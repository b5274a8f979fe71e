#pragma once

// Umbrella header for the library (CLI front end excluded).

#include "iochain/absorbing_chain.hpp"
#include "iochain/dominance.hpp"
#include "iochain/error.hpp"
#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/matrix.hpp"
#include "iochain/pipeline.hpp"
#include "iochain/report.hpp"
#include "iochain/simulation.hpp"
#include "iochain/statistics.hpp"
