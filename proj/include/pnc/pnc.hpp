#pragma once

#include "bp_decoder.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "degree_distribution.hpp"
#include "demodulator.hpp"
#include "eira_builder.hpp"
#include "exit_chart.hpp"
#include "io.hpp"
#include "jfunction.hpp"
#include "modem.hpp"
#include "mutual_information.hpp"
#include "parity_check_matrix.hpp"
#include "sim.hpp"
#include "somap.hpp"
