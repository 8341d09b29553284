#pragma once

#include "quartets/catalog.hpp"
#include "quartets/dag.hpp"
#include "quartets/dataset.hpp"
#include "quartets/error.hpp"
#include "quartets/estimation.hpp"
#include "quartets/normal_stream.hpp"
#include "quartets/sem.hpp"
#include "quartets/svg_plot.hpp"
#include "quartets/synthesizer.hpp"
