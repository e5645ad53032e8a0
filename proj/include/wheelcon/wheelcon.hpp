#pragma once

#include "wheelcon/analysis.hpp"
#include "wheelcon/disturbance.hpp"
#include "wheelcon/engine.hpp"
#include "wheelcon/log_io.hpp"
#include "wheelcon/minimax.hpp"
#include "wheelcon/plant.hpp"
#include "wheelcon/prng.hpp"
#include "wheelcon/script.hpp"
#include "wheelcon/signal.hpp"
#include "wheelcon/subjects.hpp"
