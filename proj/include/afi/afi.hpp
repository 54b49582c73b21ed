#pragma once

#include "afi/error.hpp"
#include "afi/events.hpp"
#include "afi/automaton.hpp"
#include "afi/graph.hpp"
#include "afi/diagnosis.hpp"
#include "afi/decision.hpp"
#include "afi/bts.hpp"
#include "afi/synthesis.hpp"
#include "afi/runtime.hpp"
#include "afi/io.hpp"
