// upsynth.hpp -- umbrella header
#pragma once

#include "upsynth/arena.hpp"
#include "upsynth/automata.hpp"
#include "upsynth/compiler.hpp"
#include "upsynth/definability.hpp"
#include "upsynth/determinize.hpp"
#include "upsynth/formula.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/predicate.hpp"
#include "upsynth/solver.hpp"
#include "upsynth/specfile.hpp"
#include "upsynth/strategy.hpp"
#include "upsynth/synth.hpp"
