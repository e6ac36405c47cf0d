#pragma once

// Umbrella header for the kernel-regression coreset library.

#include "kreg/coreset.hpp"
#include "kreg/csv.hpp"
#include "kreg/dataset.hpp"
#include "kreg/error_eval.hpp"
#include "kreg/evaluate.hpp"
#include "kreg/grid.hpp"
#include "kreg/kernel.hpp"
#include "kreg/morton.hpp"
#include "kreg/rng.hpp"
#include "kreg/synth.hpp"
#include "kreg/text.hpp"
