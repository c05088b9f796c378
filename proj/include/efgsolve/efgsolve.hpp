#pragma once

#include "efgsolve/cfr.hpp"
#include "efgsolve/dgf.hpp"
#include "efgsolve/egt.hpp"
#include "efgsolve/game_tree.hpp"
#include "efgsolve/harness.hpp"
#include "efgsolve/leduc.hpp"
#include "efgsolve/sequence_form.hpp"
#include "efgsolve/sparse_matrix.hpp"
#include "efgsolve/telemetry.hpp"
#include "efgsolve/treeplex.hpp"
