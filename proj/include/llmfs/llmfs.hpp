#pragma once

// Convenience umbrella for the whole library.

#include "llmfs/bench.hpp"
#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/eval.hpp"
#include "llmfs/format.hpp"
#include "llmfs/fs_classic.hpp"
#include "llmfs/llm.hpp"
#include "llmfs/matrix.hpp"
#include "llmfs/models.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"
#include "llmfs/score_vector.hpp"
#include "llmfs/selection.hpp"
#include "llmfs/sha256.hpp"
#include "llmfs/stats.hpp"
#include "llmfs/trees.hpp"
