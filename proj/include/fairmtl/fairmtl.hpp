#pragma once

// Convenience include for the whole library. Individual headers stay usable
// on their own; nothing here adds symbols.

#include "fairmtl/aspects.hpp"
#include "fairmtl/augment.hpp"
#include "fairmtl/commands.hpp"
#include "fairmtl/config.hpp"
#include "fairmtl/dist.hpp"
#include "fairmtl/document.hpp"
#include "fairmtl/features.hpp"
#include "fairmtl/jsonl.hpp"
#include "fairmtl/metrics.hpp"
#include "fairmtl/model.hpp"
#include "fairmtl/preprocess.hpp"
#include "fairmtl/report.hpp"
#include "fairmtl/rng.hpp"
#include "fairmtl/significance.hpp"
#include "fairmtl/split.hpp"
#include "fairmtl/synth.hpp"
#include "fairmtl/trainer.hpp"
