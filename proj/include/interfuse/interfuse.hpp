#pragma once

// Umbrella header.

#include "interfuse/core/error.hpp"
#include "interfuse/core/log.hpp"
#include "interfuse/eval/metrics.hpp"
#include "interfuse/eval/run.hpp"
#include "interfuse/eval/stats.hpp"
#include "interfuse/fusion/config.hpp"
#include "interfuse/fusion/fuse.hpp"
#include "interfuse/ingest/corpus.hpp"
#include "interfuse/ingest/qrels.hpp"
#include "interfuse/ingest/scores.hpp"
#include "interfuse/ingest/vectors.hpp"
#include "interfuse/pipeline/commands.hpp"
#include "interfuse/pipeline/manifest.hpp"
#include "interfuse/text/expand.hpp"
#include "interfuse/text/porter.hpp"
#include "interfuse/text/tfidf.hpp"
#include "interfuse/text/tokenize.hpp"
#include "interfuse/visual/descriptors.hpp"
#include "interfuse/visual/kmeans.hpp"
#include "interfuse/visual/similarity.hpp"
