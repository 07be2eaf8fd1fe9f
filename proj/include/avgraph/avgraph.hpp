#pragma once

// Umbrella header: time-series-to-graph mappings (VG/HVG/LPVG and the
// trainable AVG), the dense differentiable core, the dual-branch pooling
// classifier, training, metrics, and the file formats.

#include "avgraph/adam.hpp"
#include "avgraph/avg.hpp"
#include "avgraph/binio.hpp"
#include "avgraph/checkpoint.hpp"
#include "avgraph/dataset_io.hpp"
#include "avgraph/diffpool.hpp"
#include "avgraph/graph_export.hpp"
#include "avgraph/matrix.hpp"
#include "avgraph/metrics.hpp"
#include "avgraph/parallel.hpp"
#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"
#include "avgraph/split.hpp"
#include "avgraph/synth.hpp"
#include "avgraph/tape.hpp"
#include "avgraph/train.hpp"
#include "avgraph/visibility.hpp"
