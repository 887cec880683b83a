#pragma once

// Umbrella header for the maneuver-classification pipeline:
// sensor ingestion -> Haar wavelet features -> neighborhood-component
// feature selection -> MLP/RBF/SVM classification and repeated-split
// evaluation, plus the braking threshold rule and the two-Gaussian
// curve-fit feature alternative.

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/evaluate.hpp"
#include "drivestyle/experiment.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/gaussfit.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/metrics.hpp"
#include "drivestyle/mlp.hpp"
#include "drivestyle/nca.hpp"
#include "drivestyle/rbf.hpp"
#include "drivestyle/rng.hpp"
#include "drivestyle/rules.hpp"
#include "drivestyle/sensor.hpp"
#include "drivestyle/svm.hpp"
#include "drivestyle/synth.hpp"
#include "drivestyle/wavelet.hpp"
