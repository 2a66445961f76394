#pragma once

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/cifar.hpp"
#include "csbench/io/idx.hpp"
#include "csbench/io/image_file.hpp"
#include "csbench/io/image_folder.hpp"
#include "csbench/metrics.hpp"
#include "csbench/rational.hpp"
#include "csbench/scoring.hpp"
#include "csbench/sensing.hpp"
#include "csbench/solvers/reconstruct.hpp"
#include "csbench/version.hpp"
