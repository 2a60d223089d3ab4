#pragma once

#include "symlbp/analysis.hpp"
#include "symlbp/dataset.hpp"
#include "symlbp/descriptor.hpp"
#include "symlbp/error.hpp"
#include "symlbp/experiment.hpp"
#include "symlbp/features.hpp"
#include "symlbp/image.hpp"
#include "symlbp/svm.hpp"
