#pragma once

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/generators.hpp"
#include "ifslab/symbolic.hpp"
#include "ifslab/semigroup.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/detectors.hpp"
#include "ifslab/smooth.hpp"
#include "ifslab/gallery.hpp"
#include "ifslab/io.hpp"
#include "ifslab/analysis.hpp"
