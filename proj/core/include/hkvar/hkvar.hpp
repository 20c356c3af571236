#pragma once

#include "hkvar/batch.hpp"
#include "hkvar/classify.hpp"
#include "hkvar/differentiation.hpp"
#include "hkvar/error.hpp"
#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"
#include "hkvar/increment.hpp"
#include "hkvar/io.hpp"
#include "hkvar/summation.hpp"
#include "hkvar/variation.hpp"
#include "hkvar/verify.hpp"
#include "hkvar/zoo.hpp"
