#pragma once

#include "leafkit/refkernels/conv.hpp"
#include "leafkit/refkernels/fusion.hpp"
#include "leafkit/refkernels/head.hpp"
#include "leafkit/refkernels/tensor.hpp"
