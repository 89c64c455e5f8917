#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/matrix.hpp>
#include <abnet/core/parallel.hpp>
#include <abnet/core/rng.hpp>
#include <abnet/core/stats.hpp>
#include <abnet/model/network.hpp>
#include <abnet/model/toppling_matrix.hpp>
#include <abnet/model/validate.hpp>
#include <abnet/spectral/classify.hpp>
#include <abnet/spectral/criticality.hpp>
#include <abnet/spectral/perron.hpp>
#include <abnet/spectral/primitive.hpp>
#include <abnet/spectral/stationary.hpp>
#include <abnet/stack/stack.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/dynamics/sampled_stack.hpp>
#include <abnet/walk/walk.hpp>
#include <abnet/walk/viable.hpp>
#include <abnet/conserved/conserved.hpp>
#include <abnet/io/json_io.hpp>
