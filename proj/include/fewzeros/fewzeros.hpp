#pragma once

#include "fewzeros/scalar.hpp"
#include "fewzeros/lp.hpp"
#include "fewzeros/geometry.hpp"
#include "fewzeros/system_spec.hpp"
#include "fewzeros/bounds.hpp"
#include "fewzeros/rng.hpp"
#include "fewzeros/random_systems.hpp"
#include "fewzeros/interval.hpp"
#include "fewzeros/rootcount.hpp"
#include "fewzeros/quadrature.hpp"
#include "fewzeros/rice.hpp"
#include "fewzeros/io.hpp"
#include "fewzeros/experiment.hpp"
