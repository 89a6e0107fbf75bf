#pragma once

#include "qfisher/banded.hpp"
#include "qfisher/catalog.hpp"
#include "qfisher/constants.hpp"
#include "qfisher/convergence.hpp"
#include "qfisher/density.hpp"
#include "qfisher/diffops.hpp"
#include "qfisher/error.hpp"
#include "qfisher/evolution.hpp"
#include "qfisher/field.hpp"
#include "qfisher/grid.hpp"
#include "qfisher/identity.hpp"
#include "qfisher/numerics.hpp"
#include "qfisher/quadrature.hpp"
#include "qfisher/quantities.hpp"
