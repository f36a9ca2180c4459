#pragma once

#include <advect/characteristics.hpp>
#include <advect/config.hpp>
#include <advect/corpus.hpp>
#include <advect/diagnostics.hpp>
#include <advect/error.hpp>
#include <advect/expression.hpp>
#include <advect/fields.hpp>
#include <advect/geometry.hpp>
#include <advect/ode.hpp>
#include <advect/quadrature.hpp>
#include <advect/solver.hpp>
#include <advect/triangulation.hpp>
