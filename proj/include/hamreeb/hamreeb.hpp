#pragma once

#include "hamreeb/area_form.hpp"
#include "hamreeb/axioms.hpp"
#include "hamreeb/builtins.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/counterexample.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/graph_function.hpp"
#include "hamreeb/hamiltonian_like.hpp"
#include "hamreeb/io.hpp"
#include "hamreeb/mesh.hpp"
#include "hamreeb/obstruction.hpp"
#include "hamreeb/quadrature.hpp"
#include "hamreeb/reeb.hpp"
#include "hamreeb/report.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/shift_map.hpp"
#include "hamreeb/surface.hpp"
#include "hamreeb/theta.hpp"
#include "hamreeb/vector_field.hpp"
#include "hamreeb/verify.hpp"
