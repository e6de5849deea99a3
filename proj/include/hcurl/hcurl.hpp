#pragma once

#include "hcurl/amr.hpp"
#include "hcurl/edge_fem.hpp"
#include "hcurl/estimators.hpp"
#include "hcurl/geometry.hpp"
#include "hcurl/linalg.hpp"
#include "hcurl/mesh.hpp"
#include "hcurl/problems.hpp"
#include "hcurl/quadrature.hpp"
#include "hcurl/report.hpp"
