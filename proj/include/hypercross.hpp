#pragma once

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/parallel.hpp"
#include "hypercross/pde/galerkin.hpp"
#include "hypercross/pde/legendre.hpp"
#include "hypercross/pde/reference.hpp"
#include "hypercross/pde/studies.hpp"
#include "hypercross/pde/trig.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/summability.hpp"
#include "hypercross/tensorfield.hpp"
#include "hypercross/weights.hpp"
